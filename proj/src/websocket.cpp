#include "walk3lp/websocket.hpp"

#include <netdb.h>
#include <openssl/evp.h>
#include <openssl/sha.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <random>
#include <sstream>

namespace walk3lp::ws {

namespace {

constexpr const char* kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr std::size_t kMaxMessage = 1 << 20;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string accept_key(const std::string& client_key) {
  const std::string src = client_key + kGuid;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(src.data()), src.size(), digest);
  unsigned char out[4 * ((SHA_DIGEST_LENGTH + 2) / 3) + 1];
  const int n = EVP_EncodeBlock(out, digest, SHA_DIGEST_LENGTH);
  return std::string(reinterpret_cast<char*>(out), n);
}

std::string HttpRequest::header(const std::string& name) const {
  const auto it = headers.find(lower(name));
  return it == headers.end() ? std::string() : it->second;
}

std::optional<HttpRequest> parse_http_request(const std::string& head) {
  if (head.find("\r\n\r\n") == std::string::npos) return std::nullopt;
  std::istringstream in(head);
  std::string line;
  HttpRequest req;
  if (!std::getline(in, line)) return std::nullopt;
  std::istringstream first(line);
  std::string version;
  first >> req.method >> req.path >> version;
  if (req.method.empty() || req.path.empty()) throw ProtocolError("malformed request line");
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ProtocolError("malformed header line");
    req.headers[lower(trim(line.substr(0, colon)))] = trim(line.substr(colon + 1));
  }
  return req;
}

std::string encode_frame(Opcode opcode, const std::string& payload, bool fin,
                         std::optional<std::uint32_t> mask) {
  std::string out;
  out.push_back(static_cast<char>((fin ? 0x80 : 0) | static_cast<std::uint8_t>(opcode)));
  const std::uint8_t mbit = mask ? 0x80 : 0;
  const std::uint64_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(mbit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(mbit | 126));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(mbit | 127));
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xFF));
  }
  if (!mask) return out + payload;
  char key[4];
  for (int i = 0; i < 4; ++i) key[i] = static_cast<char>((*mask >> (8 * (3 - i))) & 0xFF);
  out.append(key, 4);
  for (std::size_t i = 0; i < payload.size(); ++i) out.push_back(payload[i] ^ key[i % 4]);
  return out;
}

std::size_t decode_frame(const std::string& buf, WireFrame& out, bool require_mask) {
  if (buf.size() < 2) return 0;
  const auto b0 = static_cast<std::uint8_t>(buf[0]);
  const auto b1 = static_cast<std::uint8_t>(buf[1]);
  if (b0 & 0x70) throw ProtocolError("reserved bits set");
  const bool masked = b1 & 0x80;
  if (require_mask && !masked) throw ProtocolError("client frames must be masked");
  std::size_t pos = 2;
  std::uint64_t n = b1 & 0x7F;
  if (n == 126) {
    if (buf.size() < 4) return 0;
    n = (static_cast<std::uint8_t>(buf[2]) << 8) | static_cast<std::uint8_t>(buf[3]);
    pos = 4;
  } else if (n == 127) {
    if (buf.size() < 10) return 0;
    n = 0;
    for (int i = 0; i < 8; ++i) n = (n << 8) | static_cast<std::uint8_t>(buf[2 + i]);
    pos = 10;
  }
  if (n > kMaxMessage) throw ProtocolError("frame too large");
  char key[4] = {0, 0, 0, 0};
  if (masked) {
    if (buf.size() < pos + 4) return 0;
    std::copy(buf.begin() + pos, buf.begin() + pos + 4, key);
    pos += 4;
  }
  if (buf.size() < pos + n) return 0;
  out.fin = b0 & 0x80;
  out.opcode = static_cast<Opcode>(b0 & 0x0F);
  out.payload.assign(buf, pos, n);
  if (masked) {
    for (std::size_t i = 0; i < out.payload.size(); ++i) out.payload[i] ^= key[i % 4];
  }
  return pos + n;
}

Connection::Connection(int fd, bool server_side, std::string pending)
    : fd_(fd), server_side_(server_side), buf_(std::move(pending)) {}

Connection::~Connection() {
  close();
  ::close(fd_);
}

bool Connection::send_raw(const std::string& bytes) {
  std::lock_guard<std::mutex> lock(send_mutex_);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<std::size_t>(n);
  }
  return true;
}

bool Connection::send_text(const std::string& text) {
  if (closed_) return false;
  std::optional<std::uint32_t> mask;
  if (!server_side_) {
    static thread_local std::mt19937 rng(std::random_device{}());
    mask = rng();
  }
  return send_raw(encode_frame(Opcode::kText, text, true, mask));
}

bool Connection::fill() {
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buf_.append(chunk, static_cast<std::size_t>(n));
    return true;
  }
}

std::optional<std::string> Connection::receive() {
  std::string message;
  bool in_message = false;
  for (;;) {
    WireFrame f;
    std::size_t used = 0;
    try {
      used = decode_frame(buf_, f, server_side_);
    } catch (const ProtocolError&) {
      close();
      return std::nullopt;
    }
    if (used == 0) {
      if (!fill()) return std::nullopt;
      continue;
    }
    buf_.erase(0, used);
    switch (f.opcode) {
      case Opcode::kPing:
        send_raw(encode_frame(Opcode::kPong, f.payload, true,
                              server_side_ ? std::nullopt : std::optional<std::uint32_t>(0)));
        break;
      case Opcode::kPong:
        break;
      case Opcode::kClose:
        close();
        return std::nullopt;
      case Opcode::kText:
      case Opcode::kBinary:
        message = f.payload;
        in_message = true;
        if (f.fin) return message;
        break;
      case Opcode::kContinuation:
        if (!in_message) {
          close();
          return std::nullopt;
        }
        message += f.payload;
        if (message.size() > kMaxMessage) {
          close();
          return std::nullopt;
        }
        if (f.fin) return message;
        break;
      default:
        close();
        return std::nullopt;
    }
  }
}

void Connection::close() {
  if (closed_.exchange(true)) return;
  send_raw(encode_frame(Opcode::kClose, "", true,
                        server_side_ ? std::nullopt : std::optional<std::uint32_t>(0)));
  ::shutdown(fd_, SHUT_RDWR);
}

int connect_tcp(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) {
    throw std::runtime_error("cannot resolve " + host);
  }
  int fd = -1;
  for (addrinfo* p = res; p; p = p->ai_next) {
    fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  if (fd < 0) throw std::runtime_error("cannot connect to " + host + ":" + std::to_string(port));
  return fd;
}

std::string client_handshake(int fd, const std::string& host, const std::string& path) {
  const std::string key = "dGhlIHNhbXBsZSBub25jZQ==";
  const std::string req = "GET " + path + " HTTP/1.1\r\nHost: " + host +
                          "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                          "Sec-WebSocket-Key: " + key + "\r\nSec-WebSocket-Version: 13\r\n\r\n";
  if (::send(fd, req.data(), req.size(), MSG_NOSIGNAL) != static_cast<ssize_t>(req.size())) {
    throw ProtocolError("handshake send failed");
  }
  std::string head;
  char c;
  while (head.find("\r\n\r\n") == std::string::npos) {
    if (::recv(fd, &c, 1, 0) != 1) throw ProtocolError("connection closed during handshake");
    head.push_back(c);
  }
  if (head.rfind("HTTP/1.1 101", 0) != 0) throw ProtocolError("upgrade refused: " + head);
  if (head.find(accept_key(key)) == std::string::npos) throw ProtocolError("bad accept key");
  return head;
}

}  // namespace walk3lp::ws
