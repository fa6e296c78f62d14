#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace walk3lp::ws {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Opcode : std::uint8_t {
  kContinuation = 0x0,
  kText = 0x1,
  kBinary = 0x2,
  kClose = 0x8,
  kPing = 0x9,
  kPong = 0xA,
};

/// Sec-WebSocket-Accept value for a client key.
std::string accept_key(const std::string& client_key);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string header(const std::string& name) const;
};

/// Parses a request head terminated by an empty line; nothing if incomplete.
std::optional<HttpRequest> parse_http_request(const std::string& head);

struct WireFrame {
  bool fin = true;
  Opcode opcode = Opcode::kText;
  std::string payload;
};

/// Encodes one frame. Clients must mask; servers must not.
std::string encode_frame(Opcode opcode, const std::string& payload, bool fin = true,
                         std::optional<std::uint32_t> mask = std::nullopt);

/// Decodes one frame from the front of `buf`. Returns bytes consumed, or 0 if
/// the buffer does not yet hold a complete frame.
std::size_t decode_frame(const std::string& buf, WireFrame& out, bool require_mask);

/// Blocking message stream over a connected socket. Sends are serialized; one
/// thread may receive while others send.
class Connection {
 public:
  Connection(int fd, bool server_side, std::string pending = {});
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  bool send_text(const std::string& text);
  /// Next complete text message; pings are answered and fragments joined.
  /// Returns nothing once the peer closes or the socket fails.
  std::optional<std::string> receive();
  void close();
  int fd() const { return fd_; }

 private:
  bool send_raw(const std::string& bytes);
  bool fill();

  int fd_;
  bool server_side_;
  std::string buf_;
  std::mutex send_mutex_;
  std::atomic<bool> closed_{false};
};

/// Client-side handshake on a connected socket (used by tests and tools).
/// Throws ProtocolError unless the server switches protocols.
std::string client_handshake(int fd, const std::string& host, const std::string& path);

/// Connects a TCP socket to host:port; throws std::runtime_error on failure.
int connect_tcp(const std::string& host, int port);

}  // namespace walk3lp::ws
