#include "walk3lp/service.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>

#include "json.hpp"
#include "walk3lp/frame_io.hpp"
#include "walk3lp/websocket.hpp"

namespace walk3lp {

using nlohmann::json;

namespace {

std::string reply(const char* type, const std::string& detail) {
  return json{{"type", type}, {"detail", detail}}.dump();
}

double number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("field '") + key + "' must be finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

}  // namespace

SessionDefaults SessionDefaults::standard() {
  SessionDefaults d;
  d.body = scale_body(70, 1.7);
  d.config = GaitConfig::from_frequency(1.7, 0.2, 1.0);
  return d;
}

std::string frame_message(const Frame& frame) {
  // Same payload as a JSONL export line, with the type tag in front.
  return "{\"type\":\"frame\"," + to_json_line(FrameRecord::from_frame(frame)).substr(1);
}

SessionCore::SessionCore(SessionDefaults defaults) : defaults_(std::move(defaults)) {
  reset(defaults_.body, defaults_.config);
  driver_->set_fps(defaults_.fps);
}

void SessionCore::reset(const BodyModel& body, const GaitConfig& config) {
  const double fps = driver_ ? driver_->fps() : defaults_.fps;
  auto sim = std::make_unique<Simulation>(body, config, defaults_.options);
  driver_.reset();
  sim_ = std::move(sim);
  driver_ = std::make_unique<FrameDriver>(*sim_, fps);
}

std::string SessionCore::bounds_message() const {
  json params = json::array();
  for (const ParamRange& r : ParamBounds::kRanges) {
    params.push_back({{"name", r.name},
                      {"min", r.min},
                      {"max", r.max},
                      {"unit", r.unit},
                      {"value", param_value(sim_->target_body(), sim_->target_config(), r.name)}});
  }
  return json{{"type", "bounds"},
              {"parameters", params},
              {"push", {{"max_force", kMaxPushForce}, {"max_duration", kMaxPushDuration}}},
              {"fps", {{"min", kMinFps}, {"max", kMaxFps}, {"value", driver_->fps()}}}}
      .dump();
}

std::vector<std::string> SessionCore::handle(const std::string& message) {
  json j;
  try {
    j = json::parse(message);
  } catch (const json::parse_error& e) {
    return {reply("error", std::string("malformed JSON: ") + e.what())};
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    return {reply("error", "message must be an object with a string 'type'")};
  }
  const std::string type = j["type"];
  try {
    if (type == "set_param") {
      if (!j.contains("name") || !j["name"].is_string()) {
        throw std::invalid_argument("field 'name' must be a string");
      }
      const std::string name = j["name"];
      const double value = number(j, "value");
      BodyModel b = sim_->target_body();
      GaitConfig c = sim_->target_config();
      apply_param(b, c, name, value);
      c.validate();
      ParamBounds::check(c);
      driver_->schedule(ScenarioEvent::set_param(driver_->next_time(), name, value));
      return {reply("ack", "set_param " + name)};
    }
    if (type == "push") {
      const Vec2 f(number_or(j, "fx", 0), number_or(j, "fy", 0));
      const double duration = number(j, "duration");
      if (f.norm() > kMaxPushForce) throw std::out_of_range("push force above the allowed maximum");
      if (duration < 0 || duration > kMaxPushDuration) {
        throw std::out_of_range("push duration outside [0, " + std::to_string(kMaxPushDuration) + "] s");
      }
      driver_->schedule(ScenarioEvent::push(driver_->next_time(), f, duration));
      return {reply("ack", "push")};
    }
    if (type == "rate") {
      const double fps = number(j, "fps");
      if (fps < kMinFps || fps > kMaxFps) throw std::out_of_range("fps outside the allowed range");
      driver_->set_fps(fps);
      return {reply("ack", "rate")};
    }
    if (type == "reset") {
      BodyModel b = defaults_.body;
      GaitConfig c = defaults_.config;
      if (j.contains("config") && !j["config"].is_null()) {
        if (!j["config"].is_object()) throw std::invalid_argument("'config' must be an object");
        for (const auto& [name, value] : j["config"].items()) {
          if (!value.is_number()) throw std::invalid_argument("config value '" + name + "' must be a number");
          apply_param(b, c, name, value.get<double>());
        }
      }
      c.validate();
      ParamBounds::check(c);
      reset(b, c);
      return {bounds_message(), reply("ack", "reset")};
    }
  } catch (const std::exception& e) {
    return {reply("error", type + ": " + e.what())};
  }
  return {reply("error", "unknown message type '" + type + "'")};
}

std::string SessionCore::next_frame() { return frame_message(driver_->next()); }

void Outbox::put_frame(std::string frame) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (frame_) ++dropped_;
    frame_ = std::move(frame);
  }
  cv_.notify_one();
}

void Outbox::put_control(std::string message) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    control_.push_back(std::move(message));
  }
  cv_.notify_one();
}

std::optional<std::string> Outbox::take() {
  std::unique_lock<std::mutex> lock(mutex_);
  cv_.wait(lock, [&] { return closed_ || !control_.empty() || frame_; });
  if (!control_.empty()) {
    std::string m = std::move(control_.front());
    control_.pop_front();
    return m;
  }
  if (frame_) {
    std::string m = std::move(*frame_);
    frame_.reset();
    return m;
  }
  return std::nullopt;
}

void Outbox::close() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

long Outbox::frames_dropped() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return dropped_;
}

Server::Server(ServiceOptions options) : options_(std::move(options)) {}

Server::~Server() { stop(); }

void Server::start() {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (getaddrinfo(options_.host.c_str(), std::to_string(options_.port).c_str(), &hints, &res) != 0) {
    throw std::runtime_error("cannot resolve " + options_.host);
  }
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int one = 1;
  setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(listen_fd_, res->ai_addr, res->ai_addrlen);
  freeaddrinfo(res);
  if (rc != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on port " + std::to_string(options_.port) + ": " + why);
  }
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::thread> clients;
  {
    std::lock_guard<std::mutex> lock(clients_mutex_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    clients.swap(clients_);
  }
  for (std::thread& t : clients) t.join();
}

void Server::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    std::lock_guard<std::mutex> lock(clients_mutex_);
    client_fds_.push_back(fd);
    clients_.emplace_back([this, fd] {
      handle_client(fd);
      std::lock_guard<std::mutex> inner(clients_mutex_);
      std::erase(client_fds_, fd);
    });
  }
}

void Server::handle_client(int fd) {
  std::string buf;
  std::optional<ws::HttpRequest> req;
  char chunk[2048];
  try {
    while (!(req = ws::parse_http_request(buf))) {
      const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0 || buf.size() > 16384) {
        ::close(fd);
        return;
      }
      buf.append(chunk, static_cast<std::size_t>(n));
    }
  } catch (const ws::ProtocolError&) {
    const std::string r = "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";
    ::send(fd, r.data(), r.size(), MSG_NOSIGNAL);
    ::close(fd);
    return;
  }
  const std::string rest = buf.substr(buf.find("\r\n\r\n") + 4);
  auto respond = [fd](const std::string& status, const std::string& body) {
    const std::string r = "HTTP/1.1 " + status + "\r\nContent-Type: text/plain\r\nContent-Length: " +
                          std::to_string(body.size()) + "\r\nConnection: close\r\n\r\n" + body;
    ::send(fd, r.data(), r.size(), MSG_NOSIGNAL);
    ::close(fd);
  };
  if (req->method != "GET") return respond("405 Method Not Allowed", "");
  const std::string key = req->header("sec-websocket-key");
  std::string upgrade = req->header("upgrade");
  for (char& c : upgrade) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (upgrade == "websocket" && !key.empty()) {
    const std::string r = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\n"
                          "Connection: Upgrade\r\nSec-WebSocket-Accept: " + ws::accept_key(key) + "\r\n\r\n";
    if (::send(fd, r.data(), r.size(), MSG_NOSIGNAL) != static_cast<ssize_t>(r.size())) {
      ::close(fd);
      return;
    }
    run_session(fd, rest);
    return;
  }
  if (req->path == "/healthz") return respond("200 OK", "ok\n");
  respond("404 Not Found", "");
}

void Server::run_session(int fd, std::string pending) {
  ++sessions_started_;
  const int one = 1;
  setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  ws::Connection conn(fd, true, std::move(pending));
  SessionCore core(options_.defaults);
  Outbox outbox;

  std::mutex inbox_mutex;
  std::deque<std::string> inbox;
  std::atomic<bool> open{true};
  constexpr std::size_t kMaxInbox = 256;

  std::thread reader([&] {
    while (auto m = conn.receive()) {
      std::lock_guard<std::mutex> lock(inbox_mutex);
      if (inbox.size() >= kMaxInbox) {
        outbox.put_control(json{{"type", "error"}, {"detail", "too many pending commands"}}.dump());
      } else {
        inbox.push_back(std::move(*m));
      }
    }
    open = false;
    outbox.close();
  });
  std::thread sender([&] {
    while (auto m = outbox.take()) {
      if (!conn.send_text(*m)) break;
    }
    open = false;
  });

  using clock = std::chrono::steady_clock;
  outbox.put_control(core.bounds_message());
  auto wall0 = clock::now();
  double sim0 = core.next_time();
  try {
    while (open && running_) {
      std::deque<std::string> commands;
      {
        std::lock_guard<std::mutex> lock(inbox_mutex);
        commands.swap(inbox);
      }
      for (const std::string& c : commands) {
        const double before = core.next_time();
        for (std::string& r : core.handle(c)) outbox.put_control(std::move(r));
        if (core.next_time() < before) {
          // A reset restarts simulation time.
          wall0 = clock::now();
          sim0 = core.next_time();
        }
      }
      const double t = core.next_time();
      std::this_thread::sleep_until(
          wall0 + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(t - sim0)));
      outbox.put_frame(core.next_frame());
    }
  } catch (const std::exception& e) {
    outbox.put_control(json{{"type", "error"}, {"detail", std::string("simulation stopped: ") + e.what()}}.dump());
  }
  outbox.close();
  conn.close();
  reader.join();
  sender.join();
}

}  // namespace walk3lp
