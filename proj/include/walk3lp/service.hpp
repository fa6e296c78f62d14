#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "walk3lp/scenario.hpp"
#include "walk3lp/sim.hpp"

namespace walk3lp {

struct SessionDefaults {
  BodyModel body;
  GaitConfig config;
  SimOptions options;
  double fps = 30;

  /// 70 kg, 1.7 m adult at 1 m/s, 1.7 steps/s, 20 % double support.
  static SessionDefaults standard();
};

/// Protocol state of one session, independent of the transport. Inbound
/// commands act at the next frame boundary through the same FrameDriver path
/// as CLI scenarios.
class SessionCore {
 public:
  static constexpr double kMaxPushForce = 500;    // N
  static constexpr double kMaxPushDuration = 5;   // s
  static constexpr double kMinFps = 1;
  static constexpr double kMaxFps = 120;

  explicit SessionCore(SessionDefaults defaults = SessionDefaults::standard());

  std::string bounds_message() const;
  /// Replies to one inbound message: "ack" or "error", preceded by a fresh
  /// "bounds" after a reset. Never throws on bad input.
  std::vector<std::string> handle(const std::string& message);
  /// Samples the next frame and returns its "frame" message.
  std::string next_frame();

  double next_time() const { return driver_->next_time(); }
  double fps() const { return driver_->fps(); }
  const Simulation& sim() const { return *sim_; }

 private:
  void reset(const BodyModel& body, const GaitConfig& config);

  SessionDefaults defaults_;
  std::unique_ptr<Simulation> sim_;
  std::unique_ptr<FrameDriver> driver_;
};

std::string frame_message(const Frame& frame);

/// Single-slot mailbox for outbound frames plus an ordered queue for control
/// replies. A frame overwrites any frame not yet taken.
class Outbox {
 public:
  void put_frame(std::string frame);
  void put_control(std::string message);
  /// Blocks until a message is available or the box is closed. Control
  /// messages go first.
  std::optional<std::string> take();
  void close();
  long frames_dropped() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> control_;
  std::optional<std::string> frame_;
  long dropped_ = 0;
  bool closed_ = false;
};

struct ServiceOptions {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  SessionDefaults defaults = SessionDefaults::standard();
};

/// WebSocket endpoint: each connection runs one SessionCore in wall-clock
/// time. Plain "GET /healthz" answers 200.
class Server {
 public:
  explicit Server(ServiceOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting; throws std::runtime_error if the port is taken.
  void start();
  void stop();
  int port() const { return port_; }
  long sessions_started() const { return sessions_started_; }

 private:
  void accept_loop();
  void handle_client(int fd);
  void run_session(int fd, std::string pending);

  ServiceOptions options_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<long> sessions_started_{0};
  std::thread acceptor_;
  std::mutex clients_mutex_;
  std::list<std::thread> clients_;
  std::vector<int> client_fds_;
};

}  // namespace walk3lp
