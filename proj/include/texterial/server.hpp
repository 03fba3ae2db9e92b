#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "texterial/config.hpp"
#include "texterial/session.hpp"

namespace texterial {

enum class ClockMode { Wall, Scripted };

ClockMode clock_mode_from_string(std::string_view name);

/// HTTP status for an engine error.
int http_status(ErrorCode code);

/// One server-sent event, already framed.
struct StreamEvent {
  std::string name;
  Json data;

  std::string frame() const;
};

/// Per-session fan-out. Subscribers drain their own queue.
class EventBus {
 public:
  class Subscription {
   public:
    /// Next event, or nullopt on timeout or once the bus is closed.
    std::optional<StreamEvent> next(std::chrono::milliseconds timeout);
    bool closed() const;

   private:
    friend class EventBus;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<StreamEvent> queue_;
    bool closed_ = false;
  };

  std::shared_ptr<Subscription> subscribe();
  void unsubscribe(const std::shared_ptr<Subscription>& sub);
  void publish(const StreamEvent& event);
  void close();
  std::size_t subscribers() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  bool closed_ = false;
};

/// Fixed-size worker pool for the model-call half of operations.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t threads);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(std::function<void()> job);
  /// Blocks until every submitted job has finished.
  void drain();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> jobs_;
  std::size_t running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "texterial-data";
  ClockMode clock = ClockMode::Wall;
  EngineConfig config;
  /// Wall-clock mode only: how often due ferns are checked.
  std::int64_t tick_interval_ms = 250;
  std::size_t workers = 4;
};

/// Sessions of one server, with their clocks, event buses, and files.
class SessionHub {
 public:
  struct Entry {
    std::shared_ptr<Session> session;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<ScriptedClock> scripted;  // null in wall mode
    std::shared_ptr<EventBus> bus;
    /// Set on removal so late commits stop touching the data directory.
    std::shared_ptr<std::atomic<bool>> removed = std::make_shared<std::atomic<bool>>(false);
  };

  struct TickOutcome {
    std::vector<std::string> operation_ids;
    std::vector<OpResult> results;  // filled only when waiting
  };

  SessionHub(ServerOptions options, std::shared_ptr<Provider> provider);
  ~SessionHub();

  /// Resumes every session file found in the data directory.
  std::size_t load_existing();

  std::shared_ptr<Entry> create(std::optional<std::string> writing_context);
  /// Throws UnknownSession.
  std::shared_ptr<Entry> get(const std::string& id) const;
  void remove(const std::string& id);
  std::vector<std::string> ids() const;

  /// Runs the op, on a worker unless it is already done, and publishes its
  /// outcome. With `wait`, returns the outcome once it exists.
  std::optional<OpResult> submit(const std::shared_ptr<Entry>& entry, PendingOp op, bool wait);

  /// Grows every due fern of every session.
  void tick_all();
  TickOutcome tick(const std::shared_ptr<Entry>& entry, bool wait);

  void publish(const Entry& entry, const OpResult& result);
  void shutdown();

  const ServerOptions& options() const { return options_; }
  std::filesystem::path session_path(const std::string& id) const;
  std::filesystem::path seed_path(const std::string& id) const;
  std::filesystem::path trace_path(const std::string& id) const;
  std::filesystem::path log_path(const std::string& id) const;

 private:
  std::shared_ptr<Entry> open(const std::string& id, const SessionState& state);

  ServerOptions options_;
  std::shared_ptr<Gateway> gateway_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  WorkerPool pool_;
};

/// The HTTP front end. Routes:
///   POST   /sessions                      {writing_context?}
///   GET    /sessions
///   GET    /sessions/{id}
///   DELETE /sessions/{id}
///   POST   /sessions/{id}/gestures        GestureEvent; 202 {operation_id}, ?wait=1 for the outcome
///   POST   /sessions/{id}/blocks          {text, x?, y?, origin?}
///   POST   /sessions/{id}/undo | /redo
///   POST   /sessions/{id}/clock           {advance_ms | set_ms}; scripted clock only
///   GET    /sessions/{id}/events          server-sent events
///   GET    /sessions/{id}/trace           JSONL
///   GET    /sessions/{id}/prompts
///   GET    /health
class Server {
 public:
  explicit Server(ServerOptions options, std::shared_ptr<Provider> provider = nullptr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the socket; port 0 picks a free one. Returns the bound port.
  int bind();
  /// Serves until stop(). Calls bind() first if needed.
  void run();
  /// run() on a background thread; returns once the socket is listening.
  void start();
  void stop();

  int port() const { return port_; }
  SessionHub& hub() { return *hub_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<SessionHub> hub_;
  int port_ = 0;
  std::thread thread_;
  std::thread ticker_;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
};

}  // namespace texterial
