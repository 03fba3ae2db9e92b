#include "texterial/server.hpp"

#include <algorithm>
#include <future>
#include <iostream>
#include <random>

#include <httplib.h>

#include "texterial/error.hpp"
#include "texterial/persistence.hpp"

namespace texterial {

namespace fs = std::filesystem;

ClockMode clock_mode_from_string(std::string_view name) {
  if (name == "wall") return ClockMode::Wall;
  if (name == "scripted") return ClockMode::Scripted;
  throw Error(ErrorCode::InvalidArgument, "clock must be wall or scripted, got '" + std::string(name) + "'");
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::Busy:
    case ErrorCode::NothingToUndo:
    case ErrorCode::NothingToRedo:
    case ErrorCode::InvalidState:
      return 409;
    case ErrorCode::ProviderTimeout:
    case ErrorCode::ProviderError:
    case ErrorCode::EmptyCompletion:
    case ErrorCode::MalformedJson:
    case ErrorCode::LengthViolation:
    case ErrorCode::CardinalityViolation:
      return 503;
    case ErrorCode::IoError:
    case ErrorCode::CorruptFile:
      return 500;
    default:
      return 400;
  }
}

std::string StreamEvent::frame() const { return "event: " + name + "\ndata: " + data.dump() + "\n\n"; }

// --- EventBus ------------------------------------------------------------------

std::optional<StreamEvent> EventBus::Subscription::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [this] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  StreamEvent ev = std::move(queue_.front());
  queue_.pop_front();
  return ev;
}

bool EventBus::Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_ && queue_.empty();
}

std::shared_ptr<EventBus::Subscription> EventBus::subscribe() {
  auto sub = std::make_shared<Subscription>();
  std::lock_guard lock(mu_);
  sub->closed_ = closed_;
  subs_.push_back(sub);
  return sub;
}

void EventBus::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  std::lock_guard lock(mu_);
  subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
}

void EventBus::publish(const StreamEvent& event) {
  std::lock_guard lock(mu_);
  for (const auto& sub : subs_) {
    {
      std::lock_guard sl(sub->mu_);
      sub->queue_.push_back(event);
    }
    sub->cv_.notify_all();
  }
}

void EventBus::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  for (const auto& sub : subs_) {
    {
      std::lock_guard sl(sub->mu_);
      sub->closed_ = true;
    }
    sub->cv_.notify_all();
  }
}

std::size_t EventBus::subscribers() const {
  std::lock_guard lock(mu_);
  return subs_.size();
}

// --- WorkerPool -----------------------------------------------------------------

WorkerPool::WorkerPool(std::size_t threads) {
  for (std::size_t i = 0; i < std::max<std::size_t>(threads, 1); ++i) {
    threads_.emplace_back([this] {
      for (;;) {
        std::function<void()> job;
        {
          std::unique_lock lock(mu_);
          cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
          if (jobs_.empty()) return;
          job = std::move(jobs_.front());
          jobs_.pop_front();
          ++running_;
        }
        try {
          job();
        } catch (const std::exception& e) {
          std::cerr << "texterial: worker job failed: " << e.what() << "\n";
        }
        {
          std::lock_guard lock(mu_);
          --running_;
        }
        idle_cv_.notify_all();
      }
    });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::submit(std::function<void()> job) {
  {
    std::lock_guard lock(mu_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
}

void WorkerPool::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return jobs_.empty() && running_ == 0; });
}

// --- SessionHub -----------------------------------------------------------------

namespace {

std::string new_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id = "s";
  std::uint64_t bits = rng();
  for (int i = 0; i < 12; ++i, bits >>= 4) id += kHex[bits & 0xf];
  return id;
}

Json result_json(const OpResult& r) {
  Json j{{"operation_id", r.operation_id}, {"ok", r.ok}, {"event", r.event}, {"data", r.data}};
  if (r.hash) j["hash"] = *r.hash;
  if (r.error) j["error"] = to_string(*r.error);
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

constexpr std::string_view kSessionSuffix = ".session.json";

}  // namespace

SessionHub::SessionHub(ServerOptions options, std::shared_ptr<Provider> provider)
    : options_(std::move(options)), pool_(options_.workers) {
  if (!provider) provider = make_provider(options_.config);
  gateway_ = std::make_shared<Gateway>(std::move(provider), options_.config.gateway);
  std::error_code ec;
  fs::create_directories(options_.data_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + options_.data_dir.string() + ": " + ec.message());
}

SessionHub::~SessionHub() { shutdown(); }

fs::path SessionHub::session_path(const std::string& id) const {
  return options_.data_dir / (id + std::string(kSessionSuffix));
}
fs::path SessionHub::seed_path(const std::string& id) const { return options_.data_dir / (id + ".seed.json"); }
fs::path SessionHub::trace_path(const std::string& id) const { return options_.data_dir / (id + ".trace.jsonl"); }
fs::path SessionHub::log_path(const std::string& id) const { return options_.data_dir / (id + ".log.jsonl"); }

std::shared_ptr<SessionHub::Entry> SessionHub::open(const std::string& id, const SessionState& state) {
  auto entry = std::make_shared<Entry>();
  if (options_.clock == ClockMode::Scripted) {
    entry->scripted = std::make_shared<ScriptedClock>(state.clock_ms);
    entry->clock = entry->scripted;
  } else {
    entry->clock = std::make_shared<WallClock>(state.clock_ms);
  }
  entry->bus = std::make_shared<EventBus>();
  entry->session = std::make_shared<Session>(id, state, gateway_, options_.config, entry->clock);

  // Both listeners run under the session lock, so file writes never interleave.
  const fs::path session_file = session_path(id);
  const fs::path trace_file = trace_path(id);
  const fs::path log_file = log_path(id);
  auto removed = entry->removed;
  entry->session->set_commit_listener([=](const SessionState& s, const TraceRecord& rec) {
    if (*removed) return;
    try {
      save_session(session_file, s);
      append_line(trace_file, canonical_dump(to_json(rec)));
    } catch (const Error& e) {
      std::cerr << "texterial: " << id << ": " << e.what() << "\n";
    }
  });
  entry->session->set_log_listener([=](const InteractionLogEntry& e) {
    if (*removed) return;
    try {
      append_line(log_file, canonical_dump(to_json(e)));
    } catch (const Error& err) {
      std::cerr << "texterial: " << id << ": " << err.what() << "\n";
    }
  });

  std::lock_guard lock(mu_);
  sessions_[id] = entry;
  return entry;
}

std::size_t SessionHub::load_existing() {
  std::size_t count = 0;
  for (const auto& item : fs::directory_iterator(options_.data_dir)) {
    const std::string name = item.path().filename().string();
    if (name.size() <= kSessionSuffix.size() || name.compare(name.size() - kSessionSuffix.size(), kSessionSuffix.size(),
                                                             kSessionSuffix) != 0) {
      continue;
    }
    const std::string id = name.substr(0, name.size() - kSessionSuffix.size());
    try {
      open(id, load_session(item.path()));
      ++count;
    } catch (const Error& e) {
      std::cerr << "texterial: skipping " << item.path() << ": " << e.what() << "\n";
    }
  }
  return count;
}

std::shared_ptr<SessionHub::Entry> SessionHub::create(std::optional<std::string> writing_context) {
  SessionState state;
  if (writing_context && !is_blank(*writing_context)) state.writing_context = trim(*writing_context);
  std::string id;
  {
    std::lock_guard lock(mu_);
    do {
      id = new_session_id();
    } while (sessions_.count(id) != 0 || fs::exists(session_path(id)));
  }
  save_session(seed_path(id), state);
  save_session(session_path(id), state);
  return open(id, state);
}

std::shared_ptr<SessionHub::Entry> SessionHub::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, id);
  return it->second;
}

void SessionHub::remove(const std::string& id) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, id);
    entry = it->second;
    sessions_.erase(it);
  }
  *entry->removed = true;
  entry->bus->close();
  // The trace and interaction log stay behind as the audit record.
  std::error_code ec;
  fs::remove(session_path(id), ec);
  fs::remove(seed_path(id), ec);
}

std::vector<std::string> SessionHub::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

void SessionHub::publish(const Entry& entry, const OpResult& result) {
  if (result.event.empty()) return;
  Json data = result.data;
  data["operation_id"] = result.operation_id;
  if (result.hash) data["hash"] = *result.hash;
  entry.bus->publish({result.event, data});
}

std::optional<OpResult> SessionHub::submit(const std::shared_ptr<Entry>& entry, PendingOp op, bool wait) {
  if (op.done) {
    publish(*entry, *op.done);
    return op.done;
  }
  auto shared = std::make_shared<PendingOp>(std::move(op));
  auto promise = wait ? std::make_shared<std::promise<OpResult>>() : nullptr;
  std::future<OpResult> future;
  if (promise) future = promise->get_future();
  pool_.submit([this, entry, shared, promise] {
    if (shared->work) shared->work();
    OpResult r = shared->finish();
    publish(*entry, r);
    if (promise) promise->set_value(std::move(r));
  });
  if (!wait) return std::nullopt;
  return future.get();
}

SessionHub::TickOutcome SessionHub::tick(const std::shared_ptr<Entry>& entry, bool wait) {
  TickOutcome out;
  for (auto& op : entry->session->begin_tick()) {
    out.operation_ids.push_back(op.id);
    if (wait) {
      out.results.push_back(*submit(entry, std::move(op), true));
    } else {
      submit(entry, std::move(op), false);
    }
  }
  return out;
}

void SessionHub::tick_all() {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::lock_guard lock(mu_);
    for (const auto& [_, e] : sessions_) entries.push_back(e);
  }
  for (const auto& e : entries) {
    try {
      tick(e, false);
    } catch (const Error& err) {
      std::cerr << "texterial: tick " << e->session->id() << ": " << err.what() << "\n";
    }
  }
}

void SessionHub::shutdown() {
  pool_.drain();
  std::lock_guard lock(mu_);
  for (const auto& [_, e] : sessions_) e->bus->close();
}

// --- Server ---------------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status(code), {{"error", to_string(code)}, {"message", message}});
}

Json body_json(const httplib::Request& req) {
  if (trim(req.body).empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

bool wants_wait(const httplib::Request& req) {
  return req.has_param("wait") && req.get_param_value("wait") != "0" && req.get_param_value("wait") != "false";
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const Json::exception& e) {
      send_error(res, ErrorCode::InvalidArgument, e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

void send_result(httplib::Response& res, const std::optional<OpResult>& result, const std::string& op_id) {
  if (!result) {
    send_json(res, 202, {{"operation_id", op_id}});
    return;
  }
  const int status = result->ok ? 200 : http_status(result->error.value_or(ErrorCode::InvalidState));
  send_json(res, status, result_json(*result));
}

}  // namespace

struct Server::Impl {
  httplib::Server http;
  bool bound = false;
};

Server::Server(ServerOptions options, std::shared_ptr<Provider> provider) : impl_(std::make_unique<Impl>()) {
  hub_ = std::make_unique<SessionHub>(std::move(options), std::move(provider));
  hub_->load_existing();
  auto& http = impl_->http;
  SessionHub& hub = *hub_;
  http.new_task_queue = [] { return new httplib::ThreadPool(16); };

  http.Get("/health", guarded([&hub](const httplib::Request&, httplib::Response& res) {
             send_json(res, 200, {{"ok", true}, {"sessions", hub.ids().size()}});
           }));

  http.Post("/sessions", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
              const Json body = body_json(req);
              std::optional<std::string> context;
              if (body.contains("writing_context") && !body.at("writing_context").is_null()) {
                context = body.at("writing_context").get<std::string>();
              }
              auto entry = hub.create(context);
              send_json(res, 201, entry->session->view());
            }));

  http.Get("/sessions", guarded([&hub](const httplib::Request&, httplib::Response& res) {
             send_json(res, 200, {{"sessions", hub.ids()}});
           }));

  static const std::string kId = "/sessions/([A-Za-z0-9_-]+)";

  http.Get(kId, guarded([&hub](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, hub.get(req.matches[1])->session->view());
           }));

  http.Delete(kId, guarded([&hub](const httplib::Request& req, httplib::Response& res) {
                hub.remove(req.matches[1]);
                res.status = 204;
              }));

  http.Post(kId + "/gestures", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
              auto entry = hub.get(req.matches[1]);
              const GestureEvent event = gesture_from_json(body_json(req));
              PendingOp op = entry->session->begin_gesture(event);
              const std::string id = op.id;
              send_result(res, hub.submit(entry, std::move(op), wants_wait(req)), id);
            }));

  http.Post(kId + "/blocks", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
              auto entry = hub.get(req.matches[1]);
              const Json body = body_json(req);
              std::optional<Point> at;
              if (body.contains("x") || body.contains("y")) at = Point{body.at("x").get<double>(), body.at("y").get<double>()};
              const BlockOrigin origin = block_origin_from_string(body.value("origin", std::string("Manual")));
              PendingOp op = entry->session->begin_add_block(body.at("text").get<std::string>(), at, origin);
              const std::string id = op.id;
              auto result = hub.submit(entry, std::move(op), true);
              send_result(res, result, id);
              if (result && result->ok) res.status = 201;
            }));

  for (const std::string verb : {"undo", "redo"}) {
    http.Post(kId + "/" + verb, guarded([&hub, verb](const httplib::Request& req, httplib::Response& res) {
                auto entry = hub.get(req.matches[1]);
                auto& session = *entry->session;
                if (verb == "undo") {
                  session.undo();
                } else {
                  session.redo();
                }
                const Json body{{"operation", verb},
                                {"hash", session.hash()},
                                {"sequence", session.sequence()},
                                {"can_undo", session.can_undo()},
                                {"can_redo", session.can_redo()}};
                entry->bus->publish({"op_completed", body});
                send_json(res, 200, body);
              }));
  }

  http.Post(kId + "/clock", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
              auto entry = hub.get(req.matches[1]);
              if (!entry->scripted) throw Error(ErrorCode::InvalidState, "the server runs on the wall clock");
              const Json body = body_json(req);
              if (body.contains("set_ms")) {
                const auto target = body.at("set_ms").get<std::int64_t>();
                if (target < entry->scripted->now_ms()) throw Error(ErrorCode::InvalidArgument, "time cannot go back");
                entry->scripted->set(target);
              } else if (body.contains("advance_ms")) {
                const auto delta = body.at("advance_ms").get<std::int64_t>();
                if (delta < 0) throw Error(ErrorCode::InvalidArgument, "advance_ms must be non-negative");
                entry->scripted->advance(delta);
              }
              const auto outcome = hub.tick(entry, wants_wait(req));
              Json results = Json::array();
              for (const auto& r : outcome.results) results.push_back(result_json(r));
              send_json(res, 200,
                        {{"now_ms", entry->clock->now_ms()}, {"operations", outcome.operation_ids}, {"results", results}});
            }));

  http.Get(kId + "/trace", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
             auto entry = hub.get(req.matches[1]);
             res.set_content(trace_jsonl(entry->session->trace()), "application/x-ndjson");
           }));

  http.Get(kId + "/prompts", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
             auto entry = hub.get(req.matches[1]);
             Json out = Json::array();
             for (const auto& p : entry->session->prompt_log()) {
               out.push_back({{"index", p.index}, {"t", p.t}, {"template", to_string(p.tmpl)}, {"target", p.target},
                              {"prompt", p.prompt}});
             }
             send_json(res, 200, {{"prompts", out}});
           }));

  http.Get(kId + "/events", guarded([&hub](const httplib::Request& req, httplib::Response& res) {
             auto entry = hub.get(req.matches[1]);
             auto bus = entry->bus;
             auto sub = bus->subscribe();
             const Json hello{{"session_id", entry->session->id()},
                              {"hash", entry->session->hash()},
                              {"sequence", entry->session->sequence()}};
             auto greeted = std::make_shared<bool>(false);
             auto last_write = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());
             res.set_header("Cache-Control", "no-cache");
             res.set_chunked_content_provider(
                 "text/event-stream",
                 [sub, hello, greeted, last_write](std::size_t, httplib::DataSink& sink) {
                   if (!*greeted) {
                     *greeted = true;
                     const std::string frame = StreamEvent{"ready", hello}.frame();
                     return sink.write(frame.data(), frame.size());
                   }
                   if (auto ev = sub->next(std::chrono::milliseconds(200))) {
                     const std::string frame = ev->frame();
                     *last_write = std::chrono::steady_clock::now();
                     return sink.write(frame.data(), frame.size());
                   }
                   if (sub->closed()) {
                     sink.done();
                     return true;
                   }
                   if (std::chrono::steady_clock::now() - *last_write > std::chrono::seconds(15)) {
                     *last_write = std::chrono::steady_clock::now();
                     static constexpr std::string_view kKeepAlive = ": keepalive\n\n";
                     return sink.write(kKeepAlive.data(), kKeepAlive.size());
                   }
                   return sink.is_writable();
                 },
                 [bus, sub](bool) { bus->unsubscribe(sub); });
           }));
}

Server::~Server() { stop(); }

int Server::bind() {
  if (impl_->bound) return port_;
  const auto& opts = hub_->options();
  if (opts.port == 0) {
    port_ = impl_->http.bind_to_any_port(opts.host);
  } else {
    port_ = impl_->http.bind_to_port(opts.host, opts.port) ? opts.port : -1;
  }
  if (port_ < 0) throw Error(ErrorCode::IoError, "cannot bind " + opts.host + ":" + std::to_string(opts.port));
  impl_->bound = true;
  if (opts.clock == ClockMode::Wall) {
    ticker_ = std::thread([this, interval = opts.tick_interval_ms] {
      std::unique_lock lock(stop_mu_);
      while (!stop_cv_.wait_for(lock, std::chrono::milliseconds(interval), [this] { return stopping_; })) {
        lock.unlock();
        hub_->tick_all();
        lock.lock();
      }
    });
  }
  return port_;
}

void Server::run() {
  bind();
  impl_->http.listen_after_bind();
}

void Server::start() {
  bind();
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void Server::stop() {
  {
    std::lock_guard lock(stop_mu_);
    if (stopping_) return;
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (ticker_.joinable()) ticker_.join();
  hub_->shutdown();
  impl_->http.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace texterial
