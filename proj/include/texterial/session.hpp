#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "texterial/clock.hpp"
#include "texterial/config.hpp"
#include "texterial/diff.hpp"
#include "texterial/gateway.hpp"
#include "texterial/state.hpp"

namespace texterial {

struct PromptLogEntry {
  std::uint64_t index = 0;
  std::int64_t t = 0;
  PromptTemplate tmpl = PromptTemplate::Squeeze;
  std::string target;
  std::string prompt;
};

struct InteractionLogEntry {
  std::int64_t t = 0;
  std::string session_id;
  std::string event_kind;
  std::string target;
  std::string outcome;  // "ok", "ignored", or an error code name
  std::int64_t latency_ms = 0;
};

Json to_json(const InteractionLogEntry& entry);

/// One committed change. `event` is one of
///   {"type":"gesture","gesture":{...}}
///   {"type":"add_block","text":..,"x":..,"y":..,"origin":..}
///   {"type":"grow","fern":id}
///   {"type":"tick"}            (hand-written traces; grows every due fern)
///   {"type":"undo"} / {"type":"redo"}
struct TraceRecord {
  std::int64_t t = 0;
  Json event;
  std::optional<std::string> expected_hash;
};

Json to_json(const TraceRecord& record);
/// Throws ParseError.
TraceRecord trace_record_from_json(const Json& j);

/// Outcome of one operation, shaped for the event stream.
struct OpResult {
  std::string operation_id;
  bool ok = true;
  /// "op_completed", "fern_grown", "op_failed", or empty when nothing changed.
  std::string event;
  Json data = Json::object();
  std::optional<ErrorCode> error;
  std::string message;
  std::optional<std::string> hash;
};

/// An accepted operation. `work` performs the model call without touching the
/// session; `finish` commits or rolls back under the session lock. Operations
/// without a model call are already committed and carry `done`.
struct PendingOp {
  std::string id;
  std::function<void()> work;
  std::function<OpResult()> finish;
  std::optional<OpResult> done;
};

/// One clay-and-garden session. Every mutation is serialized through the
/// session mutex; model calls run outside it between begin and finish.
class Session {
 public:
  using CommitListener = std::function<void(const SessionState&, const TraceRecord&)>;

  Session(std::string id, SessionState initial, std::shared_ptr<Gateway> gateway, EngineConfig config,
          std::shared_ptr<Clock> clock);

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  const EngineConfig& config() const { return config_; }
  Clock& clock() const { return *clock_; }

  // --- accepting work (throws on validation failure, nothing changes) -------

  PendingOp begin_gesture(const GestureEvent& event);
  PendingOp begin_add_block(const std::string& text, std::optional<Point> position, BlockOrigin origin);
  PendingOp begin_grow(const std::string& fern_id);
  /// Growth operations for every fern that is due, idle, and not backing off.
  std::vector<PendingOp> begin_tick();

  /// Runs the op to completion on the calling thread.
  OpResult run(PendingOp& op);

  // --- synchronous conveniences ---------------------------------------------

  OpResult apply(const GestureEvent& event);
  TextBlock add_block(const std::string& text, std::optional<Point> position = std::nullopt,
                      BlockOrigin origin = BlockOrigin::Manual);
  std::vector<OpResult> tick();
  OpResult grow(const std::string& fern_id);
  /// Throws NothingToUndo, or Busy while any operation is in flight.
  void undo();
  void redo();

  // --- read side --------------------------------------------------------------

  SessionState state() const;
  std::string hash() const;
  /// Number of committed snapshots behind the current one.
  std::size_t sequence() const;
  bool can_undo() const;
  bool can_redo() const;
  std::set<std::string> busy() const;
  std::size_t in_flight() const;
  /// State plus busy flags, sequence, hash, and derived leaf positions.
  Json view() const;

  std::vector<TraceRecord> trace() const;
  std::vector<PromptLogEntry> prompt_log() const;
  std::vector<InteractionLogEntry> interaction_log() const;

  /// Called under the session lock after every commit (persistence hook).
  void set_commit_listener(CommitListener listener);
  /// Called for every interaction log entry (append-only log files).
  void set_log_listener(std::function<void(const InteractionLogEntry&)> listener);

 private:
  struct AsyncSpec {
    std::string op_id;
    std::vector<std::string> busy_keys;
    Json trace_event;
    std::int64_t started_at = 0;
    std::int64_t wall_start_ms = 0;
    std::string event_kind;
    std::string target;
    /// Fern to back off when the model call fails.
    std::optional<std::string> backoff_key;
  };

  // Lock held by the caller for everything below.
  std::string next_op_id();
  void require_idle(const std::string& key) const;
  std::int64_t commit_time(std::int64_t started_at) const;
  std::string commit(SessionState next, const Json& trace_event, std::int64_t t);
  void log_interaction(const AsyncSpec& spec, const std::string& outcome);
  void log_prompt(std::int64_t t, PromptTemplate tmpl, const std::string& target, const std::string& prompt);
  AsyncSpec spec(const std::string& event_kind, const std::string& target, Json trace_event);
  PendingOp sync_result(const AsyncSpec& spec, OpResult result);
  PendingOp ignored(const AsyncSpec& spec, const std::string& reason);
  OpResult failure(const AsyncSpec& spec, ErrorCode code, const std::string& message);

  /// Marks busy keys and returns an op whose work runs `call` and whose finish
  /// runs `apply` on a copy of the state before committing it.
  template <typename R>
  PendingOp async_op(AsyncSpec spec, std::function<R()> call,
                     std::function<OpResult(SessionState&, R&, std::int64_t)> apply);

  PendingOp dispatch(const GestureEvent& event, AsyncSpec spec);
  PendingOp add_block_locked(const std::string& text, std::optional<Point> position, BlockOrigin origin,
                             AsyncSpec spec);
  PendingOp grow_locked(const std::string& fern_id, AsyncSpec spec);
  void undo_locked();
  void redo_locked();

  // Clay (clay.cpp)
  std::string resolve_block(const GestureEvent& event) const;
  PendingOp clay_edit(const GestureEvent& event, AsyncSpec spec);
  PendingOp drag_block(const GestureEvent& event, AsyncSpec spec);
  PendingOp rip(const GestureEvent& event, AsyncSpec spec);

  // Garden (garden.cpp)
  PendingOp plant(const GestureEvent& event, AsyncSpec spec);
  PendingOp water(const GestureEvent& event, AsyncSpec spec);
  PendingOp prune(const GestureEvent& event, AsyncSpec spec);
  PendingOp preserve(const GestureEvent& event, AsyncSpec spec);
  PendingOp edit_leaf(const GestureEvent& event, AsyncSpec spec);
  PendingOp drop_leaf(const GestureEvent& event, AsyncSpec spec);
  void require_fern_idle(const std::string& fern_id) const;
  void require_leaf_idle(const Leaf& leaf) const;

  std::string id_;
  EngineConfig config_;
  std::shared_ptr<Gateway> gateway_;
  std::shared_ptr<Clock> clock_;

  mutable std::mutex mu_;
  SessionState current_;
  std::vector<SessionState> undo_;
  std::vector<SessionState> redo_;
  std::set<std::string> busy_;
  std::map<std::string, std::int64_t> retry_after_;
  std::size_t in_flight_ = 0;
  std::int64_t last_trace_t_ = 0;
  std::uint64_t next_op_ = 1;
  std::vector<TraceRecord> trace_;
  std::vector<PromptLogEntry> prompts_;
  std::vector<InteractionLogEntry> interactions_;
  CommitListener commit_listener_;
  std::function<void(const InteractionLogEntry&)> log_listener_;
};

/// Block size for `text` wrapped at `width`.
Size block_size(std::string_view text, double width, const GeometryConfig& config);

/// Headless leaf placement: alternating sides up the frond, one row per checkpoint.
Point leaf_position(const Fern& fern, std::size_t checkpoint_index, int side);

}  // namespace texterial
