#include "texterial/session.hpp"

#include <algorithm>
#include <chrono>

#include "session_async.hpp"
#include "texterial/error.hpp"

namespace texterial {

namespace {

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Json to_json(const InteractionLogEntry& e) {
  return {{"t", e.t},
          {"session_id", e.session_id},
          {"event_kind", e.event_kind},
          {"target", e.target},
          {"outcome", e.outcome},
          {"latency_ms", e.latency_ms}};
}

Json to_json(const TraceRecord& r) {
  Json j{{"t", r.t}, {"event", r.event}};
  if (r.expected_hash) j["expected_hash"] = *r.expected_hash;
  return j;
}

TraceRecord trace_record_from_json(const Json& j) {
  try {
    TraceRecord r;
    r.t = j.at("t").get<std::int64_t>();
    r.event = j.at("event");
    if (!r.event.is_object() || !r.event.at("type").is_string()) {
      throw Error(ErrorCode::ParseError, "event needs a string 'type'");
    }
    if (j.contains("expected_hash") && !j.at("expected_hash").is_null()) {
      r.expected_hash = j.at("expected_hash").get<std::string>();
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Size block_size(std::string_view text, double width, const GeometryConfig& config) {
  return {width, static_cast<double>(row_count(text, width, config)) * config.cell_h};
}

Point leaf_position(const Fern& fern, std::size_t checkpoint_index, int side) {
  const double dx = side == 0 ? -40.0 : 40.0;
  return {fern.position.x + dx, fern.position.y - 30.0 - 28.0 * static_cast<double>(checkpoint_index)};
}

Session::Session(std::string id, SessionState initial, std::shared_ptr<Gateway> gateway, EngineConfig config,
                 std::shared_ptr<Clock> clock)
    : id_(std::move(id)),
      config_(std::move(config)),
      gateway_(std::move(gateway)),
      clock_(std::move(clock)),
      current_(std::move(initial)) {
  if (!gateway_ || !clock_) throw Error(ErrorCode::InvalidArgument, "session needs a gateway and a clock");
  last_trace_t_ = current_.clock_ms;
}

// ---------------------------------------------------------------------------
// Internal helpers (lock held)
// ---------------------------------------------------------------------------

std::string Session::next_op_id() { return "op" + std::to_string(next_op_++); }

void Session::require_idle(const std::string& key) const {
  if (busy_.count(key) != 0) throw Error(ErrorCode::Busy, key + " has an operation in flight");
}

std::int64_t Session::commit_time(std::int64_t started_at) const { return std::max(started_at, last_trace_t_); }

std::string Session::commit(SessionState next, const Json& trace_event, std::int64_t t) {
  next.clock_ms = t;
  undo_.push_back(std::move(current_));
  current_ = std::move(next);
  redo_.clear();
  last_trace_t_ = t;
  std::string digest = canonical_hash(current_);
  trace_.push_back({t, trace_event, digest});
  if (commit_listener_) commit_listener_(current_, trace_.back());
  return digest;
}

void Session::log_interaction(const AsyncSpec& spec, const std::string& outcome) {
  InteractionLogEntry e{spec.started_at, id_, spec.event_kind, spec.target, outcome, wall_ms() - spec.wall_start_ms};
  interactions_.push_back(e);
  if (log_listener_) log_listener_(e);
}

void Session::log_prompt(std::int64_t t, PromptTemplate tmpl, const std::string& target, const std::string& prompt) {
  prompts_.push_back({prompts_.size(), t, tmpl, target, prompt});
}

Session::AsyncSpec Session::spec(const std::string& event_kind, const std::string& target, Json trace_event) {
  AsyncSpec s;
  s.op_id = next_op_id();
  s.trace_event = std::move(trace_event);
  s.started_at = clock_->now_ms();
  s.wall_start_ms = wall_ms();
  s.event_kind = event_kind;
  s.target = target;
  return s;
}

PendingOp Session::sync_result(const AsyncSpec& spec, OpResult result) {
  result.operation_id = spec.op_id;
  result.data["operation_id"] = spec.op_id;
  log_interaction(spec, result.event.empty() ? "ignored" : "ok");
  PendingOp op;
  op.id = spec.op_id;
  op.done = std::move(result);
  return op;
}

PendingOp Session::ignored(const AsyncSpec& spec, const std::string& reason) {
  OpResult r;
  r.message = reason;
  r.data["ignored"] = reason;
  return sync_result(spec, std::move(r));
}

OpResult Session::failure(const AsyncSpec& spec, ErrorCode code, const std::string& message) {
  log_interaction(spec, std::string(to_string(code)));
  OpResult r;
  r.operation_id = spec.op_id;
  r.ok = false;
  r.event = "op_failed";
  r.error = code;
  r.message = message;
  r.data = {{"operation_id", spec.op_id},
            {"error", to_string(code)},
            {"message", message},
            {"target", spec.target}};
  return r;
}

// ---------------------------------------------------------------------------
// Accepting work
// ---------------------------------------------------------------------------

PendingOp Session::begin_gesture(const GestureEvent& event) {
  std::lock_guard lock(mu_);
  event.validate();
  AsyncSpec s = spec(std::string(to_string(event.kind)), event.target.value_or(""),
                     Json{{"type", "gesture"}, {"gesture", to_json(event)}});
  try {
    return dispatch(event, s);
  } catch (const Error& e) {
    log_interaction(s, std::string(to_string(e.code())));
    throw;
  }
}

PendingOp Session::dispatch(const GestureEvent& event, AsyncSpec s) {
  switch (event.kind) {
    case GestureKind::Press:
    case GestureKind::Pinch:
    case GestureKind::Smudge:
    case GestureKind::Stretch:
    case GestureKind::Squash:
      return clay_edit(event, std::move(s));
    case GestureKind::DragBlock:
      return drag_block(event, std::move(s));
    case GestureKind::Rip:
      return rip(event, std::move(s));
    case GestureKind::VoiceUtterance: {
      std::optional<Point> at;
      if (!event.points.empty()) at = event.points.front().xy();
      return add_block_locked(event.payload.value_or(""), at, BlockOrigin::Voice, std::move(s));
    }
    case GestureKind::WaterLine:
      return water(event, std::move(s));
    case GestureKind::PlantPress:
      return plant(event, std::move(s));
    case GestureKind::PluckLeaf:
      return prune(event, std::move(s));
    case GestureKind::PreserveHold:
      return preserve(event, std::move(s));
    case GestureKind::EditLeaf:
      return edit_leaf(event, std::move(s));
    case GestureKind::DropLeaf:
      return drop_leaf(event, std::move(s));
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled gesture kind");
}

PendingOp Session::begin_add_block(const std::string& text, std::optional<Point> position, BlockOrigin origin) {
  std::lock_guard lock(mu_);
  AsyncSpec s = spec("AddBlock", "", Json::object());
  try {
    return add_block_locked(text, position, origin, s);
  } catch (const Error& e) {
    log_interaction(s, std::string(to_string(e.code())));
    throw;
  }
}

PendingOp Session::add_block_locked(const std::string& text, std::optional<Point> position, BlockOrigin origin,
                                    AsyncSpec s) {
  if (is_blank(text)) throw Error(ErrorCode::BlankInput, "block text is blank");
  SessionState next = current_;
  Point at;
  if (position) {
    at = *position;
  } else {
    // New blocks stack below everything already on the canvas.
    at = {40.0, 40.0};
    for (const auto& [_, b] : next.blocks) at.y = std::max(at.y, b.bounds().bottom() + config_.clay.rip_gap);
  }
  TextBlock block;
  block.id = next.allocate_id('b');
  block.text = text;
  block.position = at;
  block.size = block_size(text, config_.clay.default_block_width, config_.geometry);
  block.origin = origin;
  next.blocks.emplace(block.id, block);

  if (s.trace_event.empty()) {
    s.trace_event = {{"type", "add_block"}, {"text", text}, {"x", at.x}, {"y", at.y}, {"origin", to_string(origin)}};
  }
  s.target = block.id;
  OpResult r;
  r.event = "op_completed";
  r.data = {{"block_id", block.id}, {"block", to_json(block)}};
  r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
  return sync_result(s, std::move(r));
}

PendingOp Session::begin_grow(const std::string& fern_id) {
  std::lock_guard lock(mu_);
  AsyncSpec s = spec("Grow", fern_id, Json{{"type", "grow"}, {"fern", fern_id}});
  try {
    return grow_locked(fern_id, s);
  } catch (const Error& e) {
    log_interaction(s, std::string(to_string(e.code())));
    throw;
  }
}

std::vector<PendingOp> Session::begin_tick() {
  std::lock_guard lock(mu_);
  const std::int64_t now = clock_->now_ms();
  std::vector<PendingOp> ops;
  for (const auto& [id, fern] : current_.ferns) {
    if (fern.next_due_ms > now || busy_.count(id) != 0) continue;
    auto backoff = retry_after_.find(id);
    if (backoff != retry_after_.end() && backoff->second > now) continue;
    ops.push_back(grow_locked(id, spec("Grow", id, Json{{"type", "grow"}, {"fern", id}})));
  }
  return ops;
}

OpResult Session::run(PendingOp& op) {
  if (op.done) return *op.done;
  if (op.work) op.work();
  return op.finish();
}

// ---------------------------------------------------------------------------
// Synchronous conveniences
// ---------------------------------------------------------------------------

OpResult Session::apply(const GestureEvent& event) {
  PendingOp op = begin_gesture(event);
  return run(op);
}

TextBlock Session::add_block(const std::string& text, std::optional<Point> position, BlockOrigin origin) {
  PendingOp op = begin_add_block(text, position, origin);
  const OpResult r = run(op);
  return block_from_json(r.data.at("block"));
}

std::vector<OpResult> Session::tick() {
  std::vector<OpResult> results;
  for (auto& op : begin_tick()) results.push_back(run(op));
  return results;
}

OpResult Session::grow(const std::string& fern_id) {
  PendingOp op = begin_grow(fern_id);
  return run(op);
}

void Session::undo() {
  std::lock_guard lock(mu_);
  undo_locked();
}

void Session::redo() {
  std::lock_guard lock(mu_);
  redo_locked();
}

void Session::undo_locked() {
  AsyncSpec s = spec("Undo", "", Json{{"type", "undo"}});
  if (in_flight_ > 0) {
    log_interaction(s, "Busy");
    throw Error(ErrorCode::Busy, "cannot undo while operations are in flight");
  }
  if (undo_.empty()) {
    log_interaction(s, "NothingToUndo");
    throw Error(ErrorCode::NothingToUndo);
  }
  const std::int64_t t = commit_time(s.started_at);
  redo_.push_back(std::move(current_));
  current_ = std::move(undo_.back());
  undo_.pop_back();
  last_trace_t_ = t;
  trace_.push_back({t, s.trace_event, canonical_hash(current_)});
  if (commit_listener_) commit_listener_(current_, trace_.back());
  log_interaction(s, "ok");
}

void Session::redo_locked() {
  AsyncSpec s = spec("Redo", "", Json{{"type", "redo"}});
  if (in_flight_ > 0) {
    log_interaction(s, "Busy");
    throw Error(ErrorCode::Busy, "cannot redo while operations are in flight");
  }
  if (redo_.empty()) {
    log_interaction(s, "NothingToRedo");
    throw Error(ErrorCode::NothingToRedo);
  }
  const std::int64_t t = commit_time(s.started_at);
  undo_.push_back(std::move(current_));
  current_ = std::move(redo_.back());
  redo_.pop_back();
  last_trace_t_ = t;
  trace_.push_back({t, s.trace_event, canonical_hash(current_)});
  if (commit_listener_) commit_listener_(current_, trace_.back());
  log_interaction(s, "ok");
}

// ---------------------------------------------------------------------------
// Read side
// ---------------------------------------------------------------------------

SessionState Session::state() const {
  std::lock_guard lock(mu_);
  return current_;
}

std::string Session::hash() const {
  std::lock_guard lock(mu_);
  return canonical_hash(current_);
}

std::size_t Session::sequence() const {
  std::lock_guard lock(mu_);
  return undo_.size();
}

bool Session::can_undo() const {
  std::lock_guard lock(mu_);
  return !undo_.empty();
}

bool Session::can_redo() const {
  std::lock_guard lock(mu_);
  return !redo_.empty();
}

std::set<std::string> Session::busy() const {
  std::lock_guard lock(mu_);
  return busy_;
}

std::size_t Session::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

Json Session::view() const {
  std::lock_guard lock(mu_);
  Json state = to_json(current_);
  for (auto& [id, block] : state["blocks"].items()) block["busy"] = busy_.count(id) != 0;
  for (auto& [id, fern] : state["ferns"].items()) fern["busy"] = busy_.count(id) != 0;
  Json positions = Json::object();
  for (const auto& [_, fern] : current_.ferns) {
    for (std::size_t i = 0; i < fern.checkpoints.size(); ++i) {
      const Point a = leaf_position(fern, i, 0);
      const Point b = leaf_position(fern, i, 1);
      positions[fern.checkpoints[i].first] = {{"x", a.x}, {"y", a.y}};
      positions[fern.checkpoints[i].second] = {{"x", b.x}, {"y", b.y}};
    }
  }
  state["leaf_positions"] = positions;
  return {{"session_id", id_},
          {"sequence", undo_.size()},
          {"hash", canonical_hash(current_)},
          {"can_undo", !undo_.empty()},
          {"can_redo", !redo_.empty()},
          {"in_flight", in_flight_},
          {"busy", busy_},
          {"now_ms", clock_->now_ms()},
          {"state", state}};
}

std::vector<TraceRecord> Session::trace() const {
  std::lock_guard lock(mu_);
  return trace_;
}

std::vector<PromptLogEntry> Session::prompt_log() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::vector<InteractionLogEntry> Session::interaction_log() const {
  std::lock_guard lock(mu_);
  return interactions_;
}

void Session::set_commit_listener(CommitListener listener) {
  std::lock_guard lock(mu_);
  commit_listener_ = std::move(listener);
}

void Session::set_log_listener(std::function<void(const InteractionLogEntry&)> listener) {
  std::lock_guard lock(mu_);
  log_listener_ = std::move(listener);
}

}  // namespace texterial
