#pragma once

#include <exception>

#include "texterial/session.hpp"

namespace texterial {

template <typename R>
PendingOp Session::async_op(AsyncSpec spec, std::function<R()> call,
                            std::function<OpResult(SessionState&, R&, std::int64_t)> apply) {
  for (const auto& key : spec.busy_keys) busy_.insert(key);
  ++in_flight_;

  struct Slot {
    std::optional<R> value;
    std::exception_ptr error;
  };
  auto slot = std::make_shared<Slot>();

  PendingOp op;
  op.id = spec.op_id;
  op.work = [slot, call = std::move(call)] {
    try {
      slot->value.emplace(call());
    } catch (...) {
      slot->error = std::current_exception();
    }
  };
  op.finish = [this, slot, spec = std::move(spec), apply = std::move(apply)]() -> OpResult {
    std::lock_guard lock(mu_);
    for (const auto& key : spec.busy_keys) busy_.erase(key);
    --in_flight_;
    try {
      if (slot->error) std::rethrow_exception(slot->error);
      if (!slot->value) throw Error(ErrorCode::InvalidState, "operation finished before its work ran");
      SessionState next = current_;
      const std::int64_t t = commit_time(spec.started_at);
      OpResult result = apply(next, *slot->value, t);
      result.operation_id = spec.op_id;
      result.data["operation_id"] = spec.op_id;
      if (result.event.empty()) {
        log_interaction(spec, "ignored");
        return result;
      }
      result.hash = commit(std::move(next), spec.trace_event, t);
      log_interaction(spec, "ok");
      return result;
    } catch (const Error& e) {
      if (spec.backoff_key) retry_after_[*spec.backoff_key] = clock_->now_ms() + config_.garden.retry_after_ms;
      return failure(spec, e.code(), e.what());
    } catch (const std::exception& e) {
      if (spec.backoff_key) retry_after_[*spec.backoff_key] = clock_->now_ms() + config_.garden.retry_after_ms;
      return failure(spec, ErrorCode::InvalidState, e.what());
    }
  };
  return op;
}

}  // namespace texterial
