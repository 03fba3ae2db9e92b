#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "texterial/config.hpp"
#include "texterial/session.hpp"

namespace texterial {

/// A replay stopped at `index` (0-based record number).
class ReplayFailure : public Error {
 public:
  ReplayFailure(ErrorCode code, std::size_t index, const std::string& message)
      : Error(code, "record " + std::to_string(index) + ": " + message), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

struct ReplayOptions {
  /// Every record must carry expected_hash and t must never decrease.
  bool strict = false;
};

struct ReplayReport {
  std::size_t records = 0;
  std::size_t verified = 0;
  std::string seed_hash;
  std::string final_hash;
  SessionState final_state;
  /// The trace the replayed session recorded itself.
  std::vector<TraceRecord> trace;
  std::vector<PromptLogEntry> prompts;
};

/// Applies one trace record to a session driven by `clock`.
void apply_record(Session& session, ScriptedClock& clock, const TraceRecord& record);

/// Replays `records` against `seed` on a scripted clock. Throws ReplayFailure
/// with HashMismatch, or with the code of the operation that failed.
ReplayReport replay(const std::vector<TraceRecord>& records, const SessionState& seed, const EngineConfig& config,
                    std::shared_ptr<Gateway> gateway = nullptr, ReplayOptions options = {});

}  // namespace texterial
