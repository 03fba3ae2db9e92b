#include "texterial/replay.hpp"

#include "texterial/error.hpp"

namespace texterial {

namespace {

void require_ok(const OpResult& r) {
  if (!r.ok) throw Error(r.error.value_or(ErrorCode::InvalidState), r.message);
}

}  // namespace

void apply_record(Session& session, ScriptedClock& clock, const TraceRecord& record) {
  clock.set(record.t);
  const Json& ev = record.event;
  const std::string type = ev.at("type").get<std::string>();
  try {
    if (type == "gesture") {
      require_ok(session.apply(gesture_from_json(ev.at("gesture"))));
    } else if (type == "add_block") {
      PendingOp op = session.begin_add_block(ev.at("text").get<std::string>(),
                                             Point{ev.at("x").get<double>(), ev.at("y").get<double>()},
                                             block_origin_from_string(ev.value("origin", std::string("Manual"))));
      require_ok(session.run(op));
    } else if (type == "grow") {
      require_ok(session.grow(ev.at("fern").get<std::string>()));
    } else if (type == "tick") {
      for (const auto& r : session.tick()) require_ok(r);
    } else if (type == "undo") {
      session.undo();
    } else if (type == "redo") {
      session.redo();
    } else {
      throw Error(ErrorCode::ParseError, "unknown event type '" + type + "'");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ReplayReport replay(const std::vector<TraceRecord>& records, const SessionState& seed, const EngineConfig& config,
                    std::shared_ptr<Gateway> gateway, ReplayOptions options) {
  if (!gateway) gateway = std::make_shared<Gateway>(std::make_shared<MockProvider>(), config.gateway);
  auto clock = std::make_shared<ScriptedClock>(seed.clock_ms);
  Session session("replay", seed, gateway, config, clock);

  ReplayReport report;
  report.records = records.size();
  report.seed_hash = canonical_hash(seed);
  std::int64_t last_t = seed.clock_ms;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TraceRecord& rec = records[i];
    if (options.strict) {
      if (!rec.expected_hash) throw ReplayFailure(ErrorCode::ParseError, i, "strict replay needs expected_hash");
      if (rec.t < last_t) throw ReplayFailure(ErrorCode::ParseError, i, "t decreases");
    }
    last_t = rec.t;
    try {
      apply_record(session, *clock, rec);
    } catch (const Error& e) {
      throw ReplayFailure(e.code(), i, e.what());
    }
    if (rec.expected_hash) {
      const std::string actual = session.hash();
      if (actual != *rec.expected_hash) {
        throw ReplayFailure(ErrorCode::HashMismatch, i, "expected " + *rec.expected_hash + ", got " + actual);
      }
      ++report.verified;
    }
  }
  report.final_state = session.state();
  report.final_hash = canonical_hash(report.final_state);
  report.trace = session.trace();
  report.prompts = session.prompt_log();
  return report;
}

}  // namespace texterial
