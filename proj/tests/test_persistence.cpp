#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "test_support.hpp"
#include "texterial/persistence.hpp"
#include "texterial/replay.hpp"

using namespace texterial;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("texterial-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::pair<SessionState, std::vector<TraceRecord>> demo() {
  oracles::Harness h(oracles::demo_seed());
  oracles::run_demo_scenario(h);
  return {h.s().state(), h.s().trace()};
}

}  // namespace

TEST_CASE("session files round-trip and are verified") {
  TempDir dir;
  const auto [state, trace] = demo();
  const fs::path file = dir.path / "s.session.json";
  save_session(file, state);
  CHECK(canonical_hash(load_session(file)) == canonical_hash(state));
  CHECK(read_text_file(file).back() == '\n');

  std::string contents = read_text_file(file);
  SUBCASE("tampered state") {
    Json j = Json::parse(contents);
    j["state"]["writing_context"] = "a different book";
    CHECK_THROWS_AS_CODE(parse_session_file(j.dump()), ErrorCode::CorruptFile);
  }
  SUBCASE("truncated file") {
    CHECK_THROWS_AS_CODE(parse_session_file(contents.substr(0, contents.size() / 2)), ErrorCode::CorruptFile);
  }
  SUBCASE("wrong format tag") {
    Json j = Json::parse(contents);
    j["format"] = "texterial-session/0";
    CHECK_THROWS_AS_CODE(parse_session_file(j.dump()), ErrorCode::CorruptFile);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS_CODE(load_session(dir.path / "nope.json"), ErrorCode::IoError); }
}

TEST_CASE("saving leaves no temp files behind") {
  TempDir dir;
  for (int i = 0; i < 5; ++i) save_session(dir.path / "a.session.json", oracles::demo_seed());
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++n;
  CHECK(n == 1);
}

TEST_CASE("trace JSONL round-trips") {
  const auto [state, trace] = demo();
  const std::string text = trace_jsonl(trace);
  const auto back = parse_trace(text);
  REQUIRE(back.size() == trace.size());
  CHECK(trace_jsonl(back) == text);
  CHECK(parse_trace("\n\n").empty());
  try {
    parse_trace(text.substr(0, text.find('\n') + 1) + "{not json}\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS_CODE(parse_trace(R"({"t":1})"), ErrorCode::ParseError);
}

TEST_CASE("replay reproduces the recorded hashes") {
  const auto [state, trace] = demo();
  const ReplayReport a = replay(trace, oracles::demo_seed(), EngineConfig{}, nullptr, {true});
  const ReplayReport b = replay(trace, oracles::demo_seed(), EngineConfig{}, nullptr, {true});
  CHECK(a.final_hash == canonical_hash(state));
  CHECK(a.final_hash == b.final_hash);
  CHECK(a.verified == trace.size());
  CHECK(trace_jsonl(a.trace) == trace_jsonl(trace));

  const auto out = oracles::replay_determinism(testing::data_path("data/demo_trace.jsonl"),
                                               testing::data_path("data/demo_seed.json"));
  CHECK_MESSAGE(out.ok(), out.first_failure);
  CHECK(out.seconds < 10.0);
}

TEST_CASE("the bundled demo trace is current") {
  const auto [state, trace] = demo();
  CHECK(trace_jsonl(trace) == read_text_file(testing::data_path("data/demo_trace.jsonl")));
  CHECK(canonical_hash(load_session(testing::data_path("data/demo_seed.json"))) ==
        canonical_hash(oracles::demo_seed()));
}

TEST_CASE("replay stops at the first mismatch") {
  auto [state, trace] = demo();
  trace[4].expected_hash = std::string(64, '0');
  try {
    replay(trace, oracles::demo_seed(), EngineConfig{});
    FAIL("expected a mismatch");
  } catch (const ReplayFailure& e) {
    CHECK(e.code() == ErrorCode::HashMismatch);
    CHECK(e.index() == 4);
  }
}

TEST_CASE("replay edge cases") {
  const ReplayReport empty = replay({}, oracles::demo_seed(), EngineConfig{});
  CHECK(empty.records == 0);
  CHECK(empty.final_hash == empty.seed_hash);

  auto [state, trace] = demo();
  trace[3].expected_hash.reset();
  CHECK(replay(trace, oracles::demo_seed(), EngineConfig{}).verified == trace.size() - 1);
  CHECK_THROWS_AS_CODE(replay(trace, oracles::demo_seed(), EngineConfig{}, nullptr, {true}), ErrorCode::ParseError);

  std::vector<TraceRecord> bad{{0, Json{{"type", "dance"}}, std::nullopt}};
  CHECK_THROWS_AS_CODE(replay(bad, SessionState{}, EngineConfig{}), ErrorCode::ParseError);

  // Hand-written traces may use plain ticks.
  std::vector<TraceRecord> ticks{
      {0, Json{{"type", "gesture"},
               {"gesture", to_json(oracles::plant({300.0, 900.0}, R"({"seed":"a","dimension":"b"})", 0))}},
       std::nullopt},
      {0, Json{{"type", "tick"}}, std::nullopt},
      {45'000, Json{{"type", "tick"}}, std::nullopt}};
  const ReplayReport r = replay(ticks, SessionState{}, EngineConfig{});
  CHECK(r.final_state.leaves.size() == 4);
}
