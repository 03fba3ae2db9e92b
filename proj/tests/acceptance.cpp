// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "texterial/persistence.hpp"

namespace {

struct Line {
  int number;
  std::string title;
  oracles::Outcome outcome;
  double limit_s = 0.0;
};

bool report(const Line& line) {
  const bool in_time = line.limit_s <= 0.0 || line.outcome.seconds < line.limit_s;
  const bool pass = line.outcome.ok() && in_time;
  std::printf("%s %2d %-28s %5zu cases  %7.3f s", pass ? "PASS" : "FAIL", line.number, line.title.c_str(),
              line.outcome.cases, line.outcome.seconds);
  if (line.outcome.failures > 0) {
    std::printf("  (%zu failed; first: %s)", line.outcome.failures, line.outcome.first_failure.c_str());
  } else if (!in_time) {
    std::printf("  (over the %.0f s budget)", line.limit_s);
  }
  std::printf("\n");
  return pass;
}

template <typename F>
oracles::Outcome timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  oracles::Outcome out = f();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// The bundled trace replays identically, and a fresh run of the scenario
/// reproduces it.
oracles::Outcome demo_replay(const std::string& data) {
  oracles::Outcome out = oracles::replay_determinism(data + "/demo_trace.jsonl", data + "/demo_seed.json");
  ++out.cases;
  try {
    oracles::Harness h(oracles::demo_seed());
    oracles::run_demo_scenario(h);
    const std::string recorded = texterial::read_text_file(data + "/demo_trace.jsonl");
    if (texterial::trace_jsonl(h.s().trace()) != recorded) out.fail("fresh demo run differs from the bundled trace");
  } catch (const std::exception& e) {
    out.fail(std::string("demo run threw ") + e.what());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = argc > 1 ? argv[1] : TEXTERIAL_TEST_DATA_DIR;
  const std::string data = root + "/data";
  const auto start = std::chrono::steady_clock::now();

  std::vector<Line> lines;
  lines.push_back({1, "prompt goldens", timed([&] { return oracles::prompt_goldens(root + "/golden"); }), 1.0});
  lines.push_back({2, "regime boundaries", timed([] { return oracles::regime_boundaries(); })});
  lines.push_back({3, "tag round-trip", timed([] { return oracles::tag_round_trip(0x7a61, 1000); })});
  lines.push_back({4, "rip partition", timed([] { return oracles::rip_partition(0x51b, 500); })});
  lines.push_back({5, "undo/redo", timed([] { return oracles::undo_redo(0xd0d0, 200); })});
  lines.push_back({6, "merge ordering", timed([] { return oracles::merge_ordering(0x3e6e, 100); })});
  lines.push_back({7, "garden accounting", timed([] {
                     oracles::Outcome out = oracles::garden_growth_counts(10);
                     out.merge(oracles::garden_watering());
                     out.merge(oracles::garden_prompt_hygiene(0x6a7d, 40));
                     return out;
                   })});
  lines.push_back(
      {8, "structured-output fixtures", timed([&] { return oracles::idea_pair_fixtures(data + "/idea_pair_fixtures.json"); })});
  lines.push_back({9, "replay determinism", timed([&] { return demo_replay(data); }), 10.0});

  bool all = true;
  oracles::Outcome suite;
  for (const auto& line : lines) {
    all = report(line) && all;
    suite.cases += line.outcome.cases;
    suite.failures += line.outcome.ok() ? 0 : 1;
  }
  suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!all && suite.failures == 0) suite.fail("a criterion missed its time budget");
  if (suite.failures > 0 && suite.first_failure.empty()) suite.first_failure = "see the lines above";
  all = report({10, "offline primary suite", suite, 60.0}) && all;
  return all ? 0 : 1;
}
