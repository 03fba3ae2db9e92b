// Regenerates the bundled demo trace and its seed session.
//   make_demo_trace OUT_DIR

#include <cstdio>
#include <string>

#include "oracles.hpp"
#include "texterial/persistence.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s OUT_DIR\n", argv[0]);
    return 2;
  }
  const std::string dir = argv[1];
  try {
    oracles::Harness h(oracles::demo_seed());
    oracles::run_demo_scenario(h);
    texterial::save_session(dir + "/demo_seed.json", oracles::demo_seed());
    texterial::write_trace(dir + "/demo_trace.jsonl", h.s().trace());
    std::printf("%zu records, final %s\n", h.s().trace().size(), h.s().hash().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
