#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "texterial/config.hpp"
#include "texterial/error.hpp"
#include "texterial/persistence.hpp"
#include "texterial/replay.hpp"
#include "texterial/server.hpp"

namespace fs = std::filesystem;
using namespace texterial;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::HashMismatch: return 3;
    case ErrorCode::ParseError: return 4;
    case ErrorCode::CorruptFile: return 5;
    case ErrorCode::IoError: return 6;
    case ErrorCode::UnknownSession: return 7;
    default: return 1;
  }
}

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) std::_Exit(0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"texterial: text-as-material engine"};
  app.require_subcommand(1);

  std::optional<std::string> config_file;
  app.add_option("--config", config_file, "JSON file of dotted config overrides");

  auto* serve = app.add_subcommand("serve", "run the HTTP and event-stream API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::string> provider;
  std::string data_dir = "texterial-data";
  std::string clock = "wall";
  serve->add_option("--port", port, "listen port (0 picks one)");
  serve->add_option("--host", host, "listen address");
  serve->add_option("--provider", provider, "mock or live")->check(CLI::IsMember({"mock", "live"}));
  serve->add_option("--data", data_dir, "directory for session files, traces, and logs");
  serve->add_option("--clock", clock, "wall, or scripted to advance time through POST /sessions/{id}/clock")
      ->check(CLI::IsMember({"wall", "scripted"}));

  auto* replay_cmd = app.add_subcommand("replay", "re-run a trace against a seed session on the mock provider");
  std::string trace_path;
  std::string seed_path;
  bool strict = false;
  std::optional<std::string> write_trace_path;
  std::optional<std::string> out_path;
  replay_cmd->add_option("trace", trace_path, "trace JSONL")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--seed", seed_path, "seed session file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--strict", strict, "require a hash on every record and non-decreasing t");
  replay_cmd->add_option("--write-trace", write_trace_path, "write the trace recorded during replay");
  replay_cmd->add_option("--out", out_path, "write the final session file");

  auto* export_cmd = app.add_subcommand("export", "copy a verified session file out of the data directory");
  std::string session_id;
  std::string export_out;
  export_cmd->add_option("session_id", session_id, "session id")->required();
  export_cmd->add_option("--out", export_out, "destination file")->required();
  export_cmd->add_option("--data", data_dir, "data directory of the server");

  CLI11_PARSE(app, argc, argv);

  try {
    EngineConfig config = load_config(config_file ? std::optional<fs::path>(*config_file) : std::nullopt);

    if (*serve) {
      if (provider) config.provider = provider_kind_from_string(*provider);
      ServerOptions options;
      options.host = host;
      options.port = port;
      options.data_dir = data_dir;
      options.clock = clock_mode_from_string(clock);
      options.config = config;
      Server server(options);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int bound = server.bind();
      std::cout << "texterial listening on http://" << host << ":" << bound << " (provider "
                << (config.provider == ProviderKind::Live ? "live" : "mock") << ", clock " << clock << ", data "
                << data_dir << ")" << std::endl;
      server.run();
      return 0;
    }

    if (*replay_cmd) {
      const auto records = read_trace(trace_path);
      const SessionState seed = load_session(seed_path);
      ReplayOptions options;
      options.strict = strict;
      const ReplayReport report = replay(records, seed, config, nullptr, options);
      if (write_trace_path) write_trace(*write_trace_path, report.trace);
      if (out_path) save_session(*out_path, report.final_state);
      std::cout << "records " << report.records << "\n"
                << "verified " << report.verified << "\n"
                << "seed " << report.seed_hash << "\n"
                << "final " << report.final_hash << std::endl;
      return 0;
    }

    if (*export_cmd) {
      const fs::path source = fs::path(data_dir) / (session_id + ".session.json");
      if (!fs::exists(source)) throw Error(ErrorCode::UnknownSession, session_id + " not found in " + data_dir);
      const SessionState state = load_session(source);
      save_session(export_out, state);
      std::cout << canonical_hash(state) << std::endl;
      return 0;
    }
  } catch (const ReplayFailure& e) {
    std::cerr << "replay failed at record " << e.index() << ": " << e.what() << std::endl;
    return exit_code(e.code());
  } catch (const Error& e) {
    std::cerr << e.what() << std::endl;
    return exit_code(e.code());
  }
  return 0;
}
