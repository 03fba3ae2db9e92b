#include "texterial/persistence.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "texterial/error.hpp"

namespace texterial {

namespace fs = std::filesystem;

std::string session_file_contents(const SessionState& state) {
  const Json body = to_json(state);
  const Json doc{{"format", kSessionFormat}, {"hash", canonical_hash(body)}, {"state", body}};
  return canonical_dump(doc) + "\n";
}

SessionState parse_session_file(std::string_view contents) {
  Json doc;
  try {
    doc = Json::parse(contents);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("session file does not parse: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != kSessionFormat || !doc.contains("state") ||
      !doc.contains("hash") || !doc.at("hash").is_string()) {
    throw Error(ErrorCode::CorruptFile, "not a " + std::string(kSessionFormat) + " document");
  }
  SessionState state;
  try {
    state = state_from_json(doc.at("state"));
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptFile, e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptFile, e.what());
  }
  const std::string actual = canonical_hash(state);
  if (actual != doc.at("hash").get<std::string>()) {
    throw Error(ErrorCode::CorruptFile, "embedded digest does not match the state (" + actual + ")");
  }
  return state;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return buf.str();
}

void write_text_file_atomic(const fs::path& path, std::string_view contents) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignore;
      fs::remove(tmp, ignore);
      throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void save_session(const fs::path& path, const SessionState& state) {
  write_text_file_atomic(path, session_file_contents(state));
}

SessionState load_session(const fs::path& path) { return parse_session_file(read_text_file(path)); }

std::string trace_jsonl(const std::vector<TraceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += canonical_dump(to_json(r));
    out += '\n';
  }
  return out;
}

std::vector<TraceRecord> parse_trace(std::string_view jsonl) {
  std::vector<TraceRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string line = trim(jsonl.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(trace_record_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<TraceRecord> read_trace(const fs::path& path) { return parse_trace(read_text_file(path)); }

void write_trace(const fs::path& path, const std::vector<TraceRecord>& records) {
  write_text_file_atomic(path, trace_jsonl(records));
}

void append_line(const fs::path& path, std::string_view line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path.string());
}

}  // namespace texterial
