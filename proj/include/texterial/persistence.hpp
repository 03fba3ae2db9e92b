#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "texterial/session.hpp"
#include "texterial/state.hpp"

namespace texterial {

inline constexpr std::string_view kSessionFormat = "texterial-session/1";

/// {"format":..,"hash":..,"state":..} in canonical form, newline-terminated.
std::string session_file_contents(const SessionState& state);

/// Throws CorruptFile when the document does not parse, has the wrong format
/// tag, or its state does not hash to the embedded digest.
SessionState parse_session_file(std::string_view contents);

/// Atomic: writes a sibling temp file, then renames it over `path`. Throws IoError.
void save_session(const std::filesystem::path& path, const SessionState& state);

/// Throws IoError or CorruptFile.
SessionState load_session(const std::filesystem::path& path);

/// One canonical JSON object per line.
std::string trace_jsonl(const std::vector<TraceRecord>& records);

/// Blank lines are skipped. Throws ParseError naming the 1-based line.
std::vector<TraceRecord> parse_trace(std::string_view jsonl);

std::vector<TraceRecord> read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records);

/// Appends one line, creating the file when needed. Throws IoError.
void append_line(const std::filesystem::path& path, std::string_view line);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace texterial
