#include "texterial/tags.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "texterial/error.hpp"

namespace texterial {

namespace {

constexpr std::array<std::pair<MarkerKind, std::string_view>, 6> kMarkerNames{{
    {MarkerKind::Squeeze, "squeeze"},
    {MarkerKind::Stretch, "stretch"},
    {MarkerKind::Squash, "squash"},
    {MarkerKind::Pinch, "pinch"},
    {MarkerKind::Smudge, "smudge"},
    {MarkerKind::Overlap, "overlap"},
}};

std::optional<MarkerKind> marker_from_name(std::string_view name) {
  for (const auto& [k, n] : kMarkerNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string marker(MarkerKind kind, int level, bool closing) {
  std::string out(static_cast<std::size_t>(level), '<');
  if (closing) out += '/';
  out += marker_name(kind);
  out.append(static_cast<std::size_t>(level), '>');
  return out;
}

}  // namespace

std::string_view marker_name(MarkerKind kind) {
  for (const auto& [k, n] : kMarkerNames) {
    if (k == kind) return n;
  }
  return "?";
}

int bracket_count(Intensity intensity) {
  return std::min(4, 1 + static_cast<int>(std::floor(4.0 * intensity.value())));
}

std::string escape_markup(std::string_view plain) {
  std::string out;
  out.reserve(plain.size());
  for (char c : plain) {
    if (c == '\\' || c == '<') out += '\\';
    out += c;
  }
  return out;
}

bool is_word_aligned(std::string_view plain, CharRange range) {
  if (range.empty() || range.end > plain.size()) return false;
  if (is_space(plain[range.start]) || is_space(plain[range.end - 1])) return false;
  if (range.start > 0 && !is_space(plain[range.start - 1])) return false;
  if (range.end < plain.size() && !is_space(plain[range.end])) return false;
  return true;
}

std::string emit_tags(std::string_view plain, std::span<const Tag> tags) {
  struct Insert {
    std::size_t at;
    int order;  // closings sort before openings at the same offset
    std::size_t seq;
    std::string text;
  };
  std::vector<Insert> inserts;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (!is_word_aligned(plain, t.range)) {
      throw Error(ErrorCode::MisalignedRange,
                  "range [" + std::to_string(t.range.start) + "," + std::to_string(t.range.end) +
                      ") is not word aligned");
    }
    if (t.kind != MarkerKind::Overlap && (t.level < 1 || t.level > 4)) {
      throw Error(ErrorCode::InvalidArgument, "marker level must be 1..4");
    }
    const int level = t.kind == MarkerKind::Overlap ? 1 : t.level;
    inserts.push_back({t.range.start, 1, i, marker(t.kind, level, false)});
    inserts.push_back({t.range.end, 0, tags.size() - i, marker(t.kind, level, true)});
  }
  std::sort(inserts.begin(), inserts.end(), [](const Insert& a, const Insert& b) {
    if (a.at != b.at) return a.at < b.at;
    if (a.order != b.order) return a.order < b.order;
    return a.seq < b.seq;
  });
  std::string out;
  std::size_t cursor = 0;
  for (const auto& ins : inserts) {
    out += escape_markup(plain.substr(cursor, ins.at - cursor));
    out += ins.text;
    cursor = ins.at;
  }
  out += escape_markup(plain.substr(cursor));
  return out;
}

std::string emit_marked(std::string_view plain, CharRange range, MarkerKind kind, int level) {
  const Tag tag{kind, range, level};
  return emit_tags(plain, std::span<const Tag>(&tag, 1));
}

std::string tag_lines(const TextLayout& layout, std::span<const std::size_t> line_indices) {
  std::vector<Tag> tags;
  for (std::size_t idx : line_indices) {
    tags.push_back({MarkerKind::Overlap, layout.lines.at(idx).range, 1});
  }
  return emit_tags(layout.text, tags);
}

namespace {

struct Token {
  bool is_marker = false;
  std::string text;  // literal text, or the raw marker
  MarkerKind kind = MarkerKind::Squeeze;
  int level = 0;
  bool closing = false;
  bool matched = false;
};

// Attempts to read a marker at `pos`. On success advances pos.
std::optional<Token> read_marker(std::string_view s, std::size_t& pos, std::vector<std::string>& unknown) {
  std::size_t i = pos;
  int n = 0;
  while (i < s.size() && s[i] == '<') {
    ++n;
    ++i;
  }
  if (n < 1 || n > 4) return std::nullopt;
  bool closing = false;
  if (i < s.size() && s[i] == '/') {
    closing = true;
    ++i;
  }
  const std::size_t word_start = i;
  while (i < s.size() && std::islower(static_cast<unsigned char>(s[i]))) ++i;
  if (i == word_start) return std::nullopt;
  const std::string_view word = s.substr(word_start, i - word_start);
  int r = 0;
  while (i < s.size() && s[i] == '>' && r < n) {
    ++r;
    ++i;
  }
  if (r != n) return std::nullopt;
  const auto kind = marker_from_name(word);
  if (!kind) {
    unknown.emplace_back(s.substr(pos, i - pos));
    return std::nullopt;
  }
  Token t;
  t.is_marker = true;
  t.text = std::string(s.substr(pos, i - pos));
  t.kind = *kind;
  t.level = n;
  t.closing = closing;
  pos = i;
  return t;
}

}  // namespace

TaggedText parse_marked(std::string_view marked) {
  TaggedText out;
  std::vector<Token> tokens;
  struct Unknown {
    std::size_t token;
    std::size_t within;
    std::string raw;
  };
  std::vector<Unknown> unknown_at;

  auto literal = [&](char c) {
    if (tokens.empty() || tokens.back().is_marker) tokens.emplace_back();
    tokens.back().text += c;
  };

  std::size_t pos = 0;
  while (pos < marked.size()) {
    const char c = marked[pos];
    if (c == '\\' && pos + 1 < marked.size() && (marked[pos + 1] == '<' || marked[pos + 1] == '\\')) {
      literal(marked[pos + 1]);
      pos += 2;
      continue;
    }
    if (c == '<') {
      std::vector<std::string> unknown;
      if (auto tok = read_marker(marked, pos, unknown)) {
        tokens.push_back(std::move(*tok));
        continue;
      }
      if (!unknown.empty()) {
        const bool fresh = tokens.empty() || tokens.back().is_marker;
        unknown_at.push_back({fresh ? tokens.size() : tokens.size() - 1,
                              fresh ? 0 : tokens.back().text.size(), unknown.front()});
        for (char u : unknown.front()) literal(u);
        pos += unknown.front().size();
        continue;
      }
    }
    literal(c);
    ++pos;
  }

  std::map<MarkerKind, std::vector<std::size_t>> open;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Token& t = tokens[i];
    if (!t.is_marker) continue;
    auto& stack = open[t.kind];
    if (!t.closing) {
      stack.push_back(i);
    } else if (!stack.empty() && tokens[stack.back()].level == t.level) {
      tokens[stack.back()].matched = true;
      t.matched = true;
      pairs.emplace_back(stack.back(), i);
      stack.pop_back();
    }
  }

  std::vector<std::size_t> offset(tokens.size() + 1, 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    offset[i] = out.plain.size();
    if (!t.is_marker || !t.matched) {
      if (t.is_marker) {
        out.warnings.push_back({TagWarningKind::UnbalancedMarker, t.text, out.plain.size()});
      }
      out.plain += t.text;
    }
  }
  offset[tokens.size()] = out.plain.size();

  for (const auto& u : unknown_at) {
    out.warnings.push_back(
        {TagWarningKind::UnknownMarker, u.raw, offset[std::min(u.token, tokens.size())] + u.within});
  }
  for (const auto& [o, c] : pairs) {
    out.tags.push_back({tokens[o].kind, {offset[o], offset[c]}, tokens[o].level});
  }
  std::sort(out.tags.begin(), out.tags.end(), [](const Tag& a, const Tag& b) {
    if (a.range.start != b.range.start) return a.range.start < b.range.start;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return out;
}

namespace {

std::string strip_once(const std::string& in) {
  static const std::regex kMarker(
      "<{1,4}/?(squeeze|stretch|squash|pinch|smudge|overlap)>{1,4}", std::regex::icase);
  static const std::regex kBold(R"(\*\*([^*\n]+?)\*\*)");
  static const std::regex kUnderBold(R"(__([^_\n]+?)__)");
  static const std::regex kItalic(R"(\*([^\s*](?:[^*\n]*[^\s*])?)\*)");

  std::string s = std::regex_replace(in, kMarker, "");
  s = std::regex_replace(s, kBold, "$1");
  s = std::regex_replace(s, kUnderBold, "$1");
  s = std::regex_replace(s, kItalic, "$1");

  std::istringstream lines(s);
  std::vector<std::string> kept;
  std::string line;
  while (std::getline(lines, line)) {
    if (trim(line).rfind("```", 0) == 0) continue;
    kept.push_back(line);
  }

  std::string out;
  std::size_t blank_run = 0;
  auto flush_blanks = [&] {
    const std::size_t n = blank_run > 2 ? 1 : blank_run;
    for (std::size_t i = 0; i < n; ++i) out += '\n';
    blank_run = 0;
  };
  bool first = true;
  for (const auto& l : kept) {
    if (is_blank(l)) {
      ++blank_run;
      continue;
    }
    if (!first) out += '\n';
    flush_blanks();
    out += l;
    first = false;
  }
  return trim(out);
}

}  // namespace

std::string strip_model_artifacts(std::string_view response) {
  std::string current(response);
  for (int guard = 0; guard < 16; ++guard) {
    std::string next = strip_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  if (is_blank(current)) throw Error(ErrorCode::EmptyCompletion, "completion is blank after cleanup");
  return current;
}

}  // namespace texterial
