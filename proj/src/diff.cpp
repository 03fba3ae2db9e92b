#include "texterial/diff.hpp"

#include <cctype>

namespace texterial {

std::string_view to_string(DiffKind kind) { return kind == DiffKind::Inserted ? "Inserted" : "Replaced"; }

std::vector<CharRange> split_words(std::string_view text) {
  std::vector<CharRange> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back({start, i});
  }
  return words;
}

EditDiff word_diff(std::string_view old_text, std::string_view new_text) {
  const auto a = split_words(old_text);
  const auto b = split_words(new_text);
  auto word = [](std::string_view s, CharRange r) { return s.substr(r.start, r.length()); };

  // suffix[i][j] = LCS length of a[i..] and b[j..]
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::uint32_t> suffix((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return suffix[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = word(old_text, a[i]) == word(new_text, b[j]) ? at(i + 1, j + 1) + 1
                                                              : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  EditDiff diff;
  std::size_t gap_start = 0;  // first unmatched new word of the current gap
  std::size_t gap_new = 0;
  std::size_t gap_old = 0;
  auto close_gap = [&] {
    if (gap_new > 0) {
      diff.spans.push_back({{b[gap_start].start, b[gap_start + gap_new - 1].end},
                            gap_old > 0 ? DiffKind::Replaced : DiffKind::Inserted});
    }
    gap_new = 0;
    gap_old = 0;
  };

  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && word(old_text, a[i]) == word(new_text, b[j]) && at(i, j) == at(i + 1, j + 1) + 1) {
      close_gap();
      ++i;
      ++j;
    } else if (j < m && (i == n || at(i, j + 1) >= at(i + 1, j))) {
      if (gap_new == 0) gap_start = j;
      ++gap_new;
      ++j;
    } else {
      ++gap_old;
      ++i;
    }
  }
  close_gap();
  return diff;
}

Json to_json(const EditDiff& diff) {
  Json spans = Json::array();
  for (const auto& s : diff.spans) {
    spans.push_back({{"start", s.range.start}, {"end", s.range.end}, {"kind", to_string(s.kind)}});
  }
  return {{"spans", spans}};
}

}  // namespace texterial
