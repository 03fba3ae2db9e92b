#pragma once

#include <string_view>
#include <vector>

#include "texterial/geometry.hpp"
#include "texterial/state.hpp"

namespace texterial {

enum class DiffKind { Inserted, Replaced };

std::string_view to_string(DiffKind kind);

struct DiffSpan {
  CharRange range;  // byte range in the new text, from first to last changed word
  DiffKind kind = DiffKind::Inserted;

  friend bool operator==(const DiffSpan&, const DiffSpan&) = default;
};

/// Disjoint, ordered spans over the new text.
struct EditDiff {
  std::vector<DiffSpan> spans;

  bool empty() const { return spans.empty(); }
};

/// Word-level LCS diff. Each maximal run of unmatched new words between two
/// matches is one span: Replaced when old words were dropped in the same gap,
/// Inserted otherwise. Deletions alone produce no span.
EditDiff word_diff(std::string_view old_text, std::string_view new_text);

/// Whitespace-delimited words as byte ranges.
std::vector<CharRange> split_words(std::string_view text);

Json to_json(const EditDiff& diff);

}  // namespace texterial
