#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texterial/geometry.hpp"
#include "texterial/model.hpp"

namespace texterial {

// Marker grammar:
//   opening  := '<'{n} kind '>'{n}
//   closing  := '<'{n} '/' kind '>'{n}      with n in 1..4
// User text is escaped before markers are inserted: '\' -> "\\", '<' -> "\<".

enum class MarkerKind { Squeeze, Stretch, Squash, Pinch, Smudge, Overlap };

std::string_view marker_name(MarkerKind kind);

struct Tag {
  MarkerKind kind = MarkerKind::Squeeze;
  CharRange range;
  int level = 1;

  friend bool operator==(const Tag&, const Tag&) = default;
};

enum class TagWarningKind { UnbalancedMarker, UnknownMarker };

struct TagWarning {
  TagWarningKind kind = TagWarningKind::UnbalancedMarker;
  std::string marker;
  std::size_t position = 0;  // byte offset in the recovered plain text
};

struct TaggedText {
  std::string plain;
  std::vector<Tag> tags;
  std::vector<TagWarning> warnings;
};

/// min(4, 1 + floor(4 i)).
int bracket_count(Intensity intensity);

std::string escape_markup(std::string_view plain);

bool is_word_aligned(std::string_view plain, CharRange range);

/// Wraps `range` in a marker pair of the given level. Overlap markers are
/// always emitted with a single bracket. Throws MisalignedRange.
std::string emit_marked(std::string_view plain, CharRange range, MarkerKind kind, int level);

/// General form of emit_marked for several tags at once.
std::string emit_tags(std::string_view plain, std::span<const Tag> tags);

/// Wraps each listed visual line in <overlap>...</overlap>.
std::string tag_lines(const TextLayout& layout, std::span<const std::size_t> line_indices);

/// Total inverse of the emitters. Unknown or unbalanced markers stay in the
/// plain text verbatim and are reported as warnings.
TaggedText parse_marked(std::string_view marked);

/// Removes residual markers, code fences and markdown emphasis; collapses
/// runs of more than two blank lines. Throws EmptyCompletion when nothing is left.
std::string strip_model_artifacts(std::string_view response);

}  // namespace texterial
