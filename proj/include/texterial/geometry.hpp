#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texterial/model.hpp"

namespace texterial {

/// Half-open byte range [start, end) into a UTF-8 string.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool empty() const { return end <= start; }

  friend bool operator==(const CharRange&, const CharRange&) = default;
};

struct GeometryConfig {
  double full_blend_threshold = 0.95;
  double influence_threshold = 0.25;
  double brush_radius = 18.0;
  double cell_w = 8.0;
  double cell_h = 16.0;
};

struct WordBox {
  CharRange range;
  Rect box;
  std::size_t line = 0;  // index into TextLayout::lines
};

/// A visual line. `band` spans the full block width over the line's row so
/// that overlap tests see the line, not just its inked words.
struct LineBox {
  CharRange range;
  Rect band;
  std::size_t row = 0;
  std::vector<std::size_t> words;
};

struct TextLayout {
  std::string text;
  Rect bounds;
  std::vector<WordBox> words;
  std::vector<LineBox> lines;

  /// Minimal contiguous range covering the given words (indices into `words`).
  CharRange cover(std::span<const std::size_t> word_indices) const;
};

/// Deterministic headless layout: every code point occupies one cell_w x cell_h
/// cell; words wrap greedily at `width`; '\n' forces a new row. Rows holding no
/// word produce no LineBox.
TextLayout monospace_layout(std::string_view text, Point origin, double width,
                            const GeometryConfig& config);

/// Layout of a block using its own bounds.
TextLayout layout_block(const TextBlock& block, const GeometryConfig& config);

/// Number of rows the monospace layout uses at the given width (at least 1).
std::size_t row_count(std::string_view text, double width, const GeometryConfig& config);

enum class CollisionKind { VerticalTopBottom, VerticalBottomTop, HorizontalInsert, FullBlend };

std::string_view to_string(CollisionKind kind);

struct CollisionResult {
  CollisionKind kind = CollisionKind::FullBlend;
  Intensity intensity;
  std::vector<std::size_t> overlap_lines_dragged;  // indices into dragged.lines
  std::vector<std::size_t> overlap_lines_target;   // indices into target.lines
  std::optional<double> insert_position;           // HorizontalInsert only
  std::optional<std::string> anchor_line;          // HorizontalInsert only
};

/// Intensity is the intersection area over the smaller block area. Throws
/// NoCollision when the boxes share no area.
CollisionResult classify_collision(const TextLayout& dragged, const TextLayout& target,
                                   Point drag_vector, const GeometryConfig& config);

struct ScopedIntensity {
  CharRange range;
  Intensity intensity;
};

/// Words whose centers lie close enough to the pinch center (influence
/// 1 - d/R above the threshold). Intensity is the span contraction ratio.
ScopedIntensity pinch_influence(Point center, double initial_span, double final_span,
                                const TextLayout& layout, const GeometryConfig& config);

double pinch_word_influence(Point word_center, Point center, double initial_span);

CharRange press_extent(Point center, double radius, const TextLayout& layout);

CharRange two_finger_scope(Point p1, Point p2, const TextLayout& layout);

/// Sentence boundary nearest the tear; falls back to word boundaries. The
/// returned index k always leaves both text[0, k) and text[k, n) non-blank.
std::size_t rip_split_index(std::span<const Point> tear_path, const TextLayout& layout);

ScopedIntensity smudge_extent(std::span<const Point> path, const TextLayout& layout,
                              const GeometryConfig& config);

struct FernExtent {
  std::string id;
  double x_min = 0.0;
  double x_max = 0.0;
  double base_y = 0.0;
};

/// Ferns under a rain stroke: horizontal overlap with the stroke's x-range and
/// base below the stroke's mean y.
std::vector<std::string> water_targets(std::span<const Point> stroke,
                                       std::span<const FernExtent> ferns);

/// Distance from a point to a segment.
double point_segment_distance(Point p, Point a, Point b);
/// Distance from a polyline to a rectangle (0 when they touch).
double polyline_rect_distance(std::span<const Point> path, const Rect& rect);
double polyline_length(std::span<const Point> path);

}  // namespace texterial
