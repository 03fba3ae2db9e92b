#include "texterial/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "texterial/error.hpp"

namespace texterial {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_continuation_byte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation_byte(c); }));
}

std::size_t columns_for(double width, const GeometryConfig& config) {
  const double cols = std::floor(width / config.cell_w);
  return cols < 1.0 ? 1 : static_cast<std::size_t>(cols);
}

struct PlacedWord {
  CharRange range;
  std::size_t row;
  std::size_t col;
  std::size_t cells;
};

std::vector<PlacedWord> place_words(std::string_view text, std::size_t cols, std::size_t& rows) {
  std::vector<PlacedWord> placed;
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++row;
      col = 0;
      ++i;
      continue;
    }
    if (is_space(c)) {
      ++col;
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    const std::size_t cells = code_points(text.substr(i, j - i));
    if (col > 0 && col + cells > cols) {
      ++row;
      col = 0;
    }
    placed.push_back({{i, j}, row, col, cells});
    col += cells;
    i = j;
  }
  rows = row + 1;
  return placed;
}

}  // namespace

CharRange TextLayout::cover(std::span<const std::size_t> word_indices) const {
  CharRange r{std::numeric_limits<std::size_t>::max(), 0};
  for (std::size_t w : word_indices) {
    r.start = std::min(r.start, words.at(w).range.start);
    r.end = std::max(r.end, words.at(w).range.end);
  }
  if (word_indices.empty()) r = {};
  return r;
}

TextLayout monospace_layout(std::string_view text, Point origin, double width,
                            const GeometryConfig& config) {
  TextLayout layout;
  layout.text = std::string(text);
  std::size_t rows = 1;
  const auto placed = place_words(text, columns_for(width, config), rows);
  layout.bounds = {origin.x, origin.y, width, static_cast<double>(rows) * config.cell_h};

  for (const auto& pw : placed) {
    if (layout.lines.empty() || layout.lines.back().row != pw.row) {
      LineBox line;
      line.row = pw.row;
      line.range = pw.range;
      line.band = {origin.x, origin.y + static_cast<double>(pw.row) * config.cell_h, width, config.cell_h};
      layout.lines.push_back(line);
    }
    auto& line = layout.lines.back();
    line.range.end = pw.range.end;
    line.words.push_back(layout.words.size());
    WordBox wb;
    wb.range = pw.range;
    wb.line = layout.lines.size() - 1;
    wb.box = {origin.x + static_cast<double>(pw.col) * config.cell_w,
              origin.y + static_cast<double>(pw.row) * config.cell_h,
              static_cast<double>(pw.cells) * config.cell_w, config.cell_h};
    layout.words.push_back(wb);
  }
  return layout;
}

TextLayout layout_block(const TextBlock& block, const GeometryConfig& config) {
  TextLayout layout = monospace_layout(block.text, block.position, block.size.w, config);
  layout.bounds = block.bounds();
  return layout;
}

std::size_t row_count(std::string_view text, double width, const GeometryConfig& config) {
  std::size_t rows = 1;
  place_words(text, columns_for(width, config), rows);
  return rows;
}

std::string_view to_string(CollisionKind kind) {
  switch (kind) {
    case CollisionKind::VerticalTopBottom: return "VerticalTopBottom";
    case CollisionKind::VerticalBottomTop: return "VerticalBottomTop";
    case CollisionKind::HorizontalInsert: return "HorizontalInsert";
    case CollisionKind::FullBlend: return "FullBlend";
  }
  return "?";
}

namespace {

std::vector<std::size_t> lines_in(const TextLayout& layout, const Rect& region) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.lines.size(); ++i) {
    const Rect& band = layout.lines[i].band;
    if (band.top() < region.bottom() && region.top() < band.bottom()) out.push_back(i);
  }
  return out;
}

}  // namespace

CollisionResult classify_collision(const TextLayout& dragged, const TextLayout& target,
                                   Point drag_vector, const GeometryConfig& config) {
  const Rect& a = dragged.bounds;
  const Rect& b = target.bounds;
  const Rect overlap = a.intersection(b);
  if (overlap.area() <= 0.0) throw Error(ErrorCode::NoCollision, "blocks do not overlap");

  CollisionResult result;
  const double smaller = std::min(a.area(), b.area());
  result.intensity = Intensity::clamped(overlap.area() / smaller);
  result.overlap_lines_dragged = lines_in(dragged, overlap);
  result.overlap_lines_target = lines_in(target, overlap);

  if (result.intensity.value() >= config.full_blend_threshold) {
    result.kind = CollisionKind::FullBlend;
  } else if (std::abs(drag_vector.y) >= std::abs(drag_vector.x)) {
    result.kind = a.center().y < b.center().y ? CollisionKind::VerticalTopBottom
                                              : CollisionKind::VerticalBottomTop;
  } else {
    result.kind = CollisionKind::HorizontalInsert;
    const double cy = overlap.center().y;
    result.insert_position = std::clamp((cy - b.top()) / b.h, 0.0, 1.0);
    const LineBox* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& line : target.lines) {
      const double d = std::abs(line.band.center().y - cy);
      if (d < best) {
        best = d;
        nearest = &line;
      }
    }
    // Only anchor when the seam actually sits on a line of text.
    if (nearest != nullptr && cy >= nearest->band.top() && cy <= nearest->band.bottom()) {
      result.anchor_line =
          target.text.substr(nearest->range.start, nearest->range.length());
    }
  }
  return result;
}

double pinch_word_influence(Point word_center, Point center, double initial_span) {
  return std::max(0.0, 1.0 - distance(word_center, center) / initial_span);
}

ScopedIntensity pinch_influence(Point center, double initial_span, double final_span,
                                const TextLayout& layout, const GeometryConfig& config) {
  if (!(initial_span > 0.0)) throw Error(ErrorCode::InvalidArgument, "pinch span must be positive");
  std::vector<std::size_t> hit;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (pinch_word_influence(layout.words[i].box.center(), center, initial_span) >
        config.influence_threshold) {
      hit.push_back(i);
    }
  }
  if (hit.empty()) throw Error(ErrorCode::NoTarget, "pinch influences no word");
  return {layout.cover(hit), Intensity::clamped(1.0 - final_span / initial_span)};
}

namespace {

double point_rect_distance(Point p, const Rect& r) {
  const double dx = std::max({r.left() - p.x, 0.0, p.x - r.right()});
  const double dy = std::max({r.top() - p.y, 0.0, p.y - r.bottom()});
  return std::hypot(dx, dy);
}

bool segment_hits_rect(Point a, Point b, const Rect& r) {
  // Liang-Barsky clip against the closed rectangle.
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - r.left(), r.right() - a.x, a.y - r.top(), r.bottom() - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

double polyline_rect_distance(std::span<const Point> path, const Rect& rect) {
  if (path.empty()) return std::numeric_limits<double>::infinity();
  if (path.size() == 1) return point_rect_distance(path[0], rect);
  const Point corners[4] = {{rect.left(), rect.top()},
                            {rect.right(), rect.top()},
                            {rect.left(), rect.bottom()},
                            {rect.right(), rect.bottom()}};
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Point a = path[i - 1];
    const Point b = path[i];
    if (segment_hits_rect(a, b, rect)) return 0.0;
    best = std::min({best, point_rect_distance(a, rect), point_rect_distance(b, rect)});
    for (const auto& c : corners) best = std::min(best, point_segment_distance(c, a, b));
  }
  return best;
}

double polyline_length(std::span<const Point> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  return total;
}

CharRange press_extent(Point center, double radius, const TextLayout& layout) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "press radius must be positive");
  std::vector<std::size_t> hit;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (point_rect_distance(center, layout.words[i].box) <= radius) hit.push_back(i);
  }
  if (hit.empty()) throw Error(ErrorCode::NoTarget, "press touches no word");
  return layout.cover(hit);
}

CharRange two_finger_scope(Point p1, Point p2, const TextLayout& layout) {
  if (p1 == p2) throw Error(ErrorCode::InvalidArgument, "two-finger scope needs distinct points");
  const Rect span{std::min(p1.x, p2.x), std::min(p1.y, p2.y), std::abs(p1.x - p2.x),
                  std::abs(p1.y - p2.y)};
  std::vector<std::size_t> hit;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (layout.words[i].box.touches(span)) hit.push_back(i);
  }
  if (hit.empty()) throw Error(ErrorCode::NoTarget, "finger span touches no word");
  return layout.cover(hit);
}

namespace {

bool both_sides_nonblank(std::string_view text, std::size_t k) {
  return !is_blank(text.substr(0, k)) && !is_blank(text.substr(k));
}

// Right edge of the last word starting before k, at its line's mid-height.
std::optional<Point> boundary_point(const TextLayout& layout, std::size_t k) {
  const WordBox* last = nullptr;
  for (const auto& w : layout.words) {
    if (w.range.start < k) last = &w;
  }
  if (last == nullptr) return std::nullopt;
  return Point{last->box.right(), last->box.center().y};
}

std::vector<std::size_t> sentence_boundaries(std::string_view text) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      out.push_back(i + 1);
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t k = i + 1;
    while (k < text.size() && (text[k] == '.' || text[k] == '!' || text[k] == '?' || text[k] == '"' ||
                               text[k] == '\'' || text[k] == ')')) {
      ++k;
    }
    if (k == text.size() || is_space(text[k])) out.push_back(k);
    i = k - 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::size_t rip_split_index(std::span<const Point> tear_path, const TextLayout& layout) {
  if (tear_path.empty() || polyline_rect_distance(tear_path, layout.bounds) > 0.0) {
    throw Error(ErrorCode::NoTarget, "tear path misses the block");
  }
  Point mean{0.0, 0.0};
  for (const auto& p : tear_path) {
    mean.x += p.x;
    mean.y += p.y;
  }
  mean.x /= static_cast<double>(tear_path.size());
  mean.y /= static_cast<double>(tear_path.size());

  const std::string_view text = layout.text;
  using Key = std::tuple<double, double, std::size_t>;
  std::optional<std::pair<Key, std::size_t>> best;
  for (std::size_t k : sentence_boundaries(text)) {
    if (!both_sides_nonblank(text, k)) continue;
    const auto bp = boundary_point(layout, k);
    if (!bp) continue;
    const Key key{std::abs(bp->y - mean.y), std::abs(bp->x - mean.x), k};
    if (!best || key < best->first) best = {key, k};
  }
  if (best) return best->second;

  for (const auto& w : layout.words) {
    const std::size_t k = w.range.end;
    if (!both_sides_nonblank(text, k)) continue;
    const Point bp{w.box.right(), w.box.center().y};
    const Key key{distance(bp, mean), 0.0, k};
    if (!best || key < best->first) best = {key, k};
  }
  if (!best) throw Error(ErrorCode::DegenerateSplit, "no boundary leaves two non-empty pieces");
  return best->second;
}

ScopedIntensity smudge_extent(std::span<const Point> path, const TextLayout& layout,
                              const GeometryConfig& config) {
  if (path.size() < 2) throw Error(ErrorCode::InvalidArgument, "smudge path needs two points");
  std::vector<std::size_t> hit;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (polyline_rect_distance(path, layout.words[i].box) <= config.brush_radius) hit.push_back(i);
  }
  if (hit.empty()) throw Error(ErrorCode::NoTarget, "smudge touches no word");
  return {layout.cover(hit), Intensity::clamped(polyline_length(path) / layout.bounds.w)};
}

std::vector<std::string> water_targets(std::span<const Point> stroke,
                                       std::span<const FernExtent> ferns) {
  if (stroke.empty()) throw Error(ErrorCode::InvalidArgument, "empty water stroke");
  double x_min = stroke[0].x;
  double x_max = stroke[0].x;
  double mean_y = 0.0;
  for (const auto& p : stroke) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    mean_y += p.y;
  }
  mean_y /= static_cast<double>(stroke.size());
  std::vector<std::string> out;
  for (const auto& f : ferns) {
    if (f.x_max >= x_min && f.x_min <= x_max && f.base_y > mean_y) out.push_back(f.id);
  }
  return out;
}

}  // namespace texterial
