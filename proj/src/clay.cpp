#include <algorithm>
#include <cmath>

#include "session_async.hpp"
#include "texterial/error.hpp"
#include "texterial/geometry.hpp"
#include "texterial/session.hpp"
#include "texterial/tags.hpp"

namespace texterial {

namespace {

struct EditPlan {
  PromptTemplate tmpl = PromptTemplate::Squeeze;
  MarkerKind marker = MarkerKind::Squeeze;
  CharRange range;
  Intensity intensity;
};

Point midpoint(Point a, Point b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

bool covers_all_words(const TextLayout& layout, CharRange range) {
  return !layout.words.empty() && range.start <= layout.words.front().range.start &&
         range.end >= layout.words.back().range.end;
}

std::vector<Point> xy_points(const std::vector<TimedPoint>& points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.xy());
  return out;
}

TextBlock moved(TextBlock block, Point delta) {
  block.position.x += delta.x;
  block.position.y += delta.y;
  return block;
}

}  // namespace

std::string Session::resolve_block(const GestureEvent& event) const {
  if (event.target) {
    if (current_.blocks.count(*event.target) == 0) throw Error(ErrorCode::UnknownBlock, *event.target);
    return *event.target;
  }
  const Point p = event.points.front().xy();
  for (const auto& [id, block] : current_.blocks) {
    const Rect r = block.bounds();
    if (p.x >= r.left() && p.x <= r.right() && p.y >= r.top() && p.y <= r.bottom()) return id;
  }
  // Strokes such as a tear may start outside the block they cross.
  if (event.points.size() > 1 && (event.kind == GestureKind::Rip || event.kind == GestureKind::Smudge)) {
    const auto path = xy_points(event.points);
    std::optional<std::string> best;
    double best_len = 0.0;
    for (const auto& [id, block] : current_.blocks) {
      const Rect r = block.bounds();
      double inside = 0.0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        const Point mid{(path[i - 1].x + path[i].x) / 2.0, (path[i - 1].y + path[i].y) / 2.0};
        if (mid.x >= r.left() && mid.x <= r.right() && mid.y >= r.top() && mid.y <= r.bottom()) {
          inside += distance(path[i - 1], path[i]);
        }
      }
      if (inside > best_len) {
        best_len = inside;
        best = id;
      }
    }
    if (best) return *best;
  }
  throw Error(ErrorCode::NoTarget, "no block under the gesture");
}

PendingOp Session::clay_edit(const GestureEvent& event, AsyncSpec s) {
  const std::string block_id = resolve_block(event);
  s.target = block_id;
  require_idle(block_id);
  const TextBlock& block = current_.blocks.at(block_id);
  const TextLayout layout = layout_block(block, config_.geometry);
  const auto& pts = event.points;

  EditPlan plan;
  switch (event.kind) {
    case GestureKind::Press: {
      const double hold = static_cast<double>(pts.back().t - pts.front().t);
      plan = {PromptTemplate::Squeeze, MarkerKind::Squeeze,
              press_extent(pts.front().xy(), config_.clay.press_radius, layout),
              Intensity::clamped(hold / config_.clay.press_full_hold_ms)};
      break;
    }
    case GestureKind::Pinch: {
      const double initial = distance(pts[0].xy(), pts[1].xy());
      const double final_span = distance(pts[2].xy(), pts[3].xy());
      if (!(final_span < initial)) return ignored(s, "fingers did not converge");
      const ScopedIntensity scoped =
          pinch_influence(midpoint(pts[0].xy(), pts[1].xy()), initial, final_span, layout, config_.geometry);
      plan = {PromptTemplate::Pinch, MarkerKind::Pinch, scoped.range, scoped.intensity};
      break;
    }
    case GestureKind::Stretch:
    case GestureKind::Squash: {
      // The span change decides the direction, whatever the recognizer said.
      const double initial = distance(pts[0].xy(), pts[1].xy());
      const double final_span = distance(pts[2].xy(), pts[3].xy());
      if (!(initial > 0.0)) throw Error(ErrorCode::InvalidArgument, "fingers start at the same point");
      if (final_span == initial) return ignored(s, "span unchanged");
      const CharRange scope = two_finger_scope(pts[0].xy(), pts[1].xy(), layout);
      if (final_span > initial) {
        plan = {PromptTemplate::Stretch, MarkerKind::Stretch, scope, Intensity::clamped(final_span / initial - 1.0)};
      } else {
        plan = {PromptTemplate::Squash, MarkerKind::Squash, scope, Intensity::clamped(1.0 - final_span / initial)};
      }
      break;
    }
    case GestureKind::Smudge: {
      const auto path = xy_points(pts);
      const ScopedIntensity scoped = smudge_extent(path, layout, config_.geometry);
      plan = {PromptTemplate::Distort, MarkerKind::Smudge, scoped.range, scoped.intensity};
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, "not a clay edit gesture");
  }

  const bool whole_text = (plan.tmpl == PromptTemplate::Stretch || plan.tmpl == PromptTemplate::Squash) &&
                          covers_all_words(layout, plan.range);
  const std::string segments =
      whole_text ? std::string() : emit_marked(block.text, plan.range, plan.marker, bracket_count(plan.intensity));
  const std::string prompt =
      clay_edit_prompt(plan.tmpl, {block.text, segments, plan.intensity, current_.writing_context});
  log_prompt(s.started_at, plan.tmpl, block_id, prompt);

  s.busy_keys = {block_id};
  CompletionRequest request{prompt, plan.tmpl, std::nullopt, s.op_id};
  auto gateway = gateway_;
  const std::string old_text = block.text;
  const GeometryConfig geometry = config_.geometry;
  return async_op<std::string>(
      std::move(s), [gateway, request] { return gateway->complete(request); },
      [block_id, old_text, geometry](SessionState& next, std::string& text, std::int64_t) {
        TextBlock& b = next.blocks.at(block_id);
        b.text = text;
        b.size = block_size(text, b.size.w, geometry);
        OpResult r;
        r.event = "op_completed";
        r.data = {{"block_id", block_id}, {"diff", to_json(word_diff(old_text, text))}, {"text", text}};
        return r;
      });
}

PendingOp Session::drag_block(const GestureEvent& event, AsyncSpec s) {
  const std::string dragged_id = resolve_block(event);
  s.target = dragged_id;
  require_idle(dragged_id);
  const Point delta{event.points.back().x - event.points.front().x, event.points.back().y - event.points.front().y};
  const TextBlock dragged = moved(current_.blocks.at(dragged_id), delta);

  // The block under the drop with the largest shared area receives the merge.
  std::optional<std::string> target_id;
  double best = 0.0;
  for (const auto& [id, block] : current_.blocks) {
    if (id == dragged_id) continue;
    const double area = dragged.bounds().intersection(block.bounds()).area();
    if (area > best) {
      best = area;
      target_id = id;
    }
  }

  if (!target_id) {
    if (delta.x == 0.0 && delta.y == 0.0) return ignored(s, "block did not move");
    SessionState next = current_;
    next.blocks.at(dragged_id).position = dragged.position;
    OpResult r;
    r.event = "op_completed";
    r.data = {{"block_id", dragged_id}, {"moved_to", {{"x", dragged.position.x}, {"y", dragged.position.y}}}};
    r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
    return sync_result(s, std::move(r));
  }

  require_idle(*target_id);
  const TextBlock& target = current_.blocks.at(*target_id);
  const TextLayout dragged_layout = layout_block(dragged, config_.geometry);
  const TextLayout target_layout = layout_block(target, config_.geometry);
  const CollisionResult hit = classify_collision(dragged_layout, target_layout, delta, config_.geometry);
  const auto& ctx = current_.writing_context;

  std::string prompt;
  PromptTemplate tmpl = PromptTemplate::FullBlend;
  switch (hit.kind) {
    case CollisionKind::VerticalTopBottom:
    case CollisionKind::VerticalBottomTop: {
      const bool dragged_on_top = hit.kind == CollisionKind::VerticalTopBottom;
      const std::string dragged_tagged = tag_lines(dragged_layout, hit.overlap_lines_dragged);
      const std::string target_tagged = tag_lines(target_layout, hit.overlap_lines_target);
      tmpl = PromptTemplate::VerticalCollision;
      prompt = dragged_on_top ? vertical_collision_prompt(dragged_tagged, target_tagged, hit.intensity, ctx)
                              : vertical_collision_prompt(target_tagged, dragged_tagged, hit.intensity, ctx);
      break;
    }
    case CollisionKind::FullBlend: {
      const double dc = dragged.bounds().center().y;
      const double tc = target.bounds().center().y;
      const bool dragged_first = dc < tc || (dc == tc && delta.y >= 0.0);
      prompt = dragged_first ? full_blend_prompt(dragged.text, target.text, hit.intensity, ctx)
                             : full_blend_prompt(target.text, dragged.text, hit.intensity, ctx);
      break;
    }
    case CollisionKind::HorizontalInsert: {
      tmpl = PromptTemplate::HorizontalCollision;
      prompt = horizontal_collision_prompt(tag_lines(target_layout, hit.overlap_lines_target),
                                           tag_lines(dragged_layout, hit.overlap_lines_dragged),
                                           hit.insert_position.value_or(0.5), hit.intensity, ctx, hit.anchor_line);
      break;
    }
  }
  log_prompt(s.started_at, tmpl, *target_id, prompt);

  s.busy_keys = {dragged_id, *target_id};
  s.target = dragged_id + "->" + *target_id;
  CompletionRequest request{prompt, tmpl, std::nullopt, s.op_id};
  auto gateway = gateway_;
  const GeometryConfig geometry = config_.geometry;
  const std::string target_text = target.text;
  const std::string collision = std::string(to_string(hit.kind));
  const double intensity = hit.intensity.value();
  return async_op<std::string>(
      std::move(s), [gateway, request] { return gateway->complete(request); },
      [dragged_id, tid = *target_id, geometry, target_text, collision, intensity](SessionState& next,
                                                                                   std::string& text, std::int64_t) {
        const TextBlock old_target = next.blocks.at(tid);
        next.blocks.erase(dragged_id);
        next.blocks.erase(tid);
        TextBlock merged;
        merged.id = next.allocate_id('b');
        merged.text = text;
        merged.position = old_target.position;
        merged.size = block_size(text, old_target.size.w, geometry);
        merged.origin = BlockOrigin::Merge;
        next.blocks.emplace(merged.id, merged);
        OpResult r;
        r.event = "op_completed";
        r.data = {{"block_id", merged.id},
                  {"merged_from", {dragged_id, tid}},
                  {"collision", collision},
                  {"intensity", intensity},
                  {"diff", to_json(word_diff(target_text, text))},
                  {"text", text}};
        return r;
      });
}

PendingOp Session::rip(const GestureEvent& event, AsyncSpec s) {
  const std::string block_id = resolve_block(event);
  s.target = block_id;
  require_idle(block_id);
  const TextBlock& block = current_.blocks.at(block_id);
  const TextLayout layout = layout_block(block, config_.geometry);
  const auto path = xy_points(event.points);
  const std::size_t k = rip_split_index(path, layout);

  SessionState next = current_;
  next.blocks.erase(block_id);
  TextBlock first;
  first.id = next.allocate_id('b');
  first.text = block.text.substr(0, k);
  first.position = block.position;
  first.size = block_size(first.text, block.size.w, config_.geometry);
  first.origin = BlockOrigin::Split;
  TextBlock second;
  second.id = next.allocate_id('b');
  second.text = block.text.substr(k);
  second.position = {block.position.x, first.bounds().bottom() + config_.clay.rip_gap};
  second.size = block_size(second.text, block.size.w, config_.geometry);
  second.origin = BlockOrigin::Split;
  next.blocks.emplace(first.id, first);
  next.blocks.emplace(second.id, second);

  OpResult r;
  r.event = "op_completed";
  r.data = {{"block_id", first.id}, {"block_ids", {first.id, second.id}}, {"split_index", k}};
  r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
  return sync_result(s, std::move(r));
}

}  // namespace texterial
