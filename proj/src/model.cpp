#include "texterial/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include "texterial/error.hpp"

namespace texterial {

bool Rect::touches(const Rect& other) const {
  return left() <= other.right() && other.left() <= right() && top() <= other.bottom() &&
         other.top() <= bottom();
}

Rect Rect::intersection(const Rect& other) const {
  const double l = std::max(left(), other.left());
  const double t = std::max(top(), other.top());
  const double r = std::min(right(), other.right());
  const double b = std::min(bottom(), other.bottom());
  if (r <= l || b <= t) return {l, t, 0.0, 0.0};
  return {l, t, r - l, b - t};
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(OperationKind kind) {
  switch (kind) {
    case OperationKind::Compose: return "Compose";
    case OperationKind::Isolate: return "Isolate";
    case OperationKind::Abstract: return "Abstract";
    case OperationKind::Concretize: return "Concretize";
    case OperationKind::Ideate: return "Ideate";
    case OperationKind::Condense: return "Condense";
    case OperationKind::Elaborate: return "Elaborate";
    case OperationKind::Transform: return "Transform";
  }
  return "?";
}

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::Semantics: return "Semantics";
    case Layer::Structure: return "Structure";
    case Layer::Style: return "Style";
  }
  return "?";
}

std::optional<OperationKind> inverse_of(OperationKind kind) {
  using K = OperationKind;
  static constexpr std::array<std::pair<K, K>, 3> kPairs{{
      {K::Compose, K::Isolate},
      {K::Abstract, K::Concretize},
      {K::Condense, K::Elaborate},
  }};
  for (const auto& [op, inv] : kPairs) {
    if (kind == op) return inv;
    if (kind == inv) return op;
  }
  return std::nullopt;
}

OperationKind operation_for(Interaction interaction) {
  using I = Interaction;
  using K = OperationKind;
  switch (interaction) {
    case I::Squeeze: return K::Elaborate;
    case I::MergeLowOverlap: return K::Compose;
    case I::MergeHighOverlap: return K::Transform;
    case I::Smudge: return K::Abstract;
    case I::Pinch: return K::Concretize;
    case I::Rip: return K::Isolate;
    case I::Stretch: return K::Elaborate;
    case I::Squash: return K::Condense;
    case I::Plant: return K::Ideate;
    case I::Water: return K::Ideate;
    case I::Prune: return K::Isolate;
    case I::Graft: return K::Compose;
    case I::Compost: return K::Compose;
  }
  return K::Transform;
}

Layer layer_for(Interaction interaction) {
  using I = Interaction;
  switch (interaction) {
    case I::Squeeze:
    case I::Smudge:
      return Layer::Style;
    case I::MergeLowOverlap:
    case I::MergeHighOverlap:
    case I::Rip:
    case I::Stretch:
    case I::Squash:
      return Layer::Structure;
    default:
      return Layer::Semantics;
  }
}

std::string_view to_string(Interaction interaction) {
  using I = Interaction;
  switch (interaction) {
    case I::Squeeze: return "Squeeze";
    case I::MergeLowOverlap: return "MergeLowOverlap";
    case I::MergeHighOverlap: return "MergeHighOverlap";
    case I::Smudge: return "Smudge";
    case I::Pinch: return "Pinch";
    case I::Rip: return "Rip";
    case I::Stretch: return "Stretch";
    case I::Squash: return "Squash";
    case I::Plant: return "Plant";
    case I::Water: return "Water";
    case I::Prune: return "Prune";
    case I::Graft: return "Graft";
    case I::Compost: return "Compost";
  }
  return "?";
}

Intensity::Intensity(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "intensity outside [0,1]: " + std::to_string(value));
  }
}

Intensity Intensity::clamped(double value) {
  if (std::isnan(value)) return Intensity(0.0);
  return Intensity(std::clamp(value, 0.0, 1.0));
}

int Intensity::percent() const { return static_cast<int>(std::lround(value_ * 100.0)); }

std::string_view to_string(BlockOrigin origin) {
  switch (origin) {
    case BlockOrigin::Voice: return "Voice";
    case BlockOrigin::Manual: return "Manual";
    case BlockOrigin::Split: return "Split";
    case BlockOrigin::Merge: return "Merge";
  }
  return "?";
}

BlockOrigin block_origin_from_string(std::string_view name) {
  for (auto o : {BlockOrigin::Voice, BlockOrigin::Manual, BlockOrigin::Split, BlockOrigin::Merge}) {
    if (to_string(o) == name) return o;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown block origin '" + std::string(name) + "'");
}

namespace {

constexpr std::array<std::pair<GestureKind, std::string_view>, 14> kGestureNames{{
    {GestureKind::Press, "Press"},
    {GestureKind::DragBlock, "DragBlock"},
    {GestureKind::Pinch, "Pinch"},
    {GestureKind::Smudge, "Smudge"},
    {GestureKind::Stretch, "Stretch"},
    {GestureKind::Squash, "Squash"},
    {GestureKind::Rip, "Rip"},
    {GestureKind::WaterLine, "WaterLine"},
    {GestureKind::PlantPress, "PlantPress"},
    {GestureKind::PluckLeaf, "PluckLeaf"},
    {GestureKind::DropLeaf, "DropLeaf"},
    {GestureKind::PreserveHold, "PreserveHold"},
    {GestureKind::EditLeaf, "EditLeaf"},
    {GestureKind::VoiceUtterance, "VoiceUtterance"},
}};

}  // namespace

std::string_view to_string(GestureKind kind) {
  for (const auto& [k, name] : kGestureNames) {
    if (k == kind) return name;
  }
  return "?";
}

GestureKind gesture_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kGestureNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown gesture kind '" + std::string(name) + "'");
}

bool is_spatial(GestureKind kind) {
  switch (kind) {
    case GestureKind::PluckLeaf:
    case GestureKind::PreserveHold:
    case GestureKind::EditLeaf:
    case GestureKind::VoiceUtterance:
      return false;
    default:
      return true;
  }
}

void GestureEvent::validate() const {
  if (is_spatial(kind) && points.empty()) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " requires points");
  }
  const bool two_finger = kind == GestureKind::Pinch || kind == GestureKind::Stretch || kind == GestureKind::Squash;
  if (two_finger && points.size() != 4) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(kind)) + " carries exactly four points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].t < points[i - 1].t) {
      throw Error(ErrorCode::InvalidArgument, "timestamps decrease within one event");
    }
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite point");
    }
  }
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

}  // namespace texterial
