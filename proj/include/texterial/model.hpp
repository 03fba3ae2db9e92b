#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace texterial {

// ---------------------------------------------------------------------------
// Geometry primitives (canvas units, y grows downward)
// ---------------------------------------------------------------------------

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// A pointer sample; `t` is milliseconds on the session clock.
struct TimedPoint {
  double x = 0.0;
  double y = 0.0;
  std::int64_t t = 0;

  Point xy() const { return {x, y}; }
  friend bool operator==(const TimedPoint&, const TimedPoint&) = default;
};

struct Size {
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const Size&, const Size&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return x; }
  double top() const { return y; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  Point center() const { return {x + w / 2.0, y + h / 2.0}; }

  /// Closed-set intersection test (touching edges count).
  bool touches(const Rect& other) const;
  /// Intersection rectangle; empty (w or h == 0) when disjoint.
  Rect intersection(const Rect& other) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

double distance(Point a, Point b);

// ---------------------------------------------------------------------------
// Operation taxonomy
// ---------------------------------------------------------------------------

/// The five generic verbs and their inverses.
enum class OperationKind {
  Compose,     // f1
  Isolate,     // f1^-1
  Abstract,    // f2
  Concretize,  // f2^-1
  Ideate,      // f3
  Condense,    // f4
  Elaborate,   // f4^-1
  Transform,   // f5
};

/// Component of text an operation acts on. Carried in logs only.
enum class Layer { Semantics, Structure, Style };

std::string_view to_string(OperationKind kind);
std::string_view to_string(Layer layer);

/// The registered inverse, or nullopt for Ideate and Transform.
std::optional<OperationKind> inverse_of(OperationKind kind);

/// Every user-facing interaction in both probes.
enum class Interaction {
  Squeeze,
  MergeLowOverlap,
  MergeHighOverlap,
  Smudge,
  Pinch,
  Rip,
  Stretch,
  Squash,
  Plant,
  Water,
  Prune,
  Graft,
  Compost,
};

OperationKind operation_for(Interaction interaction);
Layer layer_for(Interaction interaction);
std::string_view to_string(Interaction interaction);

// ---------------------------------------------------------------------------
// Intensity
// ---------------------------------------------------------------------------

/// A scalar in [0, 1]. Construction outside the range throws InvalidArgument.
class Intensity {
 public:
  constexpr Intensity() = default;
  explicit Intensity(double value);

  /// Clamps into [0, 1] instead of rejecting; NaN becomes 0.
  static Intensity clamped(double value);

  double value() const { return value_; }
  int percent() const;

  friend bool operator==(const Intensity&, const Intensity&) = default;

 private:
  double value_ = 0.0;
};

// ---------------------------------------------------------------------------
// Clay blocks and gesture events
// ---------------------------------------------------------------------------

enum class BlockOrigin { Voice, Manual, Split, Merge };

std::string_view to_string(BlockOrigin origin);
BlockOrigin block_origin_from_string(std::string_view name);

struct TextBlock {
  std::string id;
  std::string text;
  Point position;
  Size size;
  BlockOrigin origin = BlockOrigin::Manual;
  // Transient: mirrors the session's in-flight set and is never serialized.
  bool busy = false;

  Rect bounds() const { return {position.x, position.y, size.w, size.h}; }
};

enum class GestureKind {
  Press,
  DragBlock,
  Pinch,
  Smudge,
  Stretch,
  Squash,
  Rip,
  WaterLine,
  PlantPress,
  PluckLeaf,
  DropLeaf,
  PreserveHold,
  EditLeaf,
  VoiceUtterance,
};

std::string_view to_string(GestureKind kind);
GestureKind gesture_kind_from_string(std::string_view name);

/// True for kinds whose meaning depends on where the pointer went.
bool is_spatial(GestureKind kind);

/// A recognized gesture. Two-finger kinds (Pinch, Stretch, Squash) carry four
/// points: finger 1 start, finger 2 start, finger 1 end, finger 2 end.
struct GestureEvent {
  GestureKind kind = GestureKind::Press;
  std::vector<TimedPoint> points;
  std::optional<std::string> target;
  std::optional<std::string> payload;

  /// Throws InvalidArgument when points are missing for a spatial kind or
  /// timestamps decrease.
  void validate() const;
};

bool is_blank(std::string_view text);
std::string trim(std::string_view text);
std::size_t word_count(std::string_view text);

}  // namespace texterial
