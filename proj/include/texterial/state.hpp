#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "texterial/model.hpp"

namespace texterial {

using Json = nlohmann::json;

enum class LeafStatus { Active, Pruned, Preserved, Grafted, Composted };

std::string_view to_string(LeafStatus status);
LeafStatus leaf_status_from_string(std::string_view name);

struct Leaf {
  std::string id;
  std::string fern_id;
  std::string gist;
  std::string full;
  LeafStatus status = LeafStatus::Active;
  std::int64_t born_at_ms = 0;

  /// Active or Preserved: the leaf still feeds prompts of its own fern.
  bool is_live() const { return status == LeafStatus::Active || status == LeafStatus::Preserved; }
};

/// The leaf pair produced by one growth step.
struct Checkpoint {
  std::string first;
  std::string second;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct Fern {
  std::string id;
  std::string seed;
  std::string dimension;
  Point position;
  std::vector<std::string> leaves;  // leaf ids in generation order
  std::vector<Checkpoint> checkpoints;
  std::vector<std::string> grafted_history;  // leaf ids imported from other ferns
  std::int64_t base_interval_ms = 45'000;
  std::optional<std::int64_t> watered_until_ms;
  std::int64_t next_due_ms = 0;
  std::int64_t planted_at_ms = 0;
  /// One entry per checkpoint: the prompt that produced it, for audit.
  std::vector<std::string> checkpoint_prompts;
};

/// Everything undo/redo restores and the canonical hash covers.
struct SessionState {
  std::optional<std::string> writing_context;
  std::map<std::string, TextBlock> blocks;
  std::map<std::string, Fern> ferns;
  std::map<std::string, Leaf> leaves;
  /// Logical time of the latest committed change.
  std::int64_t clock_ms = 0;
  std::uint64_t next_id = 1;

  std::string allocate_id(char prefix);
};

Json to_json(const TextBlock& block);
Json to_json(const Leaf& leaf);
Json to_json(const Fern& fern);
Json to_json(const SessionState& state);

TextBlock block_from_json(const Json& j);
Leaf leaf_from_json(const Json& j);
Fern fern_from_json(const Json& j);
SessionState state_from_json(const Json& j);

Json to_json(const GestureEvent& event);
GestureEvent gesture_from_json(const Json& j);

/// UTF-8 JSON with lexicographically sorted keys, no insignificant whitespace,
/// and every real rendered with exactly six decimal places.
std::string canonical_dump(const Json& value);

/// Lowercase hex SHA-256 of canonical_dump(value).
std::string canonical_hash(const Json& value);
std::string canonical_hash(const SessionState& state);

std::string sha256_hex(std::string_view data);

}  // namespace texterial
