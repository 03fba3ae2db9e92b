#include "texterial/state.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>

#include "texterial/error.hpp"

namespace texterial {

std::string_view to_string(LeafStatus status) {
  switch (status) {
    case LeafStatus::Active: return "Active";
    case LeafStatus::Pruned: return "Pruned";
    case LeafStatus::Preserved: return "Preserved";
    case LeafStatus::Grafted: return "Grafted";
    case LeafStatus::Composted: return "Composted";
  }
  return "?";
}

LeafStatus leaf_status_from_string(std::string_view name) {
  for (auto s : {LeafStatus::Active, LeafStatus::Pruned, LeafStatus::Preserved, LeafStatus::Grafted,
                 LeafStatus::Composted}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown leaf status '" + std::string(name) + "'");
}

std::string SessionState::allocate_id(char prefix) {
  return std::string(1, prefix) + std::to_string(next_id++);
}

namespace {

Json point_json(Point p) { return Json{{"x", p.x}, {"y", p.y}}; }
Point point_from(const Json& j) { return {j.at("x").get<double>(), j.at("y").get<double>()}; }

template <typename T>
std::optional<T> optional_at(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

Json to_json(const TextBlock& block) {
  return Json{{"id", block.id},
              {"text", block.text},
              {"position", point_json(block.position)},
              {"size", Json{{"w", block.size.w}, {"h", block.size.h}}},
              {"origin", to_string(block.origin)}};
}

TextBlock block_from_json(const Json& j) {
  TextBlock b;
  b.id = j.at("id").get<std::string>();
  b.text = j.at("text").get<std::string>();
  b.position = point_from(j.at("position"));
  b.size = {j.at("size").at("w").get<double>(), j.at("size").at("h").get<double>()};
  b.origin = block_origin_from_string(j.at("origin").get<std::string>());
  return b;
}

Json to_json(const Leaf& leaf) {
  return Json{{"id", leaf.id},
              {"fern_id", leaf.fern_id},
              {"gist", leaf.gist},
              {"full", leaf.full},
              {"status", to_string(leaf.status)},
              {"born_at_ms", leaf.born_at_ms}};
}

Leaf leaf_from_json(const Json& j) {
  Leaf l;
  l.id = j.at("id").get<std::string>();
  l.fern_id = j.at("fern_id").get<std::string>();
  l.gist = j.at("gist").get<std::string>();
  l.full = j.at("full").get<std::string>();
  l.status = leaf_status_from_string(j.at("status").get<std::string>());
  l.born_at_ms = j.at("born_at_ms").get<std::int64_t>();
  return l;
}

Json to_json(const Fern& fern) {
  Json checkpoints = Json::array();
  for (const auto& c : fern.checkpoints) checkpoints.push_back(Json::array({c.first, c.second}));
  Json j{{"id", fern.id},
         {"seed", fern.seed},
         {"dimension", fern.dimension},
         {"position", point_json(fern.position)},
         {"leaves", fern.leaves},
         {"checkpoints", checkpoints},
         {"grafted_history", fern.grafted_history},
         {"base_interval_ms", fern.base_interval_ms},
         {"next_due_ms", fern.next_due_ms},
         {"planted_at_ms", fern.planted_at_ms},
         {"checkpoint_prompts", fern.checkpoint_prompts}};
  j["watered_until_ms"] = fern.watered_until_ms ? Json(*fern.watered_until_ms) : Json(nullptr);
  return j;
}

Fern fern_from_json(const Json& j) {
  Fern f;
  f.id = j.at("id").get<std::string>();
  f.seed = j.at("seed").get<std::string>();
  f.dimension = j.at("dimension").get<std::string>();
  f.position = point_from(j.at("position"));
  f.leaves = j.at("leaves").get<std::vector<std::string>>();
  for (const auto& c : j.at("checkpoints")) {
    f.checkpoints.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>()});
  }
  f.grafted_history = j.at("grafted_history").get<std::vector<std::string>>();
  f.base_interval_ms = j.at("base_interval_ms").get<std::int64_t>();
  f.next_due_ms = j.at("next_due_ms").get<std::int64_t>();
  f.planted_at_ms = j.at("planted_at_ms").get<std::int64_t>();
  f.watered_until_ms = optional_at<std::int64_t>(j, "watered_until_ms");
  f.checkpoint_prompts = j.at("checkpoint_prompts").get<std::vector<std::string>>();
  return f;
}

Json to_json(const SessionState& state) {
  Json blocks = Json::object();
  for (const auto& [id, b] : state.blocks) blocks[id] = to_json(b);
  Json ferns = Json::object();
  for (const auto& [id, f] : state.ferns) ferns[id] = to_json(f);
  Json leaves = Json::object();
  for (const auto& [id, l] : state.leaves) leaves[id] = to_json(l);
  return Json{{"writing_context", state.writing_context ? Json(*state.writing_context) : Json(nullptr)},
              {"blocks", blocks},
              {"ferns", ferns},
              {"leaves", leaves},
              {"clock_ms", state.clock_ms},
              {"next_id", state.next_id}};
}

SessionState state_from_json(const Json& j) {
  SessionState s;
  s.writing_context = optional_at<std::string>(j, "writing_context");
  for (const auto& [id, b] : j.at("blocks").items()) s.blocks.emplace(id, block_from_json(b));
  for (const auto& [id, f] : j.at("ferns").items()) s.ferns.emplace(id, fern_from_json(f));
  for (const auto& [id, l] : j.at("leaves").items()) s.leaves.emplace(id, leaf_from_json(l));
  s.clock_ms = j.at("clock_ms").get<std::int64_t>();
  s.next_id = j.at("next_id").get<std::uint64_t>();
  return s;
}

Json to_json(const GestureEvent& event) {
  Json points = Json::array();
  for (const auto& p : event.points) points.push_back(Json{{"x", p.x}, {"y", p.y}, {"t", p.t}});
  Json j{{"kind", to_string(event.kind)}, {"points", points}};
  if (event.target) j["target"] = *event.target;
  if (event.payload) j["payload"] = *event.payload;
  return j;
}

GestureEvent gesture_from_json(const Json& j) {
  try {
    GestureEvent e;
    e.kind = gesture_kind_from_string(j.at("kind").get<std::string>());
    if (auto it = j.find("points"); it != j.end()) {
      for (const auto& p : *it) {
        e.points.push_back({p.at("x").get<double>(), p.at("y").get<double>(),
                            p.contains("t") ? p.at("t").get<std::int64_t>() : 0});
      }
    }
    e.target = optional_at<std::string>(j, "target");
    e.payload = optional_at<std::string>(j, "payload");
    e.validate();
    return e;
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed gesture event: ") + ex.what());
  }
}

namespace {

void dump_real(double v, std::string& out) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string_view s(buf);
  if (s == "-0.000000") s = "0.000000";
  out += s;
}

void dump_into(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      // nlohmann's default object is a std::map, so iteration is key-sorted.
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ',';
        first = false;
        dump_into(e, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      dump_real(v.get<double>(), out);
      break;
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_into(value, out);
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string canonical_hash(const Json& value) { return sha256_hex(canonical_dump(value)); }

std::string canonical_hash(const SessionState& state) { return canonical_hash(to_json(state)); }

}  // namespace texterial
