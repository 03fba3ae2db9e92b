#include <algorithm>
#include <set>

#include "session_async.hpp"
#include "texterial/error.hpp"
#include "texterial/geometry.hpp"
#include "texterial/session.hpp"

namespace texterial {

namespace {

std::int64_t effective_interval(const Fern& fern, std::int64_t now, const GardenConfig& cfg) {
  const bool watered = fern.watered_until_ms && now < *fern.watered_until_ms;
  return watered ? fern.base_interval_ms / cfg.watering_factor : fern.base_interval_ms;
}

Fern new_fern(SessionState& state, const std::string& seed, const std::string& dimension, Point at,
              std::int64_t t, const GardenConfig& cfg) {
  Fern f;
  f.id = state.allocate_id('f');
  f.seed = seed;
  f.dimension = dimension;
  f.position = at;
  f.base_interval_ms = cfg.base_interval_ms;
  f.planted_at_ms = t;
  f.next_due_ms = t;  // the first pair grows on the next tick
  return f;
}

Json fern_summary(const Fern& f) { return {{"fern_id", f.id}, {"seed", f.seed}, {"dimension", f.dimension}}; }

std::optional<Json> payload_json(const GestureEvent& event) {
  if (!event.payload) return std::nullopt;
  const std::string body = trim(*event.payload);
  if (body.empty() || (body.front() != '{' && body.front() != '[')) return std::nullopt;
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("payload is not valid JSON: ") + e.what());
  }
}

const std::string& require_target(const GestureEvent& event) {
  if (!event.target) throw Error(ErrorCode::InvalidArgument, std::string(to_string(event.kind)) + " needs a target");
  return *event.target;
}

}  // namespace

void Session::require_fern_idle(const std::string& fern_id) const { require_idle(fern_id); }

// A leaf's text reaches prompts of its own fern and of every fern it was
// grafted onto, so all of them must be idle before the leaf changes.
void Session::require_leaf_idle(const Leaf& leaf) const {
  require_idle(leaf.fern_id);
  for (const auto& [id, fern] : current_.ferns) {
    if (std::find(fern.grafted_history.begin(), fern.grafted_history.end(), leaf.id) != fern.grafted_history.end()) {
      require_idle(id);
    }
  }
}

PendingOp Session::grow_locked(const std::string& fern_id, AsyncSpec s) {
  auto it = current_.ferns.find(fern_id);
  if (it == current_.ferns.end()) throw Error(ErrorCode::UnknownFern, fern_id);
  require_fern_idle(fern_id);
  const Fern& fern = it->second;

  std::vector<std::string> imported;
  for (const auto& leaf_id : fern.grafted_history) imported.push_back(current_.leaves.at(leaf_id).full);
  const std::string root_line = root_context_line(imported);

  PromptTemplate tmpl = PromptTemplate::InitialIdeaPair;
  std::string prompt;
  if (fern.leaves.empty()) {
    prompt = initial_idea_pair_prompt(fern.seed, fern.dimension, root_line, current_.writing_context);
  } else {
    tmpl = PromptTemplate::GenerateIdeaPair;
    std::vector<Leaf> own;
    for (const auto& leaf_id : fern.leaves) own.push_back(current_.leaves.at(leaf_id));
    prompt = generate_idea_pair_prompt(fern.seed, fern.dimension, serialize_prior_ideas(own), root_line,
                                       current_.writing_context);
  }
  log_prompt(s.started_at, tmpl, fern_id, prompt);

  s.busy_keys = {fern_id};
  s.backoff_key = fern_id;
  CompletionRequest request{prompt, tmpl, std::nullopt, s.op_id};
  auto gateway = gateway_;
  const GardenConfig garden = config_.garden;
  return async_op<IdeaPair>(
      std::move(s), [gateway, request] { return gateway->complete_idea_pair(request); },
      [this, fern_id, prompt, garden](SessionState& next, IdeaPair& pair, std::int64_t t) {
        Fern& f = next.ferns.at(fern_id);
        std::vector<std::string> ids;
        for (const auto& idea : pair.ideas) {
          Leaf leaf;
          leaf.id = next.allocate_id('l');
          leaf.fern_id = fern_id;
          leaf.gist = idea.gist;
          leaf.full = idea.full;
          leaf.born_at_ms = t;
          ids.push_back(leaf.id);
          f.leaves.push_back(leaf.id);
          next.leaves.emplace(leaf.id, std::move(leaf));
        }
        f.checkpoints.push_back({ids[0], ids[1]});
        f.checkpoint_prompts.push_back(prompt);
        f.next_due_ms = t + effective_interval(f, t, garden);
        retry_after_.erase(fern_id);
        OpResult r;
        r.event = "fern_grown";
        r.data = {{"fern_id", fern_id},
                  {"checkpoint_index", f.checkpoints.size() - 1},
                  {"leaf_ids", ids},
                  {"warnings", pair.warnings}};
        return r;
      });
}

PendingOp Session::plant(const GestureEvent& event, AsyncSpec s) {
  const Point at = event.points.front().xy();
  if (!event.payload || is_blank(*event.payload)) throw Error(ErrorCode::BlankInput, "nothing to plant");

  if (auto direct = payload_json(event)) {
    // Direct seed and dimension, no model call.
    if (!direct->is_object() || !direct->contains("seed") || !(*direct)["seed"].is_string()) {
      throw Error(ErrorCode::InvalidArgument, "direct plant payload needs a string 'seed'");
    }
    std::string seed = trim((*direct)["seed"].get<std::string>());
    std::string dimension = direct->value("dimension", std::string());
    if (seed.empty()) throw Error(ErrorCode::BlankInput, "seed is blank");
    Json warnings = Json::array();
    if (word_count(seed) > kMaxSeedWords) {
      seed = truncate_words(seed, kMaxSeedWords);
      warnings.push_back("seed truncated to " + std::to_string(kMaxSeedWords) + " words");
    }
    dimension = trim(dimension);
    if (dimension.empty()) dimension = kDefaultDimension;
    if (word_count(dimension) > kMaxDimensionWords) {
      dimension = truncate_words(dimension, kMaxDimensionWords);
      warnings.push_back("dimension truncated to " + std::to_string(kMaxDimensionWords) + " words");
    }
    SessionState next = current_;
    const std::int64_t t = commit_time(s.started_at);
    Fern f = new_fern(next, seed, dimension, at, t, config_.garden);
    s.target = f.id;
    OpResult r;
    r.event = "op_completed";
    r.data = fern_summary(f);
    r.data["warnings"] = warnings;
    next.ferns.emplace(f.id, std::move(f));
    r.hash = commit(std::move(next), s.trace_event, t);
    return sync_result(s, std::move(r));
  }

  const std::string prompt = voice_plant_prompt(*event.payload, current_.writing_context);
  log_prompt(s.started_at, PromptTemplate::VoicePlant, "", prompt);
  CompletionRequest request{prompt, PromptTemplate::VoicePlant, std::nullopt, s.op_id};
  auto gateway = gateway_;
  const GardenConfig garden = config_.garden;
  return async_op<SeedDimension>(
      std::move(s), [gateway, request] { return gateway->complete_seed_dimension(request); },
      [at, garden](SessionState& next, SeedDimension& sd, std::int64_t t) {
        Fern f = new_fern(next, sd.seed, sd.dimension, at, t, garden);
        OpResult r;
        r.event = "op_completed";
        r.data = fern_summary(f);
        r.data["warnings"] = sd.warnings;
        next.ferns.emplace(f.id, std::move(f));
        return r;
      });
}

PendingOp Session::water(const GestureEvent& event, AsyncSpec s) {
  std::vector<Point> stroke;
  for (const auto& p : event.points) stroke.push_back(p.xy());
  std::vector<FernExtent> extents;
  for (const auto& [id, f] : current_.ferns) {
    extents.push_back({id, f.position.x - config_.garden.fern_half_width,
                       f.position.x + config_.garden.fern_half_width, f.position.y});
  }
  const auto targets = water_targets(stroke, extents);
  if (targets.empty()) return ignored(s, "no fern below the stroke");

  SessionState next = current_;
  const std::int64_t t = commit_time(s.started_at);
  const auto& g = config_.garden;
  for (const auto& id : targets) {
    Fern& f = next.ferns.at(id);
    const std::int64_t until = t + g.watering_window_ms;
    f.watered_until_ms = f.watered_until_ms ? std::max(*f.watered_until_ms, until) : until;
    f.next_due_ms = std::min(f.next_due_ms, t + f.base_interval_ms / g.watering_factor);
  }
  OpResult r;
  r.event = "op_completed";
  r.data = {{"watered", targets}};
  r.hash = commit(std::move(next), s.trace_event, t);
  return sync_result(s, std::move(r));
}

PendingOp Session::prune(const GestureEvent& event, AsyncSpec s) {
  const std::string& leaf_id = require_target(event);
  auto it = current_.leaves.find(leaf_id);
  if (it == current_.leaves.end()) throw Error(ErrorCode::UnknownLeaf, leaf_id);
  const Leaf& leaf = it->second;
  if (leaf.status == LeafStatus::Pruned) throw Error(ErrorCode::AlreadyPruned, leaf_id);
  if (!leaf.is_live()) throw Error(ErrorCode::InvalidState, leaf_id + " is " + std::string(to_string(leaf.status)));
  require_leaf_idle(leaf);

  SessionState next = current_;
  next.leaves.at(leaf_id).status = LeafStatus::Pruned;
  OpResult r;
  r.event = "op_completed";
  r.data = {{"leaf_id", leaf_id}, {"status", "Pruned"}};
  r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
  return sync_result(s, std::move(r));
}

PendingOp Session::preserve(const GestureEvent& event, AsyncSpec s) {
  const std::string& leaf_id = require_target(event);
  auto it = current_.leaves.find(leaf_id);
  if (it == current_.leaves.end()) throw Error(ErrorCode::UnknownLeaf, leaf_id);
  const Leaf& leaf = it->second;
  if (leaf.status == LeafStatus::Preserved) return ignored(s, "already preserved");
  if (leaf.status != LeafStatus::Active) {
    throw Error(ErrorCode::InvalidState, leaf_id + " is " + std::string(to_string(leaf.status)));
  }
  require_leaf_idle(leaf);

  SessionState next = current_;
  next.leaves.at(leaf_id).status = LeafStatus::Preserved;
  OpResult r;
  r.event = "op_completed";
  r.data = {{"leaf_id", leaf_id}, {"status", "Preserved"}};
  r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
  return sync_result(s, std::move(r));
}

PendingOp Session::edit_leaf(const GestureEvent& event, AsyncSpec s) {
  const std::string& leaf_id = require_target(event);
  auto it = current_.leaves.find(leaf_id);
  if (it == current_.leaves.end()) throw Error(ErrorCode::UnknownLeaf, leaf_id);
  const Leaf& leaf = it->second;
  if (leaf.status == LeafStatus::Pruned || leaf.status == LeafStatus::Composted) {
    throw Error(ErrorCode::InvalidState, leaf_id + " is " + std::string(to_string(leaf.status)));
  }
  const auto edit = payload_json(event);
  if (!edit || !edit->is_object() || (!edit->contains("gist") && !edit->contains("full"))) {
    throw Error(ErrorCode::InvalidArgument, "EditLeaf payload needs {\"gist\"} and/or {\"full\"}");
  }
  require_leaf_idle(leaf);

  SessionState next = current_;
  Leaf& target = next.leaves.at(leaf_id);
  Json warnings = Json::array();
  for (const char* key : {"gist", "full"}) {
    if (!edit->contains(key)) continue;
    if (!(*edit)[key].is_string()) throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be a string");
    const std::string value = trim((*edit)[key].get<std::string>());
    if (value.empty()) throw Error(ErrorCode::BlankInput, std::string(key) + " is blank");
    if (std::string_view(key) == "full" && word_count(value) > kMaxFullWords) {
      throw Error(ErrorCode::LengthViolation, "full text exceeds " + std::to_string(kMaxFullWords) + " words");
    }
    if (std::string_view(key) == "gist" && word_count(value) > kMaxGistWords) {
      warnings.push_back("gist exceeds " + std::to_string(kMaxGistWords) + " words");
    }
    (std::string_view(key) == "gist" ? target.gist : target.full) = value;
  }
  OpResult r;
  r.event = "op_completed";
  r.data = {{"leaf_id", leaf_id}, {"gist", target.gist}, {"full", target.full}, {"warnings", warnings}};
  r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
  return sync_result(s, std::move(r));
}

// Drop onto another fern grafts; drop onto soil composts two or more leaves,
// or replants a single leaf as a new fern with the same dimension.
PendingOp Session::drop_leaf(const GestureEvent& event, AsyncSpec s) {
  const std::string& leaf_id = require_target(event);
  if (current_.leaves.count(leaf_id) == 0) throw Error(ErrorCode::UnknownLeaf, leaf_id);
  const Point drop = event.points.back().xy();

  std::vector<std::string> leaf_ids{leaf_id};
  std::optional<std::string> onto;
  if (auto extra = payload_json(event)) {
    const Json* list = extra->is_array() ? &*extra : nullptr;
    if (extra->is_object()) {
      if (extra->contains("fern")) onto = (*extra)["fern"].get<std::string>();
      if (extra->contains("leaves")) list = &(*extra)["leaves"];
    }
    if (list != nullptr) {
      for (const auto& id : *list) {
        if (!id.is_string()) throw Error(ErrorCode::InvalidArgument, "leaf ids must be strings");
        if (std::find(leaf_ids.begin(), leaf_ids.end(), id.get<std::string>()) == leaf_ids.end()) {
          leaf_ids.push_back(id.get<std::string>());
        }
      }
    }
  }
  if (!onto) {
    double best = 0.0;
    for (const auto& [id, f] : current_.ferns) {
      const auto& g = config_.garden;
      const bool inside = drop.x >= f.position.x - g.fern_half_width && drop.x <= f.position.x + g.fern_half_width &&
                          drop.y <= f.position.y && drop.y >= f.position.y - g.fern_height;
      const double d = distance(drop, f.position);
      if (inside && (!onto || d < best)) {
        onto = id;
        best = d;
      }
    }
  }

  for (const auto& id : leaf_ids) {
    auto it = current_.leaves.find(id);
    if (it == current_.leaves.end()) throw Error(ErrorCode::UnknownLeaf, id);
    if (!it->second.is_live()) {
      throw Error(ErrorCode::InvalidState, id + " is " + std::string(to_string(it->second.status)));
    }
    require_leaf_idle(it->second);
  }

  if (onto) {
    // Graft.
    if (leaf_ids.size() != 1) throw Error(ErrorCode::InvalidArgument, "graft moves one leaf at a time");
    if (current_.ferns.count(*onto) == 0) throw Error(ErrorCode::UnknownFern, *onto);
    const Leaf& leaf = current_.leaves.at(leaf_id);
    if (leaf.fern_id == *onto) throw Error(ErrorCode::SameFern, leaf_id + " already belongs to " + *onto);
    require_fern_idle(*onto);
    SessionState next = current_;
    next.leaves.at(leaf_id).status = LeafStatus::Grafted;
    next.ferns.at(*onto).grafted_history.push_back(leaf_id);
    s.target = leaf_id + "->" + *onto;
    OpResult r;
    r.event = "op_completed";
    r.data = {{"leaf_id", leaf_id}, {"fern_id", *onto}, {"action", "graft"}};
    r.hash = commit(std::move(next), s.trace_event, commit_time(s.started_at));
    return sync_result(s, std::move(r));
  }

  if (leaf_ids.size() == 1) {
    // Replant: the leaf's lineage moves into a fresh fern.
    const Leaf& leaf = current_.leaves.at(leaf_id);
    SessionState next = current_;
    const std::int64_t t = commit_time(s.started_at);
    Fern f = new_fern(next, truncate_words(leaf.full, kMaxSeedWords), next.ferns.at(leaf.fern_id).dimension, drop,
                      t, config_.garden);
    f.grafted_history.push_back(leaf_id);
    next.leaves.at(leaf_id).status = LeafStatus::Grafted;
    OpResult r;
    r.event = "op_completed";
    r.data = fern_summary(f);
    r.data["action"] = "replant";
    r.data["leaf_id"] = leaf_id;
    next.ferns.emplace(f.id, std::move(f));
    r.hash = commit(std::move(next), s.trace_event, t);
    return sync_result(s, std::move(r));
  }

  // Compost.
  std::vector<std::string> fulls;
  std::set<std::string> source_ferns;
  for (const auto& id : leaf_ids) {
    fulls.push_back(current_.leaves.at(id).full);
    source_ferns.insert(current_.leaves.at(id).fern_id);
  }
  const std::string prompt = root_combine_prompt(serialize_idea_lines(fulls), current_.writing_context);
  log_prompt(s.started_at, PromptTemplate::RootCombine, leaf_id, prompt);
  s.busy_keys.assign(source_ferns.begin(), source_ferns.end());
  CompletionRequest request{prompt, PromptTemplate::RootCombine, std::nullopt, s.op_id};
  auto gateway = gateway_;
  const GardenConfig garden = config_.garden;
  return async_op<SeedDimension>(
      std::move(s), [gateway, request] { return gateway->complete_seed_dimension(request); },
      [leaf_ids, drop, garden](SessionState& next, SeedDimension& sd, std::int64_t t) {
        for (const auto& id : leaf_ids) next.leaves.at(id).status = LeafStatus::Composted;
        Fern f = new_fern(next, sd.seed, sd.dimension, drop, t, garden);
        OpResult r;
        r.event = "op_completed";
        r.data = fern_summary(f);
        r.data["action"] = "compost";
        r.data["composted"] = leaf_ids;
        r.data["warnings"] = sd.warnings;
        next.ferns.emplace(f.id, std::move(f));
        return r;
      });
}

}  // namespace texterial
