#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "texterial/diff.hpp"
#include "texterial/error.hpp"
#include "texterial/geometry.hpp"
#include "texterial/persistence.hpp"
#include "texterial/prompts.hpp"
#include "texterial/replay.hpp"
#include "texterial/tags.hpp"

namespace oracles {

using namespace texterial;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

std::size_t below(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words{
      "duck",   "pond",    "reed",   "morning", "quiet",  "brave",   "little", "river",  "stone",  "wind",
      "sang",   "swam",    "under",  "bright",  "old",    "mill",    "fox",    "watched", "golden", "feather",
      "across", "through", "softly", "clouds",  "garden", "lantern", "paper",  "ripple", "shore",  "night",
      "café",   "naïve",   "a<b",    "x>y",     "back\\slash", "5/8",  "it's",   "\"quoted\"", "tea-time", "ok"};
  return words;
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::vector<std::string> live_leaf_ids(const SessionState& st) {
  std::vector<std::string> out;
  for (const auto& [id, leaf] : st.leaves) {
    if (leaf.is_live()) out.push_back(id);
  }
  return out;
}

template <typename Map>
std::vector<std::string> keys_of(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [k, _] : m) out.push_back(k);
  return out;
}

}  // namespace

void Outcome::fail(const std::string& why) {
  if (failures == 0) first_failure = why;
  ++failures;
}

void Outcome::merge(const Outcome& other) {
  if (failures == 0 && other.failures > 0) first_failure = other.first_failure;
  cases += other.cases;
  failures += other.failures;
  seconds += other.seconds;
}

Harness::Harness(SessionState seed, EngineConfig config)
    : clock(std::make_shared<ScriptedClock>(seed.clock_ms)),
      gateway(std::make_shared<Gateway>(std::make_shared<MockProvider>(), config.gateway)) {
  session = std::make_unique<Session>("test", std::move(seed), gateway, config, clock);
}

GestureEvent press(Point at, std::int64_t t, std::int64_t hold_ms) {
  return {GestureKind::Press, {{at.x, at.y, t}, {at.x, at.y, t + hold_ms}}, std::nullopt, std::nullopt};
}

GestureEvent two_finger(GestureKind kind, Point a0, Point b0, Point a1, Point b1, std::int64_t t) {
  return {kind, {{a0.x, a0.y, t}, {b0.x, b0.y, t}, {a1.x, a1.y, t + 300}, {b1.x, b1.y, t + 300}}, std::nullopt,
          std::nullopt};
}

GestureEvent stroke(GestureKind kind, const std::vector<Point>& path, std::int64_t t) {
  GestureEvent e{kind, {}, std::nullopt, std::nullopt};
  for (std::size_t i = 0; i < path.size(); ++i) {
    e.points.push_back({path[i].x, path[i].y, t + static_cast<std::int64_t>(i) * 16});
  }
  return e;
}

GestureEvent drag(Point from, Point to, std::int64_t t) { return stroke(GestureKind::DragBlock, {from, to}, t); }

GestureEvent plant(Point at, const std::string& payload, std::int64_t t) {
  return {GestureKind::PlantPress, {{at.x, at.y, t}, {at.x, at.y, t + 800}}, std::nullopt, payload};
}

GestureEvent leaf_gesture(GestureKind kind, const std::string& leaf, std::optional<std::string> payload) {
  return {kind, {}, leaf, std::move(payload)};
}

GestureEvent drop_leaf(const std::string& leaf, Point at, std::int64_t t, std::optional<std::string> payload) {
  return {GestureKind::DropLeaf, {{at.x, at.y, t}}, leaf, std::move(payload)};
}

std::string random_sentence(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words) {
  const std::size_t n = min_words + below(rng, max_words - min_words + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += i == 0 ? capitalize(pick(rng, vocabulary())) : pick(rng, vocabulary());
  }
  static const std::vector<std::string> enders{".", ".", ".", "!", "?"};
  return s + pick(rng, enders);
}

std::string random_paragraph(std::mt19937_64& rng, std::size_t sentences) {
  std::string p;
  for (std::size_t i = 0; i < sentences; ++i) {
    if (i > 0) p += chance(rng, 0.15) ? "\n" : " ";
    p += random_sentence(rng);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Prompt goldens
// ---------------------------------------------------------------------------

std::vector<GoldenCase> golden_cases() {
  static const std::string kContext = "a children's book about a brave duck";
  const std::string main_text =
      "Once upon a time there was a duck.\n<overlap>She lived by a quiet pond.</overlap>\nEvery morning she sang.";
  const std::string insert_text = "<overlap>A fox watched from the reeds.</overlap>";
  return {
      {"squeeze",
       [] {
         return clay_edit_prompt(PromptTemplate::Squeeze,
                                 {"The old house stood on the hill.",
                                  "The <<squeeze>>old house<</squeeze>> stood on the hill.", Intensity(0.3), kContext});
       }},
      {"stretch",
       [] {
         return clay_edit_prompt(PromptTemplate::Stretch,
                                 {"The old house stood on the hill.",
                                  "The <<stretch>>old<</stretch>> house stood on the hill.", Intensity(0.3), {}});
       }},
      {"stretch_fallback",
       [] {
         return clay_edit_prompt(PromptTemplate::Stretch, {"The old house stood on the hill.",
                                                           "The old house stood on the hill.", Intensity(0.3), {}});
       }},
      {"squash",
       [] {
         return clay_edit_prompt(PromptTemplate::Squash,
                                 {"The old wooden house stood quietly on the hill.",
                                  "The <<<squash>>>old wooden house stood quietly<<</squash>>> on the hill.",
                                  Intensity(0.6), {}});
       }},
      {"squash_fallback",
       [] {
         return clay_edit_prompt(PromptTemplate::Squash,
                                 {"The old wooden house stood quietly on the hill.",
                                  "The old wooden house stood quietly on the hill.", Intensity(0.6), kContext});
       }},
      {"pinch",
       [] {
         return clay_edit_prompt(PromptTemplate::Pinch,
                                 {"She felt something nice that day.",
                                  "She felt <pinch>something nice</pinch> that day.", Intensity(0.1), {}});
       }},
      {"distort",
       [] {
         return clay_edit_prompt(PromptTemplate::Distort,
                                 {"The duck swam across the green pond at noon.",
                                  "The duck swam <<<<smudge>>>>across the green pond<<<</smudge>>>> at noon.",
                                  Intensity(1.0), {}});
       }},
      {"vertical_collision",
       [] {
         return vertical_collision_prompt(
             "My cat is in the garden.\n<overlap>She chases butterflies all day.</overlap>",
             "<overlap>The neighbour's dog runs along the fence.</overlap>\nIt barks at the mailman.", Intensity(0.73),
             kContext);
       }},
      {"full_blend",
       [] {
         return full_blend_prompt("My cat is in the garden.", "The neighbour's dog runs along the fence.",
                                  Intensity(0.97), {});
       }},
      {"horizontal_collision",
       [=] { return horizontal_collision_prompt(main_text, insert_text, 0.5, Intensity(0.75), {}, {}); }},
      {"horizontal_collision_anchor",
       [=] {
         return horizontal_collision_prompt(main_text, insert_text, 0.1, Intensity(0.45), {},
                                            std::string("She lived by a quiet pond."));
       }},
      {"generate_idea_pair",
       [] {
         const std::vector<std::string> prior{"Quackers, a name that sounds like laughter.",
                                              "Puddles, named after a favourite rainy day game."};
         const std::vector<std::string> imported{"A pond hidden behind an old mill."};
         return generate_idea_pair_prompt("duck names", "playful", serialize_idea_lines(prior),
                                          root_context_line(imported), {});
       }},
      {"initial_idea_pair", [] { return initial_idea_pair_prompt("duck names", "playful", root_context_line({}), {}); }},
      {"voice_plant", [] { return voice_plant_prompt("Let's think about sustainable energy solutions", {}); }},
      {"root_combine",
       [] {
         const std::vector<std::string> ideas{"A pond hidden behind an old mill.",
                                              "Quackers, a name that sounds like laughter.",
                                              "A fox who guards the reeds at night."};
         return root_combine_prompt(serialize_idea_lines(ideas), {});
       }},
  };
}

Outcome prompt_goldens(const std::string& golden_dir) {
  const auto start = Clock::now();
  Outcome out;
  std::set<std::string> templates;
  for (const auto& c : golden_cases()) {
    ++out.cases;
    std::string expected;
    try {
      expected = slurp(golden_dir + "/" + c.name + ".txt");
    } catch (const std::exception& e) {
      out.fail(e.what());
      continue;
    }
    const std::string actual = c.render();
    if (actual != expected) {
      const auto diff = std::mismatch(actual.begin(), actual.end(), expected.begin(), expected.end());
      out.fail(c.name + " differs at byte " + std::to_string(diff.first - actual.begin()));
    }
    std::string base = c.name;
    for (const char* suffix : {"_fallback", "_anchor"}) {
      if (const auto p = base.find(suffix); p != std::string::npos) base.erase(p);
    }
    templates.insert(base);
  }
  if (templates.size() != 12) out.fail("expected 12 templates, fixtures cover " + std::to_string(templates.size()));
  out.seconds = since(start);
  return out;
}

Outcome regime_boundaries() {
  Outcome out;
  const std::array<std::pair<double, std::string_view>, 4> regimes{
      {{0.59, "Light"}, {0.60, "Moderate"}, {0.89, "Moderate"}, {0.90, "Heavy"}}};
  for (auto tmpl : {PromptTemplate::VerticalCollision, PromptTemplate::HorizontalCollision}) {
    for (const auto& [i, word] : regimes) {
      ++out.cases;
      const std::string_view sentence = blend_regime(Intensity(i), tmpl);
      if (sentence.rfind(std::string(word) + " blending", 0) != 0) {
        out.fail(std::string(to_string(tmpl)) + " at " + std::to_string(i) + " gave '" + std::string(sentence) + "'");
      }
    }
  }
  const std::array<std::pair<double, std::string_view>, 4> positions{
      {{0.29, "beginning"}, {0.30, "middle"}, {0.70, "middle"}, {0.71, "end"}}};
  for (const auto& [p, word] : positions) {
    ++out.cases;
    if (position_word(p) != word) out.fail("position " + std::to_string(p) + " gave " + std::string(position_word(p)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Marker grammar
// ---------------------------------------------------------------------------

Outcome tag_round_trip(std::uint64_t seed, std::size_t n) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Outcome out;
  const std::array<MarkerKind, 6> kinds{MarkerKind::Squeeze, MarkerKind::Stretch, MarkerKind::Squash,
                                        MarkerKind::Pinch,   MarkerKind::Smudge,  MarkerKind::Overlap};
  for (std::size_t c = 0; c < n; ++c) {
    ++out.cases;
    const std::string text = random_paragraph(rng, 1 + below(rng, 3));
    const auto words = split_words(text);
    const std::size_t i = below(rng, words.size());
    const std::size_t j = i + below(rng, words.size() - i);
    const CharRange range{words[i].start, words[j].end};
    const MarkerKind kind = kinds[below(rng, kinds.size())];
    const int level = 1 + static_cast<int>(below(rng, 4));
    const int expected_level = kind == MarkerKind::Overlap ? 1 : level;
    try {
      const std::string marked = emit_marked(text, range, kind, level);
      const TaggedText parsed = parse_marked(marked);
      const std::vector<Tag> expected{{kind, range, expected_level}};
      if (parsed.plain != text || parsed.tags != expected || !parsed.warnings.empty()) {
        out.fail("case " + std::to_string(c) + ": " + marked);
      }
    } catch (const std::exception& e) {
      out.fail("case " + std::to_string(c) + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Clay
// ---------------------------------------------------------------------------

Outcome rip_partition(std::uint64_t seed, std::size_t n) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t c = 0; c < n; ++c) {
    ++out.cases;
    Harness h;
    std::string text = random_paragraph(rng, 1 + below(rng, 4));
    if (split_words(text).size() < 2) text += " and more";
    h.at(0);
    const TextBlock block = h.s().add_block(text, Point{40.0, 40.0});
    const Rect r = block.bounds();
    std::vector<Point> tear;
    switch (below(rng, 3)) {
      case 0: {  // horizontal tear
        const double y = uniform(rng, r.top(), r.bottom());
        tear = {{r.left() - 10.0, y}, {r.right() + 10.0, y}};
        break;
      }
      case 1: {  // vertical tear
        const double x = uniform(rng, r.left(), r.right());
        tear = {{x, r.top() - 10.0}, {x, r.bottom() + 10.0}};
        break;
      }
      default: {  // jagged tear
        double x = r.left() - 5.0;
        double y = uniform(rng, r.top(), r.bottom());
        while (x < r.right() + 5.0) {
          tear.push_back({x, y});
          x += uniform(rng, 10.0, 60.0);
          y = std::clamp(y + uniform(rng, -12.0, 12.0), r.top(), r.bottom());
        }
        tear.push_back({r.right() + 5.0, y});
      }
    }
    try {
      h.at(10);
      const OpResult res = h.s().apply(stroke(GestureKind::Rip, tear, 10));
      const SessionState st = h.s().state();
      const auto ids = res.data.at("block_ids");
      const std::string a = st.blocks.at(ids[0].get<std::string>()).text;
      const std::string b = st.blocks.at(ids[1].get<std::string>()).text;
      if (a + b != text || is_blank(a) || is_blank(b) || st.blocks.size() != 2) {
        out.fail("case " + std::to_string(c) + ": '" + a + "' + '" + b + "' vs '" + text + "'");
      }
    } catch (const std::exception& e) {
      out.fail("case " + std::to_string(c) + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

namespace {

/// One random engine action. Errors the engine reports are part of the game;
/// anything else is a failure.
void random_action(Harness& h, std::mt19937_64& rng, std::int64_t& t) {
  Session& s = h.s();
  const SessionState st = s.state();
  const auto blocks = keys_of(st.blocks);
  const auto ferns = keys_of(st.ferns);
  const auto live = live_leaf_ids(st);
  t += 1 + static_cast<std::int64_t>(below(rng, 500));
  h.at(t);

  const std::size_t roll = below(rng, 16);
  if (blocks.empty() || roll == 0) {
    std::optional<Point> at;
    if (chance(rng, 0.5)) at = Point{uniform(rng, 0.0, 900.0), uniform(rng, 0.0, 700.0)};
    PendingOp op = s.begin_add_block(random_paragraph(rng, 1 + below(rng, 3)), at, BlockOrigin::Manual);
    s.run(op);
    return;
  }
  const TextBlock& b = st.blocks.at(pick(rng, blocks));
  const Rect r = b.bounds();
  const double line_y = r.top() + 8.0;
  auto run = [&](const GestureEvent& e) {
    const OpResult res = s.apply(e);
    if (!res.ok) throw std::runtime_error("operation failed: " + res.message);
  };
  switch (roll) {
    case 1:
      run(press({r.left() + uniform(rng, 0.0, r.w), r.top() + uniform(rng, 0.0, r.h)}, t,
                static_cast<std::int64_t>(below(rng, 3000))));
      return;
    case 2:
    case 3: {
      const double x1 = r.left() + uniform(rng, 0.0, r.w / 2.0);
      const double x2 = x1 + uniform(rng, 10.0, r.w / 2.0);
      const double mid = (x1 + x2) / 2.0;
      const double f = roll == 2 ? uniform(rng, 1.1, 2.5) : uniform(rng, 0.1, 0.9);
      run(two_finger(roll == 2 ? GestureKind::Stretch : GestureKind::Squash, {x1, line_y}, {x2, line_y},
                     {mid - (mid - x1) * f, line_y}, {mid + (x2 - mid) * f, line_y}, t));
      return;
    }
    case 4: {
      const double cx = r.left() + uniform(rng, 0.0, r.w);
      const double cy = r.top() + uniform(rng, 0.0, r.h);
      run(two_finger(GestureKind::Pinch, {cx - 40.0, cy}, {cx + 40.0, cy}, {cx - 10.0, cy}, {cx + 10.0, cy}, t));
      return;
    }
    case 5:
      run(stroke(GestureKind::Smudge, {{r.left() + 2.0, line_y}, {r.left() + uniform(rng, 10.0, r.w), line_y}}, t));
      return;
    case 6: {
      const double y = r.top() + r.h / 2.0;
      run(stroke(GestureKind::Rip, {{r.left() - 8.0, y}, {r.right() + 8.0, y}}, t));
      return;
    }
    case 7: {
      if (blocks.size() < 2 || chance(rng, 0.2)) {
        run(drag(r.center(), {r.center().x + uniform(rng, 500.0, 900.0), r.center().y}, t));
        return;
      }
      const TextBlock& other = st.blocks.at(pick(rng, blocks));
      const Point to{other.bounds().center().x + uniform(rng, -20.0, 20.0),
                     other.bounds().center().y + uniform(rng, -other.size.h / 2.0, other.size.h / 2.0)};
      run(drag(r.center(), to, t));
      return;
    }
    case 8: {
      const Json payload{{"seed", random_sentence(rng)}, {"dimension", pick(rng, vocabulary())}};
      run(plant({uniform(rng, 0.0, 2000.0), 2000.0}, payload.dump(), t));
      return;
    }
    case 9:
      t += 45'000;
      h.at(t);
      for (const auto& res : s.tick()) {
        if (!res.ok) throw std::runtime_error("growth failed: " + res.message);
      }
      return;
    default:
      break;
  }
  if (ferns.empty()) return;
  const Fern& f = st.ferns.at(pick(rng, ferns));
  switch (roll) {
    case 10:
      run(stroke(GestureKind::WaterLine, {{f.position.x - 30.0, f.position.y - 300.0},
                                          {f.position.x + 30.0, f.position.y - 300.0}},
                 t));
      return;
    case 11:
      if (!live.empty()) run(leaf_gesture(GestureKind::PluckLeaf, pick(rng, live)));
      return;
    case 12:
      if (!live.empty()) run(leaf_gesture(GestureKind::PreserveHold, pick(rng, live)));
      return;
    case 13:
      if (!live.empty()) run(drop_leaf(pick(rng, live), {f.position.x, f.position.y - 100.0}, t));
      return;
    case 14:
      if (live.size() >= 2) {
        const std::string a = pick(rng, live);
        const std::string b = pick(rng, live);
        run(drop_leaf(a, {uniform(rng, 0.0, 2000.0), 3000.0}, t, Json{{"leaves", {b}}}.dump()));
      }
      return;
    case 15:
      if (!live.empty()) {
        run(leaf_gesture(GestureKind::EditLeaf, pick(rng, live), Json{{"gist", random_sentence(rng, 2, 5)}}.dump()));
      }
      return;
    default:
      return;
  }
}

}  // namespace

Outcome undo_redo(std::uint64_t seed, std::size_t scripts) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t c = 0; c < scripts; ++c) {
    ++out.cases;
    const std::string label = "script " + std::to_string(c);
    try {
      Harness h;
      Session& s = h.s();
      std::vector<std::string> history{s.hash()};
      std::size_t pos = 0;
      std::size_t seen = 0;
      std::int64_t t = 0;
      bool broken = false;
      const std::size_t steps = 5 + below(rng, 26);
      for (std::size_t k = 0; k < steps && !broken; ++k) {
        const double r = uniform(rng, 0.0, 1.0);
        if (r < 0.1 || (r < 0.15 && pos + 1 < history.size())) {
          const bool is_undo = r < 0.1;
          try {
            is_undo ? s.undo() : s.redo();
            pos = is_undo ? pos - 1 : pos + 1;
            if (s.hash() != history[pos]) {
              out.fail(label + ": hash after " + (is_undo ? "undo" : "redo") + " differs from history");
              broken = true;
            }
          } catch (const Error& e) {
            const bool expected = is_undo ? (pos == 0 && e.code() == ErrorCode::NothingToUndo)
                                          : (pos + 1 == history.size() && e.code() == ErrorCode::NothingToRedo);
            if (!expected) {
              out.fail(label + ": unexpected " + std::string(e.what()));
              broken = true;
            }
          }
          seen = s.trace().size();
          continue;
        }
        try {
          random_action(h, rng, t);
        } catch (const Error&) {
          // Rejected gestures leave the state alone; checked below.
        }
        const auto trace = s.trace();
        for (std::size_t i = seen; i < trace.size(); ++i) {
          history.resize(pos + 1);
          history.push_back(*trace[i].expected_hash);
          ++pos;
        }
        seen = trace.size();
        if (s.hash() != history[pos]) {
          out.fail(label + ": state changed without a trace record");
          broken = true;
        }
      }
      if (broken) continue;
      // Redo-all ends at the newest state, even when the script ended on undos.
      const std::string final_hash = history.back();
      std::size_t undone = 0;
      while (s.can_undo()) {
        s.undo();
        ++undone;
      }
      if (undone != pos || s.hash() != history.front()) {
        out.fail(label + ": undo-all did not return to the initial state");
        continue;
      }
      std::size_t redone = 0;
      while (s.can_redo()) {
        s.redo();
        ++redone;
        if (redone < history.size() && s.hash() != history[redone]) {
          out.fail(label + ": redo " + std::to_string(redone) + " of " + std::to_string(pos) + " left the history");
          broken = true;
          break;
        }
      }
      if (!broken && s.hash() != final_hash) out.fail(label + ": redo-all did not return to the final state");
    } catch (const std::exception& e) {
      out.fail(label + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

Outcome merge_ordering(std::uint64_t seed, std::size_t n) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Outcome out;
  const GeometryConfig geom;
  for (std::size_t c = 0; c < n; ++c) {
    ++out.cases;
    const std::string label = "merge " + std::to_string(c);
    try {
      const double width = 200.0;
      std::string top_text = random_paragraph(rng, 2 + below(rng, 2));
      std::string bottom_text = random_paragraph(rng, 3 + below(rng, 3));
      while (row_count(top_text, width, geom) < 2) top_text += " " + random_sentence(rng);
      while (row_count(bottom_text, width, geom) < 2) bottom_text += " " + random_sentence(rng);
      const std::size_t top_rows = row_count(top_text, width, geom);
      const std::size_t bottom_rows = row_count(bottom_text, width, geom);
      const double top_h = static_cast<double>(top_rows) * geom.cell_h;
      const std::size_t max_overlap = std::min(top_rows, bottom_rows) - 1;
      EngineConfig cfg;
      cfg.clay.default_block_width = width;
      Harness hh({}, cfg);
      Session& ss = hh.s();
      const Point top_at{40.0, 40.0};
      const Point bottom_at{40.0, 40.0 + top_h + 40.0};
      PendingOp a = ss.begin_add_block(top_text, top_at, BlockOrigin::Manual);
      ss.run(a);
      PendingOp b = ss.begin_add_block(bottom_text, bottom_at, BlockOrigin::Manual);
      ss.run(b);

      const double overlap = static_cast<double>(1 + below(rng, max_overlap)) * geom.cell_h - 4.0;
      const double dx = uniform(rng, -30.0, 30.0);
      const bool move_top = chance(rng, 0.5);
      GestureEvent e;
      if (move_top) {
        const Point from{top_at.x + 10.0, top_at.y + 4.0};
        e = drag(from, {from.x + dx, from.y + 40.0 + overlap}, 10);
      } else {
        const Point from{bottom_at.x + 10.0, bottom_at.y + 4.0};
        e = drag(from, {from.x + dx, from.y - 40.0 - overlap}, 10);
      }
      hh.at(10);
      const OpResult res = ss.apply(e);
      if (!res.ok) {
        out.fail(label + ": " + res.message);
        continue;
      }
      const std::string collision = res.data.at("collision").get<std::string>();
      if (collision.rfind("Vertical", 0) != 0) {
        out.fail(label + ": classified as " + collision);
        continue;
      }
      const std::string merged = res.data.at("text").get<std::string>();
      const TextLayout bottom_layout = monospace_layout(bottom_text, bottom_at, width, geom);
      const LineBox& last = bottom_layout.lines.back();
      const std::string bottom_only = trim(bottom_text.substr(last.range.start, last.range.length()));
      const auto top_pos = merged.find(trim(top_text));
      const auto bottom_pos = merged.rfind(bottom_only);
      if (top_pos != 0 || bottom_pos == std::string::npos || bottom_pos < trim(top_text).size()) {
        out.fail(label + ": '" + merged + "'");
      }
    } catch (const std::exception& e) {
      out.fail(label + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Garden
// ---------------------------------------------------------------------------

Outcome garden_growth_counts(std::size_t max_ticks) {
  const auto start = Clock::now();
  Outcome out;
  const EngineConfig cfg;
  const std::int64_t base = cfg.garden.base_interval_ms;
  for (std::size_t k = 1; k <= max_ticks; ++k) {
    ++out.cases;
    const std::string label = "k=" + std::to_string(k);
    try {
      Harness h;
      Session& s = h.s();
      h.at(0);
      const OpResult planted = s.apply(plant({300.0, 900.0}, R"({"seed":"duck names","dimension":"playful"})", 0));
      const std::string fern = planted.data.at("fern_id").get<std::string>();
      std::size_t grown = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t due = static_cast<std::int64_t>(i) * base;
        if (due > 0) {
          h.at(due - 1);
          if (!s.tick().empty()) out.fail(label + ": grew before it was due");
        }
        h.at(due);
        for (const auto& r : s.tick()) grown += r.ok && r.event == "fern_grown" ? 1 : 0;
      }
      const SessionState st = s.state();
      const Fern& f = st.ferns.at(fern);
      if (grown != k || f.checkpoints.size() != k || f.leaves.size() != 2 * k || st.leaves.size() != 2 * k) {
        out.fail(label + ": " + std::to_string(f.leaves.size()) + " leaves, " +
                 std::to_string(f.checkpoints.size()) + " checkpoints");
      }
    } catch (const std::exception& e) {
      out.fail(label + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

Outcome garden_watering() {
  const auto start = Clock::now();
  Outcome out;
  const EngineConfig cfg;
  const std::int64_t base = cfg.garden.base_interval_ms;
  const std::int64_t quick = base / cfg.garden.watering_factor;
  try {
    Harness h;
    Session& s = h.s();
    h.at(0);
    const std::string fern =
        s.apply(plant({300.0, 900.0}, R"({"seed":"duck names","dimension":"playful"})", 0)).data.at("fern_id");
    s.tick();  // first pair
    const std::int64_t watered_at = 1'000;
    h.at(watered_at);
    s.apply(stroke(GestureKind::WaterLine, {{270.0, 600.0}, {330.0, 610.0}}, watered_at));
    const std::int64_t until = s.state().ferns.at(fern).watered_until_ms.value_or(-1);
    ++out.cases;
    if (until != watered_at + cfg.garden.watering_window_ms) out.fail("watered_until not set to the window end");

    // Step the clock to each due time and record when growth happens.
    std::vector<std::int64_t> grown_at;
    std::int64_t now = watered_at;
    while (now < until + 2 * base) {
      now = s.state().ferns.at(fern).next_due_ms;
      h.at(now);
      for (const auto& r : s.tick()) {
        if (r.event == "fern_grown") grown_at.push_back(now);
      }
    }
    for (std::size_t i = 1; i < grown_at.size(); ++i) {
      ++out.cases;
      const std::int64_t gap = grown_at[i] - grown_at[i - 1];
      const std::int64_t expected = grown_at[i - 1] < until ? quick : base;
      if (gap != expected) {
        out.fail("growth at " + std::to_string(grown_at[i - 1]) + " -> " + std::to_string(grown_at[i]) +
                 ", expected gap " + std::to_string(expected));
      }
    }
    ++out.cases;
    if (grown_at.empty() || grown_at.front() != watered_at + quick) out.fail("watering did not pull growth forward");
  } catch (const std::exception& e) {
    out.fail(std::string("threw ") + e.what());
  }
  out.seconds = since(start);
  return out;
}

Outcome garden_prompt_hygiene(std::uint64_t seed, std::size_t scripts) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t c = 0; c < scripts; ++c) {
    const std::string label = "garden script " + std::to_string(c);
    try {
      Harness h;
      Session& s = h.s();
      std::int64_t t = 0;
      h.at(t);
      const std::size_t fern_count = 2 + below(rng, 3);
      for (std::size_t i = 0; i < fern_count; ++i) {
        const Json payload{{"seed", random_sentence(rng, 2, 5)}, {"dimension", pick(rng, vocabulary())}};
        s.apply(plant({200.0 + 300.0 * static_cast<double>(i), 900.0}, payload.dump(), t));
      }
      // (text, prompt-log size when it left the garden)
      std::vector<std::pair<std::string, std::size_t>> removed;
      const std::size_t steps = 20 + below(rng, 30);
      for (std::size_t k = 0; k < steps; ++k) {
        t += 1'000 + static_cast<std::int64_t>(below(rng, 30'000));
        h.at(t);
        const SessionState st = s.state();
        const auto live = live_leaf_ids(st);
        const auto ferns = keys_of(st.ferns);
        const std::size_t roll = below(rng, 7);
        try {
          if (roll <= 1 || live.empty()) {
            s.tick();
          } else if (roll == 2) {
            const std::string id = pick(rng, live);
            const std::string text = st.leaves.at(id).full;
            const std::size_t mark = s.prompt_log().size();
            if (s.apply(leaf_gesture(GestureKind::PluckLeaf, id)).ok) removed.emplace_back(text, mark);
          } else if (roll == 3 && live.size() >= 2) {
            const std::string a = pick(rng, live);
            std::string b = pick(rng, live);
            if (a == b) continue;
            const OpResult r =
                s.apply(drop_leaf(a, {uniform(rng, 0.0, 3000.0), 5000.0}, t, Json{{"leaves", {b}}}.dump()));
            if (r.ok) {
              // The combine prompt itself quotes the leaves; everything after must not.
              const std::size_t mark = s.prompt_log().size();
              removed.emplace_back(st.leaves.at(a).full, mark);
              removed.emplace_back(st.leaves.at(b).full, mark);
            }
          } else if (roll == 4) {
            const Fern& f = st.ferns.at(pick(rng, ferns));
            s.apply(stroke(GestureKind::WaterLine, {{f.position.x - 20.0, 500.0}, {f.position.x + 20.0, 500.0}}, t));
          } else if (roll == 5) {
            const Fern& f = st.ferns.at(pick(rng, ferns));
            s.apply(drop_leaf(pick(rng, live), {f.position.x, f.position.y - 50.0}, t));
          } else {
            s.apply(leaf_gesture(GestureKind::PreserveHold, pick(rng, live)));
          }
        } catch (const Error&) {
        }
      }
      const auto prompts = s.prompt_log();
      // The mock is a pure function of the prompt: once a fern's prior list
      // returns to an earlier state it regrows identical text as a new leaf.
      // Such twins are legitimately quoted, so only unique texts are checked.
      std::map<std::string, std::size_t> holders;
      for (const auto& [id, leaf] : s.state().leaves) ++holders[leaf.full];
      for (const auto& [text, mark] : removed) {
        if (holders[text] > 1) continue;
        ++out.cases;
        for (std::size_t i = mark; i < prompts.size(); ++i) {
          if (prompts[i].prompt.find(text) != std::string::npos) {
            out.fail(label + ": removed text reappears in a later " + std::string(to_string(prompts[i].tmpl)) +
                     " prompt for " + prompts[i].target + ": " + text);
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      ++out.cases;
      out.fail(label + " threw " + e.what());
    }
  }
  out.seconds = since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Structured output
// ---------------------------------------------------------------------------

Outcome idea_pair_fixtures(const std::string& fixture_file) {
  Outcome out;
  const Json fixtures = Json::parse(slurp(fixture_file));
  for (const auto& f : fixtures) {
    ++out.cases;
    const std::string name = f.at("name");
    const std::string expect = f.at("expect");
    try {
      const IdeaPair pair = parse_idea_pair(f.at("response").get<std::string>());
      if (expect != "ok") {
        out.fail(name + ": parsed, expected " + expect);
      } else if (f.contains("gists") &&
                 (pair.ideas[0].gist != f["gists"][0] || pair.ideas[1].gist != f["gists"][1])) {
        out.fail(name + ": wrong gists");
      }
    } catch (const Error& e) {
      if (std::string(to_string(e.code())) != expect) out.fail(name + ": " + e.what() + ", expected " + expect);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

Outcome replay_determinism(const std::string& trace_file, const std::string& seed_file) {
  const auto start = Clock::now();
  Outcome out;
  try {
    const auto records = read_trace(trace_file);
    const SessionState seed = load_session(seed_file);
    const EngineConfig cfg;
    const ReplayReport first = replay(records, seed, cfg, nullptr, {true});
    const ReplayReport second = replay(records, seed, cfg, nullptr, {true});
    ++out.cases;
    if (first.final_hash != second.final_hash) out.fail("two replays disagree");
    ++out.cases;
    if (records.empty() || first.final_hash != records.back().expected_hash.value_or("")) {
      out.fail("final hash differs from the recorded one");
    }
    ++out.cases;
    if (first.verified != records.size()) out.fail("not every record carried a verified hash");
  } catch (const std::exception& e) {
    ++out.cases;
    out.fail(e.what());
  }
  out.seconds = since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Demo scenario
// ---------------------------------------------------------------------------

SessionState demo_seed() {
  SessionState s;
  s.writing_context = "a children's book about a brave little duck";
  return s;
}

namespace {

OpResult must(const OpResult& r, const std::string& step) {
  if (!r.ok || r.event.empty()) throw std::runtime_error("demo step '" + step + "' did not commit: " + r.message);
  return r;
}

Rect bounds_of(Session& s, const std::string& id) { return s.state().blocks.at(id).bounds(); }

}  // namespace

void run_demo_scenario(Harness& h) {
  Session& s = h.s();
  std::int64_t t = 0;
  auto step = [&](std::int64_t dt) {
    t += dt;
    h.at(t);
  };

  // Clay: two paragraphs of a draft.
  step(1'000);
  const TextBlock first = s.add_block(
      "Dot was the smallest duck on Willow Pond. Every morning she paddled past the tall reeds. The other ducks "
      "laughed at her tiny wings.",
      Point{40.0, 40.0});
  step(2'000);
  const TextBlock second = s.add_block(
      "One stormy night the old mill wheel began to creak. Dot heard a frightened peep from the water. She swam "
      "toward the sound without a second thought.",
      Point{40.0, 260.0});

  // (a) merge the second paragraph into the first by dragging it up over the
  // bottom lines of the first.
  step(3'000);
  const Rect fb = first.bounds();
  const Rect sb = second.bounds();
  const Point grab{sb.left() + 20.0, sb.top() + 6.0};
  const double lift = (sb.top() - fb.bottom()) + 2.0 * 16.0 - 4.0;
  const OpResult merged = must(s.apply(drag(grab, {grab.x + 4.0, grab.y - lift}, t)), "merge");
  const std::string block = merged.data.at("block_id");

  // (b) rip the merged paragraph in two.
  step(4'000);
  Rect mb = bounds_of(s, block);
  const double tear_y = mb.top() + mb.h * 0.45;
  const OpResult ripped =
      must(s.apply(stroke(GestureKind::Rip, {{mb.left() - 10.0, tear_y}, {mb.right() + 10.0, tear_y + 6.0}}, t)),
           "rip");
  const std::string opening = ripped.data.at("block_ids")[0];
  const std::string ending = ripped.data.at("block_ids")[1];

  // (c) smudge the opening to make it more abstract.
  step(3'000);
  Rect ob = bounds_of(s, opening);
  must(s.apply(stroke(GestureKind::Smudge, {{ob.left() + 4.0, ob.top() + 8.0}, {ob.left() + 120.0, ob.top() + 10.0},
                                           {ob.left() + 200.0, ob.top() + 8.0}},
                      t)),
       "smudge");

  // (d) pinch it to make it concrete again.
  step(3'000);
  ob = bounds_of(s, opening);
  const Point pc{ob.left() + 80.0, ob.top() + 8.0};
  must(s.apply(two_finger(GestureKind::Pinch, {pc.x - 50.0, pc.y}, {pc.x + 50.0, pc.y}, {pc.x - 15.0, pc.y},
                          {pc.x + 15.0, pc.y}, t)),
       "pinch");

  // Too much detail: a light smudge, then think better of it.
  step(2'000);
  ob = bounds_of(s, opening);
  must(s.apply(stroke(GestureKind::Smudge, {{ob.left() + 4.0, ob.top() + 8.0}, {ob.left() + 60.0, ob.top() + 8.0}}, t)),
       "second smudge");
  step(1'000);
  s.undo();
  step(1'000);
  s.redo();

  // (e) stretch the ending to elaborate it.
  step(3'000);
  const Rect eb = bounds_of(s, ending);
  const double ey = eb.top() + 8.0;
  must(s.apply(two_finger(GestureKind::Stretch, {eb.left() + 40.0, ey}, {eb.left() + 120.0, ey},
                          {eb.left() + 10.0, ey}, {eb.left() + 190.0, ey}, t)),
       "stretch");

  // Emphasis on a phrase with a long press.
  step(2'000);
  const Rect eb2 = bounds_of(s, ending);
  must(s.apply(press({eb2.left() + 30.0, eb2.top() + 8.0}, t, 1'200)), "press");

  // Garden: plant ferns for setting, main character, and side characters.
  step(5'000);
  const std::string setting =
      must(s.apply(plant({200.0, 1400.0}, "Let's think about the setting of the story", t)), "plant setting")
          .data.at("fern_id");
  step(500);
  const std::string hero =
      must(s.apply(plant({500.0, 1400.0}, R"({"seed":"Mama duck character traits and personality","dimension":"peaceful"})", t)),
           "plant hero")
          .data.at("fern_id");
  step(500);
  const std::string side =
      must(s.apply(plant({800.0, 1400.0}, "Explore the side characters around the pond.", t)), "plant side")
          .data.at("fern_id");

  // First pairs grow right away.
  step(1'000);
  for (const auto& r : s.tick()) must(r, "first growth");

  // (b) water the main character fern.
  step(2'000);
  must(s.apply(stroke(GestureKind::WaterLine, {{470.0, 1050.0}, {500.0, 1060.0}, {530.0, 1050.0}}, t)), "water");
  const std::int64_t hero_due = s.state().ferns.at(hero).next_due_ms;
  h.at(t = hero_due);
  for (const auto& r : s.tick()) must(r, "watered growth");
  h.at(t = s.state().ferns.at(hero).next_due_ms);
  for (const auto& r : s.tick()) must(r, "watered growth");

  // Meanwhile the setting fern grows at its own pace.
  h.at(t = s.state().ferns.at(setting).next_due_ms);
  for (const auto& r : s.tick()) must(r, "setting growth");

  // A setting idea stands out: pluck it and plant it as a new fern.
  step(1'000);
  const std::string standout = s.state().ferns.at(setting).leaves.back();
  const std::string replanted =
      must(s.apply(drop_leaf(standout, {1100.0, 1400.0}, t)), "replant").data.at("fern_id");

  // (c) prune two hero ideas that do not fit.
  step(1'000);
  const auto hero_leaves = s.state().ferns.at(hero).leaves;
  must(s.apply(leaf_gesture(GestureKind::PluckLeaf, hero_leaves.at(2))), "prune");
  step(500);
  must(s.apply(leaf_gesture(GestureKind::PluckLeaf, hero_leaves.at(5))), "prune");

  // (d) read one closely, keep it, and tighten its wording.
  step(2'000);
  must(s.apply(leaf_gesture(GestureKind::PreserveHold, hero_leaves.at(0))), "preserve");
  step(2'000);
  must(s.apply(leaf_gesture(GestureKind::EditLeaf, hero_leaves.at(0),
                            R"({"gist":"Mama duck hums to calm the ducklings"})")),
       "edit");

  // (e) graft a setting idea onto the side character fern.
  step(2'000);
  const std::string graft = s.state().ferns.at(setting).leaves.front();
  must(s.apply(drop_leaf(graft, {800.0, 1300.0}, t)), "graft");

  // Later growth picks up the graft and the new fern.
  h.at(t = std::max(s.state().ferns.at(side).next_due_ms, s.state().ferns.at(replanted).next_due_ms));
  for (const auto& r : s.tick()) must(r, "growth after graft");

  // Compost two side-character ideas into a fresh fern.
  step(3'000);
  const auto side_leaves = s.state().ferns.at(side).leaves;
  must(s.apply(drop_leaf(side_leaves.at(0), {1400.0, 1400.0}, t, Json{{"leaves", {side_leaves.at(1)}}}.dump())),
       "compost");
  step(1'000);
  for (const auto& r : s.tick()) must(r, "final growth");
}

}  // namespace oracles
