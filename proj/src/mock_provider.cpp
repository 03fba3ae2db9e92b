#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "texterial/diff.hpp"
#include "texterial/gateway.hpp"
#include "texterial/state.hpp"
#include "texterial/tags.hpp"

namespace texterial {

namespace {

std::optional<std::string_view> between(std::string_view s, std::string_view open, std::string_view close) {
  const auto a = s.find(open);
  if (a == std::string_view::npos) return std::nullopt;
  const auto from = a + open.size();
  const auto b = s.find(close, from);
  if (b == std::string_view::npos) return std::nullopt;
  return s.substr(from, b - from);
}

std::string_view require(std::optional<std::string_view> v, std::string_view what) {
  if (!v) throw ProviderFailure(ErrorCode::ProviderError, 400, "mock: prompt lacks " + std::string(what));
  return *v;
}

std::string join_words(std::string_view text, std::span<const CharRange> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += text.substr(w.start, w.length());
  }
  return out;
}

std::string first_half(std::string_view text) {
  const auto words = split_words(text);
  const std::size_t keep = (words.size() + 1) / 2;
  return join_words(text, std::span<const CharRange>(words).first(keep));
}

std::string rewrite_span(PromptTemplate tmpl, std::string_view span, int level) {
  const auto words = split_words(span);
  switch (tmpl) {
    case PromptTemplate::Squeeze: {
      std::string up(span);
      std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
      return up;
    }
    case PromptTemplate::Stretch: {
      std::string out(span);
      for (int i = 1; i < level; ++i) out += " " + std::string(span);
      return out;
    }
    case PromptTemplate::Squash:
      return first_half(span);
    case PromptTemplate::Pinch:
      return std::string(span) + " (specifically)";
    case PromptTemplate::Distort:
      return "essence-of-" + std::string(words.empty() ? span : span.substr(words[0].start, words[0].length()));
    default:
      return std::string(span);
  }
}

MarkerKind marker_for(PromptTemplate tmpl) {
  switch (tmpl) {
    case PromptTemplate::Squeeze: return MarkerKind::Squeeze;
    case PromptTemplate::Stretch: return MarkerKind::Stretch;
    case PromptTemplate::Squash: return MarkerKind::Squash;
    case PromptTemplate::Pinch: return MarkerKind::Pinch;
    default: return MarkerKind::Smudge;
  }
}

std::string clay_edit(PromptTemplate tmpl, std::string_view prompt) {
  if (auto original = between(prompt, "Original text:\n", "\n\nYour task")) {
    if (tmpl == PromptTemplate::Stretch) return std::string(*original) + " (elaborated)";
    return first_half(*original);
  }
  const auto header = prompt.find("\n\nText with ");
  const auto header_end = header == std::string_view::npos ? header : prompt.find("):\n", header);
  if (header_end == std::string_view::npos) require(std::nullopt, "a segments header");
  const auto segments = require(between(prompt.substr(header_end + 3), "", "\n\nYour task"), "segments");

  const TaggedText parsed = parse_marked(segments);
  std::vector<Tag> tags;
  for (const auto& t : parsed.tags) {
    if (t.kind == marker_for(tmpl)) tags.push_back(t);
  }
  // Right to left so earlier offsets stay valid; nested ranges are skipped.
  std::sort(tags.begin(), tags.end(), [](const Tag& a, const Tag& b) { return a.range.start > b.range.start; });
  std::string out = parsed.plain;
  std::size_t limit = out.size();
  for (const auto& t : tags) {
    if (t.range.end > limit) continue;
    const std::string span = parsed.plain.substr(t.range.start, t.range.length());
    out.replace(t.range.start, t.range.length(), rewrite_span(tmpl, span, t.level));
    limit = t.range.start;
  }
  return out;
}

std::string without_tagged(const TaggedText& t, MarkerKind kind) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& tag : t.tags) {
    if (tag.kind != kind || tag.range.start < cursor) continue;
    out += t.plain.substr(cursor, tag.range.start - cursor);
    cursor = tag.range.end;
  }
  out += t.plain.substr(cursor);
  return out;
}

std::string join_nonblank(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    const std::string s = trim(p);
    if (s.empty()) continue;
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::string vertical(std::string_view prompt) {
  const auto top = require(between(prompt, "Top text block (with overlapping lines tagged):\n",
                                   "\n\nBottom text block (with overlapping lines tagged):\n"),
                           "top block");
  const auto bottom = require(between(prompt, "Bottom text block (with overlapping lines tagged):\n",
                                      "\n\nYour task is to combine"),
                              "bottom block");
  return join_nonblank({parse_marked(top).plain, without_tagged(parse_marked(bottom), MarkerKind::Overlap)});
}

std::string full_blend(std::string_view prompt) {
  const auto first = require(between(prompt, "First text:\n", "\n\nSecond text:\n"), "first text");
  const auto second = require(between(prompt, "Second text:\n", "\n\nYour task is to create"), "second text");
  return join_nonblank({std::string(first), std::string(second)});
}

std::string horizontal(std::string_view prompt) {
  const std::string main = parse_marked(require(between(prompt, "Main text block (with overlapping lines tagged):\n",
                                                        "\n\nText to insert (with overlapping lines tagged):\n"),
                                                "main block"))
                               .plain;
  const std::string insert =
      parse_marked(require(between(prompt, "Text to insert (with overlapping lines tagged):\n",
                                   "\n\nThe second text MUST be inserted "),
                           "insert block"))
          .plain;

  std::size_t cut = main.size();
  if (auto anchor = between(prompt, "inserted around the line: \"", "\", creating a cohesive")) {
    const auto at = main.find(*anchor);
    if (at != std::string::npos) cut = at + anchor->size();
  } else {
    const auto where = require(between(prompt, "\n\nThe second text MUST be inserted ", " of the main text"),
                               "insertion position");
    if (where == "beginning") {
      cut = 0;
    } else if (where == "middle") {
      const auto words = split_words(main);
      cut = words.size() < 2 ? main.size() : words[words.size() / 2].start;
    }
  }
  return join_nonblank({main.substr(0, cut), insert, main.substr(cut)});
}

std::string hex8(std::string_view text) { return sha256_hex(text).substr(0, 8); }

std::string idea_pair(PromptTemplate tmpl, std::string_view prompt) {
  const std::string seed(require(between(prompt, "What we are generating (the seed): \"", "\"\n"), "seed"));
  const std::string dim(
      require(between(prompt, "How the ideas evolve over time (the dimension to progress in): \"", "\"\n"),
              "dimension"));
  std::size_t generation = 1;
  if (tmpl == PromptTemplate::GenerateIdeaPair) {
    const auto prior = require(between(prompt, "PRIOR IDEAS:\n", "\n\n"), "prior ideas");
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = prior.find("- ", pos)) != std::string_view::npos; ++pos) {
      if (pos == 0 || prior[pos - 1] == '\n') ++lines;
    }
    generation = lines / 2 + 1;
  }
  const std::string g = std::to_string(generation);
  const std::string topic = truncate_words(seed, 60);
  const std::string ref = hex8(prompt);
  const std::string gist1 = seed + " idea " + g + " (" + dim + " " + g + ")";
  const std::string gist2 = seed + " idea " + g + " variant (" + dim + " " + g + ")";
  Json out = {{"ideas",
               {{{"gist", gist1}, {"full", "Idea " + g + " for " + topic + ", pushed further toward " + dim +
                                               " [ref " + ref + "a]."}},
                {{"gist", gist2}, {"full", "A variant of idea " + g + " for " + topic + ", leaning toward " + dim +
                                               " [ref " + ref + "b]."}}}}};
  return out.dump();
}

struct KnownTranscript {
  std::string_view transcript;
  std::string_view seed;
  std::string_view dimension;
};

constexpr std::array<KnownTranscript, 3> kKnownTranscripts{{
    {"I want to explore how technology affects human relationships", "technology's impact on human relationships",
     "digital impact"},
    {"Let's think about sustainable energy solutions", "sustainable energy solutions", "sustainability"},
    {"Consider the role of art in society", "art in society", "creativity"},
}};

constexpr std::array<std::string_view, 7> kLeadIns{
    "i want to explore ", "i want to think about ", "let's think about ", "let's explore ",
    "think about ", "consider ", "explore ",
};

std::string voice_plant(std::string_view prompt) {
  const std::string transcript = trim(require(between(prompt, "Voice input: \"", "\"\n\nCRITICAL"), "transcript"));
  for (const auto& k : kKnownTranscripts) {
    if (k.transcript == transcript) return Json{{"seed", k.seed}, {"dimension", k.dimension}}.dump();
  }
  std::string lower = transcript;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string seed = transcript;
  for (auto lead : kLeadIns) {
    if (lower.rfind(lead, 0) == 0) {
      seed = transcript.substr(lead.size());
      break;
    }
  }
  while (!seed.empty() && std::ispunct(static_cast<unsigned char>(seed.back()))) seed.pop_back();
  if (is_blank(seed)) seed = transcript;
  return Json{{"seed", trim(seed)}, {"dimension", kDefaultDimension}}.dump();
}

std::string root_combine(std::string_view prompt) {
  const auto ideas = require(between(prompt, "The ideas to combine:\n", "\n\nAnalyze"), "ideas");
  std::string seed = "combined:";
  std::size_t pos = 0;
  bool first = true;
  while (pos < ideas.size()) {
    auto nl = ideas.find('\n', pos);
    if (nl == std::string_view::npos) nl = ideas.size();
    std::string_view line = ideas.substr(pos, nl - pos);
    if (line.rfind("- ", 0) == 0) line.remove_prefix(2);
    const auto words = split_words(line);
    if (!words.empty()) {
      seed += first ? " " : " + ";
      seed += line.substr(words[0].start, words[0].length());
      first = false;
    }
    pos = nl + 1;
  }
  return Json{{"seed", seed}, {"dimension", "synthesis"}}.dump();
}

}  // namespace

std::string mock_response(PromptTemplate tmpl, std::string_view prompt) {
  switch (tmpl) {
    case PromptTemplate::Squeeze:
    case PromptTemplate::Stretch:
    case PromptTemplate::Squash:
    case PromptTemplate::Pinch:
    case PromptTemplate::Distort:
      return clay_edit(tmpl, prompt);
    case PromptTemplate::VerticalCollision:
      return vertical(prompt);
    case PromptTemplate::FullBlend:
      return full_blend(prompt);
    case PromptTemplate::HorizontalCollision:
      return horizontal(prompt);
    case PromptTemplate::GenerateIdeaPair:
    case PromptTemplate::InitialIdeaPair:
      return idea_pair(tmpl, prompt);
    case PromptTemplate::VoicePlant:
      return voice_plant(prompt);
    case PromptTemplate::RootCombine:
      return root_combine(prompt);
  }
  throw Error(ErrorCode::UnknownTemplate, "mock: unknown template");
}

}  // namespace texterial
