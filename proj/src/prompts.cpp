#include "texterial/prompts.hpp"

#include <array>
#include <utility>

#include "texterial/error.hpp"

namespace texterial {

namespace {

// ---------------------------------------------------------------------------
// Template resources. Clay templates use ${name} placeholders, garden
// templates use {name}. Everything else is literal, byte for byte.
// ---------------------------------------------------------------------------

constexpr std::string_view kSqueeze =
    R"TXT(${contextLine}You are a creative writing assistant. The user has squeezed/pressed on specific text segments to emphasize them.

Text with squeezed segments marked (< > brackets indicate squeeze intensity. The more brackets there are, the more intensely we should emphasize the text):
${segmentsText}

Your task is to edit the text to EMPHASIZE and enhance the squeezed segments. You can:
- Add emphasis to the tagged parts
- Modify the language used, tone, or style to make those segments more prominent

CRITICAL GUIDELINES:
- ONLY EDIT TEXT WITHIN/NEAR the tagged segments (<>), and DO NOT EDIT outside of the tagged segments. Use your BEST JUDGMENT to determine which TAGGED segments to edit.
- Keep the same general structure and length of the text (DO NOT ADD TOO MUCH TEXT)
- Do NOT add markdown formatting or tags (like <>) to the text.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kStretchTagged =
    R"TXT(${contextLine}You are a creative writing assistant. The user has stretched specific text segments to expand them.

Text with stretched segments marked (< > brackets indicate stretch intensity. The more brackets there are, the more intensely we should elaborate the text):
${segmentsText}

Your task is to expand and elaborate on the stretched segments. You can do any of the following:
- Add A BIT more elaboration to the stretched parts
- Expand descriptions and explanations as needed
- Add examples, metaphors, or additional context as needed
- Develop ideas more fully in the stretched areas as needed

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Focus expansion ONLY WITHIN/NEAR the tagged segments and DO NOT EDIT outside of the tagged segments. Use your BEST JUDGMENT to determine which TAGGED segments to edit.
- Make sure the length of the text is ONLY SOMEWHAT LONGER THAN THE ORIGINAL TEXT (only add as many words as are in the TAGGED text)
- Do NOT add markdown formatting or tags (like <>) to the text.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text. )TXT";

constexpr std::string_view kStretchFallback =
    R"TXT(${contextLine}You are a creative writing assistant. The user has performed a stretch gesture on this text to expand and elaborate it.

Original text:
${originalText}

Your task is to expand and elaborate on the text. You can do any of the following:
- Add more elaboration and detail
- Expand descriptions and explanations
- Add examples, metaphors, or additional context
- Develop ideas more fully

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Make the text SOMEWHAT LONGER but not excessively long (aim for about 20-40%
- Do NOT add markdown formatting or tags
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kSquashTagged =
    R"TXT(${contextLine}You are a creative writing assistant. The user has squashed specific text segments to condense them.

Text with squashed segments marked (< > brackets indicate squash intensity. The more brackets there are, the more intensely we should summarize):
${segmentsText}

Your task is to condense and summarize the squashed segments. You can do any of the following:
- Make the squashed parts more concise
- Remove redundant words or phrases
- Simplify complex descriptions
- Distill ideas to their essential elements

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Focus condensing ONLY WITHIN/NEAR the tagged segments (<>) and DO NOT EDIT outside of the tagged segments. Use your BEST JUDGMENT to determine which TAGGED segments to edit.
- Do NOT add markdown formatting or tags (like <>) to the text.
- Make sure the new text is SHORTER than the original text
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kSquashFallback =
    R"TXT(${contextLine}You are a creative writing assistant. The user has performed a squash gesture on this text to condense and summarize it.

Original text:
${originalText}

Your task is to condense and summarize the text. You can do any of the following:
- Make the text more concise
- Remove redundant words or phrases
- Simplify complex descriptions
- Distill ideas to their essential elements

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Make the text SHORTER than the original (aim for about 20-40%
- Do NOT add markdown formatting or tags
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kPinch =
    R"TXT(${contextLine}You are a creative writing assistant. The user has pinched specific text segments to refine and make them better.

Text with pinched segments marked (< > brackets indicate pinch intensity. The more brackets there are, the more intense the refinement should be):
${segmentsText}

Your task is to refine and make the pinched segments more concrete and specific. You can do any of the following:
- Replace abstract or vague language with concrete, specific details
- Add precise examples instead of general concepts  
- Use more vivid, sensory language
- Replace broad statements with specific, tangible descriptions
- Make metaphors more literal and grounded

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Focus refinement ONLY WITHIN/NEAR the tagged segments (<>) and DO NOT EDIT outside of the tagged segments. Use your BEST JUDGMENT to determine which TAGGEDsegments to edit.
- Keep the same general structure and length of the text (DO NOT ADD TOO MUCH TEXT)
- Do NOT add markdown formatting or tags (like <>) to the text.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kDistort =
    R"TXT(${contextLine}You are a creative writing assistant. The user has smudged specific text segments to make them more abstract and conceptual.

Text with distorted segments marked (< > brackets indicate smudge intensity. The more brackets there are, the more intense the smudging is):
${segmentsText}

Your task is to make the smudged segments more abstract. You can do any of the following:
- Replace specific details with broader, more conceptual language
- Transform literal descriptions into metaphorical or symbolic language
- Elevate practical details to theoretical or abstract concepts

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the text
- Focus abstraction ONLY WITHIN/NEAR the tagged segments (<>) and DO NOT edit outside of the tagged segments. Use your BEST JUDGMENT to determine which TAGGED segments to edit.
- Keep the same general structure and length of the text (DO NOT ADD TOO MUCH TEXT)
- Do NOT add markdown formatting or tags (like <>) to the text.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the edited text.)TXT";

constexpr std::string_view kVertical =
    R"TXT(${contextLine}You are a creative writing assistant. The user has dragged one text block vertically into another to combine them. The overlapping visual lines have been marked with <overlap> tags.

COLLISION INTENSITY: ${intensityPercent}% - ${blendingGuidance}

Top text block (with overlapping lines tagged):
${topTextWithTags}

Bottom text block (with overlapping lines tagged):
${bottomTextWithTags}

Your task is to combine these two text blocks vertically, creating a cohesive COMBINED TEXT that flows naturally from the top text into the bottom text.

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the texts
- The TOP text block MUST ALWAYS come before the BOTTOM text block in the final combined text
- Focus your editing ONLY WITHIN/NEAR the content in <overlap> tags and DO NOT EDIT outside of the tagged areas unless absolutely necessary for coherence
- The tagged lines represent the visual overlap where the collision happened - merge these areas thoughtfully
- Apply the blending intensity guidance above to determine how extensively to merge the content
- KEEP THE TEXT THE SAME LENGTH OR SHORTER THAN THE ORIGINAL TWO TEXT BLOCKS
- DO NOT ADD MARKDOWN FORMATTING OR TAGS (like <>) TO THE TEXT.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the combined text.)TXT";

constexpr std::string_view kFullBlend =
    R"TXT(${contextLine}You are a creative writing assistant. The user has created an EXTREMELY HIGH INTENSITY collision (${intensityPercent}%) with complete overlap between two text blocks. This requires a FULL BLEND approach where both texts are completely merged into a unified narrative.

First text:
${firstText}

Second text:
${secondText}

Your task is to create a completely new, unified text that seamlessly blends ALL content from both texts into a single, cohesive piece of text. This is not about insertion or simple combination - it's about creating something new that blends both sources.

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the texts
- KEEP THE TEXT THE SAME LENGTH OR SHORTER THAN THE ORIGINAL TWO TEXT BLOCKS
- DO NOT ADD MARKDOWN FORMATTING OR TAGS (like <>) TO THE TEXT. Do NOT include any tags, markers, or explanations.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the fully blended text. )TXT";

constexpr std::string_view kInsertAtLine =
    R"TXT(The second text MUST be inserted around the line: "${insertLineText}", creating a cohesive transition between them.)TXT";

constexpr std::string_view kInsertAtPosition =
    R"TXT(The second text MUST be inserted ${positionDescription} of the main text, creating a cohesive transition between them.)TXT";

constexpr std::string_view kHorizontal =
    R"TXT(${contextLine}You are a creative writing assistant. The user has dragged one text block horizontally into another to insert and blend the content. The overlapping visual lines have been marked with <overlap> tags.

COLLISION INTENSITY: ${intensityPercent}%

Main text block (with overlapping lines tagged):
${mainTextWithTags}

Text to insert (with overlapping lines tagged):
${insertTextWithTags}

${insertionInstruction}

CRITICAL GUIDELINES:
- Preserve the overall meaning and flow of the texts
- Focus your editing ONLY on the content WITHIN/NEAR <overlap> tags and DO NOT EDIT outside of the tagged areas unless absolutely necessary for coherence
- The tagged lines represent the visual overlap where the collision happened - merge these areas thoughtfully
- Apply the blending intensity guidance above to determine how extensively to merge the content
- KEEP THE TEXT THE SAME LENGTH OR SHORTER THAN THE ORIGINAL TWO TEXT BLOCKS
- DO NOT ADD MARKDOWN FORMATTING OR TAGS (like <>) TO THE TEXT.
- IMPORTANT! If a [CONTEXT] is provided, make sure the edits are relevant to the user's current writing project.

Return only the combined text.)TXT";

constexpr std::string_view kIdeaFormatting =
    R"TXT(CRITICAL FORMATTING REQUIREMENTS:
- Return ONLY a JSON object with two ideas, each containing "gist" and "full" fields
- GIST should be 1 phrase with keywords around 10 words long (doesn't have to be perfectly formatted sentence, and avoid filler words please) that captures the essence of the idea. Make sure idea gists are immediately distinct form each other.
- FULL should be the complete idea (at most 100 words)
- Example: {"ideas": [{"gist": "Flying car automotive + aviation for urban transport.", "full": "A vehicle that combines traditional car functionality with flight capabilities for urban transport, featuring vertical takeoff and landing capabilities, autonomous navigation systems, and hybrid propulsion technology."}, {"gist": "Underwater sustainable city design + marine ecosystem integration.", "full": "An architectural concept for sustainable underwater communities with transparent domes, renewable energy systems, and integrated marine life habitats."}]}
- Do NOT use numbering, bullets, or other prefixes)TXT";

constexpr std::string_view kGenerateIdeaPair =
    R"TXT(You are a creative idea generator. Given a seed idea and a dimension to explore, generate a PAIR of creative ideas that build upon the FULL context of all previous ideas and dimension evolution.

The first idea should be a NEW idea of {seedText} representing the NEXT LEVEL of progression in the specified dimension, and combines prior ideas, making sure it prioritizes {seedText}. It does NOT need to combine ALL ideas, just the most relevant ones.
The second idea should be a VARIANT of that synthesis—a different approach to the combined concept.

What we are generating (the seed): "{seedText}"
How the ideas evolve over time (the dimension to progress in): "{dimension}"

PRIOR IDEAS:
{existingIdeas}

{rootContextLine}

{ideaFormatting}

Guidelines:
- IMPORTANT! If a [CONTEXT] is provided, make sure the idea is relevant to the user's current writing project. However, the idea should still be a {seedText} (we are generating ideas to support the [CONTEXT], not directly generating ideas for the [CONTEXT] directly)
- IMPORTANT! If IDEAS FROM ROOT NETWORK is provided, make sure to include those in the ideas generated
- SPECIAL CASE: If the dimension is "creative", "new", "novel", "original", "fresh", "innovative", or any similar generic term for generating new ideas, then Idea 1 should be a completely NEW and DIFFERENT seed concept that is unrelated to both the current {seedText} and the PRIOR IDEAS. This should be a totally fresh starting point. Idea 2 should still be a variant of this new Idea 1.
- Idea 1 (New Progression): Should be MORE {dimension} than previous ideas, considering the FULL evolution of the ideas. However, do not only be constrained to the history, and be creative.
- Idea 2 (Variant): Must be a creative alternative to Idea 1.
- GIST FORMAT: Each gist should be one phrase with keywords (around 10 words long) that captures the core concept of the idea.

Generate the PAIR of ideas now.)TXT";

constexpr std::string_view kInitialIdeaPair =
    R"TXT(You are a creative idea generator. Generate a PAIR of creative ideas based on the seed and dimension.
The first idea should be a NEW idea formed from the seed text ({seedText}), based on the dimension ({dimension}).
The second idea should be a VARIANT of the first idea (e.g. "A dog with wings" and "A cat with claws").

What we are generating (the seed): "{seedText}"
How the ideas evolve over time (the dimension to progress in): "{dimension}"

{rootContextLine}

{ideaFormatting}

Guidelines:
- IMPORTANT! If a [CONTEXT] is provided, make sure the idea is relevant to the user's current writing project. However, the idea should still be a {seedText} (we are generating ideas to support the [CONTEXT], not directly generating ideas for the [CONTEXT] directly)
- IMPORTANT! If IDEAS FROM ROOT NETWORK is provided, make sure to include those in the ideas generated
- GIST FORMAT: Each gist should be one phrase with keywords (around 10 words long) that captures the core concept of the idea.

Generate the PAIR of ideas now.)TXT";

constexpr std::string_view kVoicePlant = R"TXT(
Extract the SEED (what the user wants ideas on) and DIMENSION (ways the ideas evolve) from the following voice input.
- The SEED should be the core concept the user wants to ideate on.
- The DIMENSION should be a phrase that explains how ideas can vary/be generated along a certain axis. For example, more believable, more creative, etc.
IMPORTANT! If a [CONTEXT] is provided, make sure the seed text and dimension are relevant to the user's current writing project. However, the seed should still be what the user specified (they are generating ideas to support the [CONTEXT], not directly generating ideas for the [CONTEXT] directly)

Example inputs and outputs:
Input: "I want to explore how technology affects human relationships"
Output: { seed: "technology's impact on human relationships", dimension: "digital impact" }

Input: "Let's think about sustainable energy solutions"
Output: { seed: "sustainable energy soltuions", dimension: "sustainability" }

Input: "Consider the role of art in society"
Output: { seed: "art in society", dimension: "creativity" }

If you can't figure out the dimension, just default the dimension to "creativity".

Voice input: "{transcript}"

CRITICAL FORMATTING REQUIREMENTS:
- Keep the SEED short and concise. AVOID BEING VERBOSE. (at most 100 words)
- Keep the DIMENSION short and concise. AVOID BEING VERBOSE. (at most 10 words)
- Return ONLY a JSON object with seed and dimension fields, nothing else.)TXT";

constexpr std::string_view kRootCombine = R"TXT(
You are analyzing a collection of creative ideas that have been combined together. Your task is to synthesize these ideas into a new seed concept and dimension for further ideation.
IMPORTANT! If a [CONTEXT] is provided, make sure the seed text and dimension are relevant to the user's current writing project. However, the seed should still be what the user specified (they are generating ideas to support the [CONTEXT], not directly generating ideas for the [CONTEXT] directly)

The ideas to combine:
{ideas}

Analyze the patterns, themes, and connections between these ideas. Then create:
1. A SEED: The synthesized concept that captures the essence of the combined ideas, and what we want to generate more of
2. A DIMENSION: A phrase that represents the key axis along which this concept can be explored further (e.g. "creativity", "sustainability", "accessibility" etc)

CRITICAL FORMATTING REQUIREMENTS:
- Keep the SEED short and concise. AVOID BEING VERBOSE. (at most 100 words)
- Keep the DIMENSION short and concise. AVOID BEING VERBOSE. (at most 10 words)
- Return ONLY a JSON object with seed and dimension fields, nothing else. Example: { "seed": "sustainable urban mobility", "dimension": "accessibility" })TXT";

using Substitutions = std::vector<std::pair<std::string_view, std::string_view>>;

// Single left-to-right pass: substituted values are never rescanned, so user
// text containing "{seedText}" stays literal.
std::string fill(std::string_view tmpl, const Substitutions& subs) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '$' || tmpl[i] == '{') {
      for (const auto& [token, value] : subs) {
        if (tmpl.substr(i, token.size()) == token) {
          out += value;
          i += token.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

bool has_tagged_segments(std::string_view segments) {
  return segments.find('<') != std::string_view::npos && segments.find('>') != std::string_view::npos;
}

constexpr std::array<std::pair<PromptTemplate, std::string_view>, 12> kTemplateNames{{
    {PromptTemplate::Squeeze, "Squeeze"},
    {PromptTemplate::Stretch, "Stretch"},
    {PromptTemplate::Squash, "Squash"},
    {PromptTemplate::Pinch, "Pinch"},
    {PromptTemplate::Distort, "Distort"},
    {PromptTemplate::VerticalCollision, "VerticalCollision"},
    {PromptTemplate::FullBlend, "FullBlend"},
    {PromptTemplate::HorizontalCollision, "HorizontalCollision"},
    {PromptTemplate::GenerateIdeaPair, "GenerateIdeaPair"},
    {PromptTemplate::InitialIdeaPair, "InitialIdeaPair"},
    {PromptTemplate::VoicePlant, "VoicePlant"},
    {PromptTemplate::RootCombine, "RootCombine"},
}};

}  // namespace

std::string_view to_string(PromptTemplate tmpl) {
  for (const auto& [t, name] : kTemplateNames) {
    if (t == tmpl) return name;
  }
  return "?";
}

PromptTemplate prompt_template_from_string(std::string_view name) {
  for (const auto& [t, n] : kTemplateNames) {
    if (n == name) return t;
  }
  throw Error(ErrorCode::UnknownTemplate, std::string(name));
}

BlendRegime blend_regime_of(Intensity intensity) {
  if (intensity.value() < 0.6) return BlendRegime::Light;
  if (intensity.value() < 0.9) return BlendRegime::Moderate;
  return BlendRegime::Heavy;
}

std::string_view blend_regime(Intensity intensity, PromptTemplate collision_template) {
  const BlendRegime regime = blend_regime_of(intensity);
  if (collision_template == PromptTemplate::VerticalCollision) {
    switch (regime) {
      case BlendRegime::Light:
        return "Light blending: Make minimal changes to create a smooth transition while preserving most original content.";
      case BlendRegime::Moderate:
        return "Moderate blending: Create a natural flow by moderately editing the overlapping areas to merge the concepts.";
      case BlendRegime::Heavy:
        return "Heavy blending: Extensively merge and blend the overlapping content to create a mixed/blended version of the two texts";
    }
  }
  if (collision_template == PromptTemplate::HorizontalCollision) {
    switch (regime) {
      case BlendRegime::Light:
        return "Light blending: Insert with minimal changes, preserving the original structure and making small adjustments for flow.";
      case BlendRegime::Moderate:
        return "Moderate blending: Blend the insertion more naturally by moderately editing both texts to create smoother integration.";
      case BlendRegime::Heavy:
        return "Heavy blending: Extensively merge and weave the content together, creating a deeply integrated unified combined text.";
    }
  }
  throw Error(ErrorCode::InvalidArgument, "blend regime exists only for collision templates");
}

std::string_view position_word(double insert_position) {
  if (insert_position < 0.3) return "beginning";
  if (insert_position > 0.7) return "end";
  return "middle";
}

std::string context_line(const std::optional<std::string>& context) {
  if (!context || context->empty()) return {};
  return "The user is working on: \"" + *context + "\". ";
}

std::string clay_edit_prompt(PromptTemplate tmpl, const ClayEditInput& input) {
  const std::string ctx = context_line(input.context);
  const bool tagged = has_tagged_segments(input.segments);
  std::string_view body;
  switch (tmpl) {
    case PromptTemplate::Squeeze: body = kSqueeze; break;
    case PromptTemplate::Stretch: body = tagged ? kStretchTagged : kStretchFallback; break;
    case PromptTemplate::Squash: body = tagged ? kSquashTagged : kSquashFallback; break;
    case PromptTemplate::Pinch: body = kPinch; break;
    case PromptTemplate::Distort: body = kDistort; break;
    default:
      throw Error(ErrorCode::UnknownTemplate, std::string(to_string(tmpl)) + " is not a clay edit template");
  }
  return fill(body, {{"${contextLine}", ctx},
                     {"${segmentsText}", input.segments},
                     {"${originalText}", input.original_text}});
}

std::string vertical_collision_prompt(std::string_view top_with_tags, std::string_view bottom_with_tags,
                                      Intensity intensity, const std::optional<std::string>& context) {
  const std::string ctx = context_line(context);
  const std::string pct = std::to_string(intensity.percent());
  return fill(kVertical, {{"${contextLine}", ctx},
                          {"${intensityPercent}", pct},
                          {"${blendingGuidance}", blend_regime(intensity, PromptTemplate::VerticalCollision)},
                          {"${topTextWithTags}", top_with_tags},
                          {"${bottomTextWithTags}", bottom_with_tags}});
}

std::string full_blend_prompt(std::string_view first, std::string_view second, Intensity intensity,
                              const std::optional<std::string>& context) {
  const std::string ctx = context_line(context);
  const std::string pct = std::to_string(intensity.percent());
  return fill(kFullBlend, {{"${contextLine}", ctx},
                           {"${intensityPercent}", pct},
                           {"${firstText}", first},
                           {"${secondText}", second}});
}

std::string horizontal_collision_prompt(std::string_view main_with_tags, std::string_view insert_with_tags,
                                        double insert_position, Intensity intensity,
                                        const std::optional<std::string>& context,
                                        const std::optional<std::string>& insert_line_text) {
  std::string instruction;
  if (insert_line_text && !insert_line_text->empty()) {
    instruction = fill(kInsertAtLine, {{"${insertLineText}", *insert_line_text}});
  } else {
    instruction = fill(kInsertAtPosition, {{"${positionDescription}", position_word(insert_position)}});
  }
  const std::string ctx = context_line(context);
  const std::string pct = std::to_string(intensity.percent());
  return fill(kHorizontal, {{"${contextLine}", ctx},
                            {"${intensityPercent}", pct},
                            {"${mainTextWithTags}", main_with_tags},
                            {"${insertTextWithTags}", insert_with_tags},
                            {"${insertionInstruction}", instruction}});
}

std::string generate_idea_pair_prompt(std::string_view seed, std::string_view dimension,
                                      std::string_view existing_ideas, std::string_view root_context_line,
                                      const std::optional<std::string>& context) {
  return context_line(context) + fill(kGenerateIdeaPair, {{"{seedText}", seed},
                                                          {"{dimension}", dimension},
                                                          {"{existingIdeas}", existing_ideas},
                                                          {"{rootContextLine}", root_context_line},
                                                          {"{ideaFormatting}", kIdeaFormatting}});
}

std::string initial_idea_pair_prompt(std::string_view seed, std::string_view dimension,
                                     std::string_view root_context_line,
                                     const std::optional<std::string>& context) {
  return context_line(context) + fill(kInitialIdeaPair, {{"{seedText}", seed},
                                                         {"{dimension}", dimension},
                                                         {"{rootContextLine}", root_context_line},
                                                         {"{ideaFormatting}", kIdeaFormatting}});
}

std::string voice_plant_prompt(std::string_view transcript, const std::optional<std::string>& context) {
  return context_line(context) + fill(kVoicePlant, {{"{transcript}", transcript}});
}

std::string root_combine_prompt(std::string_view ideas, const std::optional<std::string>& context) {
  return context_line(context) + fill(kRootCombine, {{"{ideas}", ideas}});
}

std::string serialize_idea_lines(std::span<const std::string> texts) {
  std::string out;
  for (const auto& t : texts) {
    if (!out.empty()) out += '\n';
    out += "- ";
    out += t;
  }
  return out;
}

std::string serialize_prior_ideas(std::span<const Leaf> leaves) {
  std::vector<std::string> fulls;
  for (const auto& leaf : leaves) {
    if (leaf.is_live()) fulls.push_back(leaf.full);
  }
  return serialize_idea_lines(fulls);
}

std::string root_context_line(std::span<const std::string> imported_texts) {
  if (imported_texts.empty()) return {};
  return "IDEAS FROM ROOT NETWORK:\n" + serialize_idea_lines(imported_texts);
}

namespace {

const SlotValue& slot(const PromptRequest& req, const std::string& name) {
  auto it = req.slots.find(name);
  if (it == req.slots.end()) {
    throw Error(ErrorCode::MissingSlot, std::string(to_string(req.tmpl)) + " requires slot '" + name + "'");
  }
  return it->second;
}

std::string text_slot(const PromptRequest& req, const std::string& name) {
  const auto* s = std::get_if<std::string>(&slot(req, name));
  if (s == nullptr) throw Error(ErrorCode::MissingSlot, "slot '" + name + "' must be a string");
  return *s;
}

std::optional<std::string> optional_text_slot(const PromptRequest& req, const std::string& name) {
  if (!req.slots.contains(name)) return std::nullopt;
  return text_slot(req, name);
}

double number_slot(const PromptRequest& req, const std::string& name) {
  const auto* d = std::get_if<double>(&slot(req, name));
  if (d == nullptr) throw Error(ErrorCode::MissingSlot, "slot '" + name + "' must be a number");
  return *d;
}

}  // namespace

std::string build(const PromptRequest& req) {
  using T = PromptTemplate;
  switch (req.tmpl) {
    case T::Squeeze:
    case T::Stretch:
    case T::Squash:
    case T::Pinch:
    case T::Distort:
      return clay_edit_prompt(req.tmpl, {text_slot(req, "originalText"), text_slot(req, "segments"),
                                         Intensity(number_slot(req, "intensity")), req.context});
    case T::VerticalCollision:
      return vertical_collision_prompt(text_slot(req, "topText"), text_slot(req, "bottomText"),
                                       Intensity(number_slot(req, "intensity")), req.context);
    case T::FullBlend:
      return full_blend_prompt(text_slot(req, "firstText"), text_slot(req, "secondText"),
                               Intensity(number_slot(req, "intensity")), req.context);
    case T::HorizontalCollision: {
      const double pos = number_slot(req, "insertPosition");
      if (!(pos >= 0.0 && pos <= 1.0)) throw Error(ErrorCode::InvalidArgument, "insertPosition outside [0,1]");
      return horizontal_collision_prompt(text_slot(req, "mainText"), text_slot(req, "insertText"), pos,
                                         Intensity(number_slot(req, "intensity")), req.context,
                                         optional_text_slot(req, "insertLineText"));
    }
    case T::GenerateIdeaPair:
      return generate_idea_pair_prompt(text_slot(req, "seedText"), text_slot(req, "dimension"),
                                       text_slot(req, "existingIdeas"),
                                       optional_text_slot(req, "rootContextLine").value_or(""), req.context);
    case T::InitialIdeaPair:
      return initial_idea_pair_prompt(text_slot(req, "seedText"), text_slot(req, "dimension"),
                                      optional_text_slot(req, "rootContextLine").value_or(""), req.context);
    case T::VoicePlant:
      return voice_plant_prompt(text_slot(req, "transcript"), req.context);
    case T::RootCombine:
      return root_combine_prompt(text_slot(req, "ideas"), req.context);
  }
  throw Error(ErrorCode::UnknownTemplate, "unknown template");
}

}  // namespace texterial
