#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "texterial/model.hpp"
#include "texterial/state.hpp"

namespace texterial {

enum class PromptTemplate {
  Squeeze,
  Stretch,
  Squash,
  Pinch,
  Distort,
  VerticalCollision,
  FullBlend,
  HorizontalCollision,
  GenerateIdeaPair,
  InitialIdeaPair,
  VoicePlant,
  RootCombine,
};

std::string_view to_string(PromptTemplate tmpl);
/// Throws UnknownTemplate.
PromptTemplate prompt_template_from_string(std::string_view name);

using SlotValue = std::variant<std::string, double>;

/// Slot names per template:
///   Squeeze/Stretch/Squash/Pinch/Distort: originalText, segments, intensity
///   VerticalCollision: topText, bottomText, intensity
///   FullBlend: firstText, secondText, intensity
///   HorizontalCollision: mainText, insertText, insertPosition, intensity, [insertLineText]
///   GenerateIdeaPair: seedText, dimension, existingIdeas, [rootContextLine]
///   InitialIdeaPair: seedText, dimension, [rootContextLine]
///   VoicePlant: transcript
///   RootCombine: ideas
struct PromptRequest {
  PromptTemplate tmpl = PromptTemplate::Squeeze;
  std::map<std::string, SlotValue> slots;
  std::optional<std::string> context;
};

/// Renders the template. Throws MissingSlot when a referenced slot is absent
/// or of the wrong type, InvalidArgument when an intensity is outside [0,1].
std::string build(const PromptRequest& request);

enum class BlendRegime { Light, Moderate, Heavy };

BlendRegime blend_regime_of(Intensity intensity);

/// Template-specific guidance sentence; only the two collision templates
/// carry one (throws InvalidArgument otherwise).
std::string_view blend_regime(Intensity intensity, PromptTemplate collision_template);

/// "beginning" below 0.3, "end" above 0.7, else "middle".
std::string_view position_word(double insert_position);

std::string context_line(const std::optional<std::string>& context);

struct ClayEditInput {
  std::string original_text;
  std::string segments;
  Intensity intensity;
  std::optional<std::string> context;
};

std::string clay_edit_prompt(PromptTemplate tmpl, const ClayEditInput& input);

std::string vertical_collision_prompt(std::string_view top_with_tags, std::string_view bottom_with_tags,
                                      Intensity intensity, const std::optional<std::string>& context);

std::string full_blend_prompt(std::string_view first, std::string_view second, Intensity intensity,
                              const std::optional<std::string>& context);

std::string horizontal_collision_prompt(std::string_view main_with_tags, std::string_view insert_with_tags,
                                        double insert_position, Intensity intensity,
                                        const std::optional<std::string>& context,
                                        const std::optional<std::string>& insert_line_text);

std::string generate_idea_pair_prompt(std::string_view seed, std::string_view dimension,
                                      std::string_view existing_ideas, std::string_view root_context_line,
                                      const std::optional<std::string>& context);

std::string initial_idea_pair_prompt(std::string_view seed, std::string_view dimension,
                                     std::string_view root_context_line,
                                     const std::optional<std::string>& context);

std::string voice_plant_prompt(std::string_view transcript, const std::optional<std::string>& context);

std::string root_combine_prompt(std::string_view ideas, const std::optional<std::string>& context);

/// "- " + text per line, joined with '\n'; empty for no entries.
std::string serialize_idea_lines(std::span<const std::string> texts);

/// Live (Active or Preserved) leaves only, in the given order.
std::string serialize_prior_ideas(std::span<const Leaf> leaves);

/// Empty when there is nothing imported; otherwise the root-network block.
std::string root_context_line(std::span<const std::string> imported_texts);

}  // namespace texterial
