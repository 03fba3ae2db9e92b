#include <doctest.h>

#include "oracles.hpp"
#include "test_support.hpp"
#include "texterial/tags.hpp"

using namespace texterial;

TEST_CASE("bracket count follows intensity") {
  CHECK(bracket_count(Intensity(0.0)) == 1);
  CHECK(bracket_count(Intensity(0.24)) == 1);
  CHECK(bracket_count(Intensity(0.25)) == 2);
  CHECK(bracket_count(Intensity(0.5)) == 3);
  CHECK(bracket_count(Intensity(0.75)) == 4);
  CHECK(bracket_count(Intensity(1.0)) == 4);
}

TEST_CASE("emit wraps word-aligned ranges") {
  const std::string text = "The old house stood.";
  CHECK(emit_marked(text, {4, 13}, MarkerKind::Squeeze, 2) == "The <<squeeze>>old house<</squeeze>> stood.");
  CHECK(emit_marked(text, {4, 7}, MarkerKind::Overlap, 3) == "The <overlap>old</overlap> house stood.");
  CHECK_THROWS_AS_CODE(emit_marked(text, {5, 13}, MarkerKind::Pinch, 1), ErrorCode::MisalignedRange);
  CHECK_THROWS_AS_CODE(emit_marked(text, {4, 4}, MarkerKind::Pinch, 1), ErrorCode::MisalignedRange);
  CHECK(is_word_aligned(text, {0, 3}));
  CHECK_FALSE(is_word_aligned(text, {0, 2}));
}

TEST_CASE("user text is escaped") {
  CHECK(escape_markup("a<b \\ c") == "a\\<b \\\\ c");
  const std::string text = "if a<b then <<squeeze>> \\ done";
  const auto parsed = parse_marked(emit_marked(text, {0, 2}, MarkerKind::Smudge, 4));
  CHECK(parsed.plain == text);
  REQUIRE(parsed.tags.size() == 1);
  CHECK(parsed.tags[0].range == CharRange{0, 2});
  CHECK(parsed.tags[0].level == 4);
}

TEST_CASE("several tags at once") {
  const std::string text = "one two three four";
  const std::vector<Tag> tags{{MarkerKind::Overlap, {0, 7}, 1}, {MarkerKind::Pinch, {14, 18}, 2}};
  const std::string marked = emit_tags(text, tags);
  CHECK(marked == "<overlap>one two</overlap> three <<pinch>>four<</pinch>>");
  const auto parsed = parse_marked(marked);
  CHECK(parsed.plain == text);
  CHECK(parsed.tags == tags);
}

TEST_CASE("unbalanced and unknown markers survive as text") {
  const auto a = parse_marked("keep <<squeeze>>this open");
  CHECK(a.plain == "keep <<squeeze>>this open");
  REQUIRE(a.warnings.size() == 1);
  CHECK(a.warnings[0].kind == TagWarningKind::UnbalancedMarker);

  const auto b = parse_marked("a <frobnicate>b</frobnicate> c");
  CHECK(b.plain == "a <frobnicate>b</frobnicate> c");
  CHECK(b.tags.empty());
  CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("tag_lines wraps whole visual lines") {
  const TextLayout l = monospace_layout("aaa bbb\nccc ddd", {0, 0}, 400.0, GeometryConfig{});
  const std::vector<std::size_t> second{1};
  CHECK(tag_lines(l, second) == "aaa bbb\n<overlap>ccc ddd</overlap>");
}

TEST_CASE("model artifacts are stripped") {
  CHECK(strip_model_artifacts("```\nHello **there**.\n```") == "Hello there.");
  CHECK(strip_model_artifacts("A <<squeeze>>tight<</squeeze>> fit.") == "A tight fit.");
  CHECK(strip_model_artifacts("a\n\n\n\n\nb") == "a\n\nb");
  CHECK_THROWS_AS_CODE(strip_model_artifacts("```\n```"), ErrorCode::EmptyCompletion);
  CHECK_THROWS_AS_CODE(strip_model_artifacts("  \n "), ErrorCode::EmptyCompletion);
}

TEST_CASE("randomized round trip") {
  const auto out = oracles::tag_round_trip(2024, 1000);
  CHECK_MESSAGE(out.ok(), out.first_failure);
}
