#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texterial/error.hpp"
#include "texterial/prompts.hpp"

namespace texterial {

struct CompletionRequest {
  std::string prompt;
  PromptTemplate tmpl = PromptTemplate::Squeeze;
  std::optional<int> max_words_hint;
  std::string request_id;
};

struct Idea {
  std::string gist;
  std::string full;

  friend bool operator==(const Idea&, const Idea&) = default;
};

struct IdeaPair {
  std::array<Idea, 2> ideas;
  std::vector<std::string> warnings;
};

struct SeedDimension {
  std::string seed;
  std::string dimension;
  std::vector<std::string> warnings;
};

/// Failure reported by a provider. `status` is the HTTP status, or 0 when no
/// response arrived at all.
class ProviderFailure : public Error {
 public:
  ProviderFailure(ErrorCode code, int status, const std::string& message)
      : Error(code, message), status_(status) {}

  int status() const noexcept { return status_; }
  /// Timeouts and connection failures are worth one more attempt.
  bool retryable() const noexcept { return code() == ErrorCode::ProviderTimeout || status_ == 0; }

 private:
  int status_;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string_view name() const = 0;
  /// Raw completion text. Throws ProviderFailure.
  virtual std::string complete(const CompletionRequest& request, std::chrono::milliseconds timeout) = 0;
};

/// Pure function of (template, prompt); see mock_response.
class MockProvider : public Provider {
 public:
  std::string_view name() const override { return "mock"; }
  std::string complete(const CompletionRequest& request, std::chrono::milliseconds timeout) override;
};

/// Deterministic stand-in model output for a built prompt.
std::string mock_response(PromptTemplate tmpl, std::string_view prompt);

struct LiveProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "gpt-4o";
  std::optional<double> temperature;
};

/// Chat-completions style HTTP provider.
class LiveProvider : public Provider {
 public:
  explicit LiveProvider(LiveProviderConfig config);
  std::string_view name() const override { return "live"; }
  std::string complete(const CompletionRequest& request, std::chrono::milliseconds timeout) override;

 private:
  LiveProviderConfig config_;
};

struct GatewayConfig {
  std::chrono::milliseconds deadline{30'000};
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Provider> provider, GatewayConfig config = {});

  /// Cleaned completion. Retries once on timeout or connection failure while
  /// the deadline allows.
  std::string complete(const CompletionRequest& request);

  /// Parses and validates an idea pair; on a hard failure re-asks once with
  /// an explicit JSON-only instruction appended.
  IdeaPair complete_idea_pair(const CompletionRequest& request);

  SeedDimension complete_seed_dimension(const CompletionRequest& request);

  const Provider& provider() const { return *provider_; }

 private:
  std::string raw_with_retry(const CompletionRequest& request);

  std::shared_ptr<Provider> provider_;
  GatewayConfig config_;
};

inline constexpr std::size_t kMaxGistWords = 15;
inline constexpr std::size_t kMaxFullWords = 120;
inline constexpr std::size_t kMaxSeedWords = 120;
inline constexpr std::size_t kMaxDimensionWords = 12;
inline constexpr std::string_view kDefaultDimension = "creativity";

/// Accepts a bare JSON object or one wrapped in a single code fence.
/// Throws MalformedJson, CardinalityViolation, LengthViolation.
IdeaPair parse_idea_pair(std::string_view response);

/// Throws MalformedJson. A missing or blank dimension becomes "creativity".
SeedDimension parse_seed_dimension(std::string_view response);

/// First `max_words` whitespace-delimited words joined by single spaces.
std::string truncate_words(std::string_view text, std::size_t max_words);

}  // namespace texterial
