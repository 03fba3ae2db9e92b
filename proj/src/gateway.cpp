#include "texterial/gateway.hpp"

#include <set>
#include <sstream>

#include "texterial/state.hpp"
#include "texterial/tags.hpp"

namespace texterial {

namespace {

// Strips one surrounding ``` fence (with optional language tag). Anything else
// around the object is left for the JSON parser to reject.
std::string unfence(std::string_view response) {
  std::string s = trim(response);
  if (s.rfind("```", 0) != 0) return s;
  const auto first_nl = s.find('\n');
  if (first_nl == std::string::npos) return s;
  const auto last_fence = s.rfind("```");
  if (last_fence == std::string::npos || last_fence <= first_nl) return s;
  if (!is_blank(std::string_view(s).substr(last_fence + 3))) return s;
  return trim(std::string_view(s).substr(first_nl + 1, last_fence - first_nl - 1));
}

Json parse_object(std::string_view response) {
  Json j;
  try {
    j = Json::parse(unfence(response));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedJson, "expected a JSON object");
  return j;
}

std::string string_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::MalformedJson, std::string("missing key '") + key + "'");
  if (!it->is_string()) throw Error(ErrorCode::MalformedJson, std::string("'") + key + "' is not a string");
  return it->get<std::string>();
}

// Residual markers are removed field by field; a field that strips to nothing
// is reported as empty.
std::string clean_field(const std::string& value) {
  try {
    return strip_model_artifacts(value);
  } catch (const Error&) {
    return {};
  }
}

}  // namespace

std::string truncate_words(std::string_view text, std::size_t max_words) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::string out;
  for (std::size_t n = 0; n < max_words && in >> word; ++n) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

IdeaPair parse_idea_pair(std::string_view response) {
  const Json j = parse_object(response);
  auto it = j.find("ideas");
  if (it == j.end()) throw Error(ErrorCode::MalformedJson, "missing key 'ideas'");
  if (!it->is_array()) throw Error(ErrorCode::MalformedJson, "'ideas' is not an array");
  if (it->size() != 2) {
    throw Error(ErrorCode::CardinalityViolation, "expected 2 ideas, got " + std::to_string(it->size()));
  }

  IdeaPair pair;
  for (std::size_t i = 0; i < 2; ++i) {
    const Json& entry = (*it)[i];
    if (!entry.is_object()) throw Error(ErrorCode::MalformedJson, "idea entry is not an object");
    Idea idea{clean_field(string_field(entry, "gist")), clean_field(string_field(entry, "full"))};
    if (is_blank(idea.gist)) throw Error(ErrorCode::LengthViolation, "empty gist");
    if (is_blank(idea.full)) throw Error(ErrorCode::LengthViolation, "empty full text");
    const std::size_t full_words = word_count(idea.full);
    if (full_words > kMaxFullWords) {
      throw Error(ErrorCode::LengthViolation, "full text has " + std::to_string(full_words) + " words");
    }
    const std::size_t gist_words = word_count(idea.gist);
    if (gist_words > kMaxGistWords) {
      pair.warnings.push_back("gist " + std::to_string(i + 1) + " has " + std::to_string(gist_words) + " words");
    }
    pair.ideas[i] = std::move(idea);
  }
  if (pair.ideas[0].gist == pair.ideas[1].gist) {
    throw Error(ErrorCode::CardinalityViolation, "the two gists are identical");
  }
  return pair;
}

SeedDimension parse_seed_dimension(std::string_view response) {
  const Json j = parse_object(response);
  SeedDimension out;
  out.seed = trim(clean_field(string_field(j, "seed")));
  if (out.seed.empty()) throw Error(ErrorCode::MalformedJson, "blank seed");

  auto dim = j.find("dimension");
  if (dim != j.end() && !dim->is_null() && !dim->is_string()) {
    throw Error(ErrorCode::MalformedJson, "'dimension' is not a string");
  }
  if (dim != j.end() && dim->is_string()) out.dimension = trim(clean_field(dim->get<std::string>()));
  if (out.dimension.empty()) out.dimension = kDefaultDimension;

  if (word_count(out.seed) > kMaxSeedWords) {
    out.seed = truncate_words(out.seed, kMaxSeedWords);
    out.warnings.push_back("seed truncated to " + std::to_string(kMaxSeedWords) + " words");
  }
  if (word_count(out.dimension) > kMaxDimensionWords) {
    out.dimension = truncate_words(out.dimension, kMaxDimensionWords);
    out.warnings.push_back("dimension truncated to " + std::to_string(kMaxDimensionWords) + " words");
  }
  return out;
}

std::string MockProvider::complete(const CompletionRequest& request, std::chrono::milliseconds) {
  return mock_response(request.tmpl, request.prompt);
}

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayConfig config)
    : provider_(std::move(provider)), config_(config) {
  if (!provider_) throw Error(ErrorCode::InvalidArgument, "gateway needs a provider");
}

std::string Gateway::raw_with_retry(const CompletionRequest& request) {
  if (is_blank(request.prompt)) throw Error(ErrorCode::InvalidArgument, "empty prompt");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (int attempt = 0;; ++attempt) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start);
    const auto remaining = config_.deadline - elapsed;
    if (remaining.count() <= 0) throw ProviderFailure(ErrorCode::ProviderTimeout, 0, "deadline exhausted");
    // The first attempt gets half the budget so a timeout leaves room for the retry.
    const auto budget = attempt == 0 ? remaining / 2 : remaining;
    try {
      return provider_->complete(request, budget);
    } catch (const ProviderFailure& e) {
      if (attempt > 0 || !e.retryable()) throw;
    }
  }
}

std::string Gateway::complete(const CompletionRequest& request) {
  return strip_model_artifacts(raw_with_retry(request));
}

IdeaPair Gateway::complete_idea_pair(const CompletionRequest& request) {
  if (request.tmpl != PromptTemplate::GenerateIdeaPair && request.tmpl != PromptTemplate::InitialIdeaPair) {
    throw Error(ErrorCode::InvalidArgument, "idea pairs need an idea-pair template");
  }
  try {
    return parse_idea_pair(raw_with_retry(request));
  } catch (const ProviderFailure&) {
    throw;
  } catch (const Error&) {
    CompletionRequest again = request;
    again.prompt += "\n\nReturn ONLY the JSON object.";
    return parse_idea_pair(raw_with_retry(again));
  }
}

SeedDimension Gateway::complete_seed_dimension(const CompletionRequest& request) {
  if (request.tmpl != PromptTemplate::VoicePlant && request.tmpl != PromptTemplate::RootCombine) {
    throw Error(ErrorCode::InvalidArgument, "seed extraction needs VoicePlant or RootCombine");
  }
  try {
    return parse_seed_dimension(raw_with_retry(request));
  } catch (const ProviderFailure&) {
    throw;
  } catch (const Error&) {
    CompletionRequest again = request;
    again.prompt += "\n\nReturn ONLY the JSON object.";
    return parse_seed_dimension(raw_with_retry(again));
  }
}

}  // namespace texterial
