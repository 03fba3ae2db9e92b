#include "texterial/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "texterial/error.hpp"

namespace texterial {

namespace {

using Setter = std::function<void(EngineConfig&, const Json&)>;

template <typename T>
Setter number(T EngineConfig::*group, double T::*field) {
  return [group, field](EngineConfig& c, const Json& v) { (c.*group).*field = v.get<double>(); };
}

template <typename T>
Setter integer(T EngineConfig::*group, std::int64_t T::*field) {
  return [group, field](EngineConfig& c, const Json& v) { (c.*group).*field = v.get<std::int64_t>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"geometry.full_blend_threshold", number(&EngineConfig::geometry, &GeometryConfig::full_blend_threshold)},
      {"geometry.influence_threshold", number(&EngineConfig::geometry, &GeometryConfig::influence_threshold)},
      {"geometry.brush_radius", number(&EngineConfig::geometry, &GeometryConfig::brush_radius)},
      {"geometry.cell_w", number(&EngineConfig::geometry, &GeometryConfig::cell_w)},
      {"geometry.cell_h", number(&EngineConfig::geometry, &GeometryConfig::cell_h)},
      {"clay.default_block_width", number(&EngineConfig::clay, &ClayConfig::default_block_width)},
      {"clay.rip_gap", number(&EngineConfig::clay, &ClayConfig::rip_gap)},
      {"clay.press_radius", number(&EngineConfig::clay, &ClayConfig::press_radius)},
      {"clay.press_full_hold_ms", number(&EngineConfig::clay, &ClayConfig::press_full_hold_ms)},
      {"garden.base_interval_ms", integer(&EngineConfig::garden, &GardenConfig::base_interval_ms)},
      {"garden.watering_factor", integer(&EngineConfig::garden, &GardenConfig::watering_factor)},
      {"garden.watering_window_ms", integer(&EngineConfig::garden, &GardenConfig::watering_window_ms)},
      {"garden.fern_half_width", number(&EngineConfig::garden, &GardenConfig::fern_half_width)},
      {"garden.fern_height", number(&EngineConfig::garden, &GardenConfig::fern_height)},
      {"garden.retry_after_ms", integer(&EngineConfig::garden, &GardenConfig::retry_after_ms)},
      {"gateway.deadline_seconds",
       [](EngineConfig& c, const Json& v) {
         c.gateway.deadline = std::chrono::milliseconds(static_cast<std::int64_t>(v.get<double>() * 1000.0));
       }},
      {"provider", [](EngineConfig& c, const Json& v) { c.provider = provider_kind_from_string(v.get<std::string>()); }},
      {"live.base_url", [](EngineConfig& c, const Json& v) { c.live.base_url = v.get<std::string>(); }},
      {"live.api_key", [](EngineConfig& c, const Json& v) { c.live.api_key = v.get<std::string>(); }},
      {"live.model", [](EngineConfig& c, const Json& v) { c.live.model = v.get<std::string>(); }},
      {"live.temperature", [](EngineConfig& c, const Json& v) { c.live.temperature = v.get<double>(); }},
  };
  return table;
}

void validate(const EngineConfig& c) {
  if (c.garden.base_interval_ms <= 0) throw Error(ErrorCode::InvalidArgument, "garden.base_interval_ms must be > 0");
  if (c.garden.watering_factor < 1) throw Error(ErrorCode::InvalidArgument, "garden.watering_factor must be >= 1");
  if (c.geometry.cell_w <= 0 || c.geometry.cell_h <= 0) throw Error(ErrorCode::InvalidArgument, "cell size must be > 0");
  if (c.clay.default_block_width < c.geometry.cell_w) {
    throw Error(ErrorCode::InvalidArgument, "clay.default_block_width is narrower than one cell");
  }
  if (c.gateway.deadline.count() <= 0) throw Error(ErrorCode::InvalidArgument, "gateway deadline must be > 0");
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace

ProviderKind provider_kind_from_string(std::string_view name) {
  if (name == "mock") return ProviderKind::Mock;
  if (name == "live") return ProviderKind::Live;
  throw Error(ErrorCode::InvalidArgument, "provider must be mock or live, got '" + std::string(name) + "'");
}

void apply_config(EngineConfig& config, const Json& overrides) {
  if (!overrides.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const Json::exception&) {
      throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' has the wrong type");
    }
  }
  validate(config);
}

EngineConfig load_config(const std::optional<std::filesystem::path>& file) {
  EngineConfig config;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + file->string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, file->string() + ": " + e.what());
    }
    apply_config(config, j);
  }
  if (auto v = env("TEXTERIAL_PROVIDER")) config.provider = provider_kind_from_string(*v);
  if (auto v = env("TEXTERIAL_API_BASE")) config.live.base_url = *v;
  if (auto v = env("TEXTERIAL_API_KEY")) config.live.api_key = *v;
  if (auto v = env("TEXTERIAL_MODEL")) config.live.model = *v;
  validate(config);
  return config;
}

std::shared_ptr<Provider> make_provider(const EngineConfig& config) {
  if (config.provider == ProviderKind::Live) return std::make_shared<LiveProvider>(config.live);
  return std::make_shared<MockProvider>();
}

}  // namespace texterial
