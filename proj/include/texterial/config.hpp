#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "texterial/gateway.hpp"
#include "texterial/geometry.hpp"
#include "texterial/state.hpp"

namespace texterial {

struct ClayConfig {
  double default_block_width = 320.0;
  double rip_gap = 24.0;
  double press_radius = 20.0;
  /// Hold duration that maps to full press intensity.
  double press_full_hold_ms = 2000.0;
};

struct GardenConfig {
  std::int64_t base_interval_ms = 45'000;
  std::int64_t watering_factor = 4;
  std::int64_t watering_window_ms = 60'000;
  /// Horizontal reach of a fern for watering and drop hit tests.
  double fern_half_width = 60.0;
  double fern_height = 240.0;
  /// Backoff before a fern whose growth failed is tried again.
  std::int64_t retry_after_ms = 5'000;
};

enum class ProviderKind { Mock, Live };

struct EngineConfig {
  GeometryConfig geometry;
  ClayConfig clay;
  GardenConfig garden;
  GatewayConfig gateway;
  ProviderKind provider = ProviderKind::Mock;
  LiveProviderConfig live;
};

/// Dotted keys, e.g. {"geometry.full_blend_threshold": 0.9, "garden.base_interval_ms": 30000}.
/// Unknown keys throw InvalidArgument.
void apply_config(EngineConfig& config, const Json& overrides);

/// Defaults, then the optional JSON file, then TEXTERIAL_* environment variables.
EngineConfig load_config(const std::optional<std::filesystem::path>& file);

ProviderKind provider_kind_from_string(std::string_view name);

std::shared_ptr<Provider> make_provider(const EngineConfig& config);

}  // namespace texterial
