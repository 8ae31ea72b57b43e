#pragma once

#include "skyslice/marl/learner_config.hpp"
#include "skyslice/marl/slice_env.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace skyslice::harness {

/// Regular eVTOL placement: `per_layer` aircraft in every layer, the k-th at
/// x[k mod |x|], all starting on the ground at y = start_y.
struct EvtolPlacement {
  int per_layer = 3;
  std::vector<double> x = {-1500.0, 0.0, 1500.0};
  double start_y = 3000.0;
  int land_at_step = -1;

  bool operator==(const EvtolPlacement&) const = default;
};

struct ScenarioConfig {
  marl::EnvConfig env;  // env.evtols is rebuilt from `placement`
  EvtolPlacement placement;
  marl::LearnerConfig learner;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string output = "results";

  /// env with the eVTOL list expanded from the placement.
  marl::EnvConfig build_env() const;
  void validate() const;
};

/// Full-scale defaults.
ScenarioConfig default_config();

/// Reduced episode budget used by the acceptance suite.
ScenarioConfig desk_preset();

/// Parses JSON text layered over default_config(). Empty text yields the
/// defaults. Unknown keys, type mismatches and invalid values throw
/// ConfigError naming the key and its line.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string dump_config(const ScenarioConfig& config);

}  // namespace skyslice::harness
