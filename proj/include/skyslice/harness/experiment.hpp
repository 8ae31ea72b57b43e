#pragma once

#include "skyslice/harness/config.hpp"
#include "skyslice/harness/metrics.hpp"
#include "skyslice/marl/env.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace skyslice::harness {

enum class Algorithm { Maddpg, Greedy, Madqn };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view name);

struct RunSpec {
  std::string name;
  Algorithm algorithm = Algorithm::Maddpg;
  marl::EnvConfig env;
  marl::LearnerConfig learner;
  std::uint64_t seed = 1;
};

struct RunOutcome {
  RunSpec spec;
  std::vector<marl::EpisodeRecord> episodes;
  RunSummary summary;
  double wall_seconds = 0.0;
};

/// Trains (or, for the traversal baseline, runs) one configuration. When
/// `checkpoint_dir` is non-empty a trained MADDPG learner is saved there.
RunOutcome execute(const RunSpec& spec, const std::filesystem::path& checkpoint_dir = {});

struct SuiteResult {
  std::string suite;
  std::vector<RunOutcome> runs;
  nlohmann::ordered_json summary;
};

using ProgressFn = std::function<void(const RunOutcome&)>;

const std::vector<std::string>& suite_names();

/// Expands a suite into its runs. Throws ConfigError for an unknown suite.
std::vector<RunSpec> plan_suite(const ScenarioConfig& config, std::string_view suite);

/// Executes every run of a suite. With a non-empty `out`, writes per-run
/// metric files, `summary.json` and `timing.json` there.
SuiteResult run_suite(const ScenarioConfig& config, std::string_view suite, const std::filesystem::path& out,
                      const ProgressFn& progress = {});

/// Suite-level digest (per-run summaries plus the comparisons each suite is
/// about) computed from finished runs.
nlohmann::ordered_json summarize_suite(std::string_view suite, const std::vector<RunOutcome>& runs);

/// Pairs compared by the velocity sweep.
struct VelocityPair {
  double low;
  double high;
};
const std::vector<VelocityPair>& equal_gap_velocities();
const std::vector<VelocityPair>& fixed_low_velocities();
const std::vector<double>& preassess_scales();

}  // namespace skyslice::harness
