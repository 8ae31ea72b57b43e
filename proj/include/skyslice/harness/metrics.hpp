#pragma once

#include "skyslice/marl/env.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace skyslice::harness {

inline constexpr const char* kSliceHeader =
    "episode,slice_id,reward,sat_sum,sat_mean,op_cost,vio_cost,band_frac,beam_frac,comp_frac,unpaired";
inline constexpr const char* kEpisodeHeader =
    "episode,reward,sat_mean,op_cost,vio_cost,unpaired_cost,consumption,level,objective,mean_abs_action";

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// One row per episode and slice.
std::string slice_csv(const std::vector<marl::EpisodeRecord>& episodes);

/// One row per episode with system totals.
std::string episode_csv(const std::vector<marl::EpisodeRecord>& episodes);

/// Means over the trailing `tail` fraction of episodes.
struct RunSummary {
  std::string name;
  std::string algorithm;
  std::uint64_t seed = 0;
  int episodes = 0;
  double reward = 0.0;
  double satisfaction = 0.0;
  double op_cost = 0.0;
  double vio_cost = 0.0;
  double total_cost = 0.0;
  double consumption = 0.0;
  double objective = 0.0;
};

RunSummary summarize(const std::string& name, const std::string& algorithm, std::uint64_t seed,
                     const std::vector<marl::EpisodeRecord>& episodes, double tail = 0.25);

nlohmann::ordered_json to_json(const RunSummary& s);

/// Writes `<name>.csv` and `<name>.episodes.csv` under `dir`.
void write_run(const std::filesystem::path& dir, const std::string& name,
               const std::vector<marl::EpisodeRecord>& episodes);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace skyslice::harness
