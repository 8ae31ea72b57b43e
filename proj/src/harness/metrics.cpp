#include "skyslice/harness/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skyslice::harness {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string slice_csv(const std::vector<marl::EpisodeRecord>& episodes) {
  std::ostringstream out;
  out << kSliceHeader << '\n';
  for (const marl::EpisodeRecord& e : episodes) {
    for (Eigen::Index q = 0; q < e.reward.size(); ++q) {
      out << e.episode << ',' << q << ',' << format_number(e.reward[q]) << ','
          << format_number(e.sat_sum[q]) << ',' << format_number(e.sat_mean[q]) << ','
          << format_number(e.op_cost[q]) << ',' << format_number(e.vio_cost[q]) << ','
          << format_number(e.fractions(0, q)) << ',' << format_number(e.fractions(1, q)) << ','
          << format_number(e.fractions(2, q)) << ',' << e.unpaired << '\n';
    }
  }
  return out.str();
}

std::string episode_csv(const std::vector<marl::EpisodeRecord>& episodes) {
  std::ostringstream out;
  out << kEpisodeHeader << '\n';
  for (const marl::EpisodeRecord& e : episodes) {
    out << e.episode << ',' << format_number(e.total_reward()) << ','
        << format_number(e.mean_satisfaction()) << ',' << format_number(e.total_op_cost()) << ','
        << format_number(e.total_vio_cost()) << ',' << format_number(e.unpaired_cost) << ','
        << format_number(e.consumption) << ',' << format_number(e.level) << ',' << format_number(e.objective) << ','
        << format_number(e.mean_abs_action) << '\n';
  }
  return out.str();
}

RunSummary summarize(const std::string& name, const std::string& algorithm, std::uint64_t seed,
                     const std::vector<marl::EpisodeRecord>& episodes, double tail) {
  RunSummary s{name, algorithm, seed, static_cast<int>(episodes.size())};
  if (episodes.empty()) return s;
  const auto n = episodes.size();
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(tail * static_cast<double>(n))), 1, n);
  for (std::size_t i = n - k; i < n; ++i) {
    const marl::EpisodeRecord& e = episodes[i];
    s.reward += e.total_reward();
    s.satisfaction += e.mean_satisfaction();
    s.op_cost += e.total_op_cost();
    s.vio_cost += e.total_vio_cost();
    s.consumption += e.consumption;
    s.objective += e.objective;
  }
  const double d = static_cast<double>(k);
  s.reward /= d;
  s.satisfaction /= d;
  s.op_cost /= d;
  s.vio_cost /= d;
  s.consumption /= d;
  s.objective /= d;
  s.total_cost = s.op_cost + s.vio_cost;
  return s;
}

nlohmann::ordered_json to_json(const RunSummary& s) {
  return {{"name", s.name},
          {"algorithm", s.algorithm},
          {"seed", s.seed},
          {"episodes", s.episodes},
          {"reward", s.reward},
          {"satisfaction", s.satisfaction},
          {"op_cost", s.op_cost},
          {"vio_cost", s.vio_cost},
          {"total_cost", s.total_cost},
          {"consumption", s.consumption},
          {"objective", s.objective}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_run(const std::filesystem::path& dir, const std::string& name,
               const std::vector<marl::EpisodeRecord>& episodes) {
  write_text(dir / (name + ".csv"), slice_csv(episodes));
  write_text(dir / (name + ".episodes.csv"), episode_csv(episodes));
}

}  // namespace skyslice::harness
