#include "skyslice/harness/experiment.hpp"

#include "skyslice/errors.hpp"
#include "skyslice/marl/greedy.hpp"
#include "skyslice/marl/maddpg.hpp"
#include "skyslice/marl/madqn.hpp"
#include "skyslice/marl/slice_env.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace skyslice::harness {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kLearnerStream = 0x9e3779b97f4a7c15ULL;

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

std::string number_tag(double v) {
  std::string s = format_number(v);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double relative_change(double value, double reference) {
  if (reference == 0.0) return value == 0.0 ? 0.0 : INFINITY;
  return (value - reference) / std::abs(reference);
}

RunSpec base_spec(const ScenarioConfig& c, Algorithm a, std::uint64_t seed, const std::string& name) {
  return RunSpec{name, a, c.build_env(), c.learner, seed};
}

const RunOutcome* find_run(const std::vector<RunOutcome>& runs, const std::string& name) {
  for (const RunOutcome& r : runs)
    if (r.spec.name == name) return &r;
  return nullptr;
}

std::string compare_name(Algorithm a, std::uint64_t seed) {
  return "compare_" + std::string(to_string(a)) + "_" + seed_tag(seed);
}
std::string pairing_name(bool priority, std::uint64_t seed) {
  return std::string("pairing_") + (priority ? "priority" : "random") + "_" + seed_tag(seed);
}
std::string preassess_name(double scale, bool on, std::uint64_t seed) {
  return "preassess_scale" + number_tag(scale) + (on ? "_with_" : "_without_") + seed_tag(seed);
}
std::string velocity_name(const char* sweep, VelocityPair v, std::uint64_t seed) {
  return std::string("velocity_") + sweep + "_" + number_tag(v.low) + "_" + number_tag(v.high) + "_" +
         seed_tag(seed);
}

std::vector<std::uint64_t> seeds_of(const std::vector<RunOutcome>& runs) {
  std::vector<std::uint64_t> seeds;
  for (const RunOutcome& r : runs)
    if (std::find(seeds.begin(), seeds.end(), r.spec.seed) == seeds.end()) seeds.push_back(r.spec.seed);
  return seeds;
}

ordered_json compare_digest(const std::vector<RunOutcome>& runs) {
  const Algorithm algos[] = {Algorithm::Maddpg, Algorithm::Greedy, Algorithm::Madqn};
  ordered_json per_seed = ordered_json::array();
  std::map<Algorithm, std::vector<double>> rewards;
  int ordered = 0;
  for (std::uint64_t seed : seeds_of(runs)) {
    ordered_json row{{"seed", seed}};
    double r[3] = {0, 0, 0};
    bool complete = true;
    for (int k = 0; k < 3; ++k) {
      const RunOutcome* run = find_run(runs, compare_name(algos[k], seed));
      if (run == nullptr) {
        complete = false;
        continue;
      }
      r[k] = run->summary.reward;
      rewards[algos[k]].push_back(r[k]);
      row[std::string(to_string(algos[k]))] = r[k];
    }
    const bool ok = complete && r[0] > r[1] && r[1] > r[2];
    row["ordered"] = ok;
    ordered += ok ? 1 : 0;
    per_seed.push_back(row);
  }
  ordered_json aggregate;
  for (Algorithm a : algos) aggregate[std::string(to_string(a))] = mean_of(rewards[a]);
  return {{"per_seed", per_seed},
          {"aggregate_reward", aggregate},
          {"ordered_seeds", ordered},
          {"maddpg_margin_over_greedy",
           relative_change(mean_of(rewards[Algorithm::Maddpg]), mean_of(rewards[Algorithm::Greedy]))}};
}

ordered_json pairing_digest(const std::vector<RunOutcome>& runs) {
  ordered_json per_seed = ordered_json::array();
  int wins = 0;
  for (std::uint64_t seed : seeds_of(runs)) {
    const RunOutcome* p = find_run(runs, pairing_name(true, seed));
    const RunOutcome* r = find_run(runs, pairing_name(false, seed));
    if (p == nullptr || r == nullptr) continue;
    const bool win = p->summary.reward > r->summary.reward;
    wins += win ? 1 : 0;
    per_seed.push_back(
        {{"seed", seed}, {"priority", p->summary.reward}, {"random", r->summary.reward}, {"priority_wins", win}});
  }
  return {{"per_seed", per_seed}, {"priority_wins", wins}};
}

ordered_json preassess_digest(const std::vector<RunOutcome>& runs) {
  ordered_json per_scale = ordered_json::array();
  for (double scale : preassess_scales()) {
    std::vector<double> cons[2], op[2], vio[2];
    for (const RunOutcome& r : runs) {
      for (int on = 0; on < 2; ++on)
        if (r.spec.name == preassess_name(scale, on == 1, r.spec.seed)) {
          cons[on].push_back(r.summary.consumption);
          op[on].push_back(r.summary.op_cost);
          vio[on].push_back(r.summary.vio_cost);
        }
    }
    if (cons[0].empty() || cons[1].empty()) continue;
    const double without = mean_of(cons[0]), with = mean_of(cons[1]);
    per_scale.push_back({{"scale", scale},
                         {"consumption_with", with},
                         {"consumption_without", without},
                         {"saving", without > 0 ? 1.0 - with / without : 0.0},
                         {"op_cost_with", mean_of(op[1])},
                         {"op_cost_without", mean_of(op[0])},
                         {"op_cost_change", relative_change(mean_of(op[1]), mean_of(op[0]))},
                         {"vio_cost_with", mean_of(vio[1])},
                         {"vio_cost_without", mean_of(vio[0])},
                         {"vio_cost_change", relative_change(mean_of(vio[1]), mean_of(vio[0]))}});
  }
  return {{"per_scale", per_scale}};
}

ordered_json velocity_series(const std::vector<RunOutcome>& runs, const char* sweep,
                             const std::vector<VelocityPair>& pairs) {
  ordered_json out = ordered_json::array();
  for (VelocityPair v : pairs) {
    std::vector<double> reward, sat, cost;
    for (const RunOutcome& r : runs)
      if (r.spec.name == velocity_name(sweep, v, r.spec.seed)) {
        reward.push_back(r.summary.reward);
        sat.push_back(r.summary.satisfaction);
        cost.push_back(r.summary.total_cost);
      }
    if (reward.empty()) continue;
    out.push_back({{"v_low", v.low},
                   {"v_high", v.high},
                   {"reward", mean_of(reward)},
                   {"satisfaction", mean_of(sat)},
                   {"total_cost", mean_of(cost)}});
  }
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Maddpg: return "maddpg";
    case Algorithm::Greedy: return "greedy";
    case Algorithm::Madqn: return "madqn";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "maddpg") return Algorithm::Maddpg;
  if (name == "greedy") return Algorithm::Greedy;
  if (name == "madqn") return Algorithm::Madqn;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

const std::vector<VelocityPair>& equal_gap_velocities() {
  static const std::vector<VelocityPair> v{{10, 20}, {30, 40}, {50, 60}};
  return v;
}

const std::vector<VelocityPair>& fixed_low_velocities() {
  static const std::vector<VelocityPair> v{{20, 30}, {20, 40}, {20, 50}, {20, 60}};
  return v;
}

const std::vector<double>& preassess_scales() {
  static const std::vector<double> v{1.0, 2.0, 5.0};
  return v;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> v{"compare_algorithms", "pairing_ablation", "preassess_ablation",
                                          "velocity_sweep"};
  return v;
}

RunOutcome execute(const RunSpec& spec, const std::filesystem::path& checkpoint_dir) {
  const auto start = std::chrono::steady_clock::now();
  marl::SliceEnv env(spec.env, spec.seed);
  const std::uint64_t learner_seed = spec.seed ^ kLearnerStream;
  const marl::MaddpgDims dims{env.agent_count(), env.observation_dim(), env.action_dim()};
  marl::TrainingResult result;
  switch (spec.algorithm) {
    case Algorithm::Maddpg: {
      marl::Maddpg learner(dims, spec.learner, learner_seed);
      result = marl::train_maddpg(env, learner, spec.learner, learner_seed);
      if (!checkpoint_dir.empty()) learner.save(checkpoint_dir);
      break;
    }
    case Algorithm::Madqn: {
      marl::Madqn learner(dims, spec.learner, learner_seed);
      result = marl::train_madqn(env, learner, spec.learner, learner_seed);
      break;
    }
    case Algorithm::Greedy: {
      marl::GreedyTraversal policy(spec.learner.greedy_grid);
      result = marl::run_greedy(env, policy, spec.learner, learner_seed);
      break;
    }
  }
  RunOutcome out;
  out.spec = spec;
  out.episodes = std::move(result.episodes);
  out.summary = summarize(spec.name, std::string(to_string(spec.algorithm)), spec.seed, out.episodes);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<RunSpec> plan_suite(const ScenarioConfig& c, std::string_view suite) {
  std::vector<RunSpec> runs;
  if (suite == "compare_algorithms") {
    for (std::uint64_t seed : c.seeds)
      for (Algorithm a : {Algorithm::Maddpg, Algorithm::Greedy, Algorithm::Madqn})
        runs.push_back(base_spec(c, a, seed, compare_name(a, seed)));
  } else if (suite == "pairing_ablation") {
    for (std::uint64_t seed : c.seeds)
      for (bool priority : {true, false}) {
        RunSpec s = base_spec(c, Algorithm::Maddpg, seed, pairing_name(priority, seed));
        s.env.admission.pairing = priority ? marl::PairingMode::Priority : marl::PairingMode::Random;
        runs.push_back(std::move(s));
      }
  } else if (suite == "preassess_ablation") {
    for (std::uint64_t seed : c.seeds)
      for (double scale : preassess_scales())
        for (bool on : {true, false}) {
          RunSpec s = base_spec(c, Algorithm::Maddpg, seed, preassess_name(scale, on, seed));
          s.env.pool.scale = scale;
          s.env.admission.pre_assessment = on;
          runs.push_back(std::move(s));
        }
  } else if (suite == "velocity_sweep") {
    if (c.env.layers.size() != 2)
      throw ConfigError("velocity_sweep needs exactly two layers, config has " + std::to_string(c.env.layers.size()));
    for (std::uint64_t seed : c.seeds) {
      for (const auto& [sweep, pairs] : {std::pair{"gap", &equal_gap_velocities()},
                                         std::pair{"fixedlow", &fixed_low_velocities()}})
        for (VelocityPair v : *pairs) {
          RunSpec s = base_spec(c, Algorithm::Maddpg, seed, velocity_name(sweep, v, seed));
          s.env.layers[0].prescribed_speed = v.low;
          s.env.layers[1].prescribed_speed = v.high;
          runs.push_back(std::move(s));
        }
    }
  } else {
    throw ConfigError("unknown suite '" + std::string(suite) + "'");
  }
  return runs;
}

ordered_json summarize_suite(std::string_view suite, const std::vector<RunOutcome>& runs) {
  ordered_json j;
  j["suite"] = suite;
  ordered_json list = ordered_json::array();
  for (const RunOutcome& r : runs) list.push_back(to_json(r.summary));
  j["runs"] = list;
  if (suite == "compare_algorithms") j["comparison"] = compare_digest(runs);
  else if (suite == "pairing_ablation") j["comparison"] = pairing_digest(runs);
  else if (suite == "preassess_ablation") j["comparison"] = preassess_digest(runs);
  else if (suite == "velocity_sweep")
    j["comparison"] = {{"equal_gap", velocity_series(runs, "gap", equal_gap_velocities())},
                       {"fixed_low", velocity_series(runs, "fixedlow", fixed_low_velocities())}};
  return j;
}

SuiteResult run_suite(const ScenarioConfig& config, std::string_view suite, const std::filesystem::path& out,
                      const ProgressFn& progress) {
  SuiteResult result;
  result.suite = std::string(suite);
  ordered_json timing = ordered_json::object();
  for (const RunSpec& spec : plan_suite(config, suite)) {
    RunOutcome run = execute(spec);
    if (!out.empty()) write_run(out, spec.name, run.episodes);
    timing[spec.name] = run.wall_seconds;
    if (progress) progress(run);
    result.runs.push_back(std::move(run));
  }
  result.summary = summarize_suite(suite, result.runs);
  if (!out.empty()) {
    write_text(out / "summary.json", result.summary.dump(2) + "\n");
    write_text(out / "timing.json", timing.dump(2) + "\n");
  }
  return result;
}

}  // namespace skyslice::harness
