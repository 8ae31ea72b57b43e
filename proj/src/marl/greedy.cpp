#include "skyslice/marl/greedy.hpp"

#include "skyslice/errors.hpp"

#include <limits>

namespace skyslice::marl {

GreedyTraversal::GreedyTraversal(std::vector<double> grid) : grid_(std::move(grid)) {
  if (grid_.empty()) throw ConfigError("greedy_grid must not be empty");
}

std::size_t GreedyTraversal::candidate_count() const { return grid_.size() * grid_.size() * grid_.size(); }

Eigen::VectorXd GreedyTraversal::candidate(std::size_t index) const {
  const std::size_t n = grid_.size();
  Eigen::VectorXd a(3);
  for (int k = 2; k >= 0; --k) {
    a[k] = grid_[index % n];
    index /= n;
  }
  return a;
}

Eigen::VectorXd GreedyTraversal::act(const SliceEnv& env) {
  const int agents = env.agent_count();
  Eigen::VectorXd joint = Eigen::VectorXd::Zero(env.joint_action_dim());
  for (int m = 0; m < agents; ++m) {
    if (!env.world().slices[static_cast<std::size_t>(m)].active()) continue;
    Eigen::VectorXd probe = Eigen::VectorXd::Zero(env.joint_action_dim());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidate_count(); ++c) {
      const Eigen::VectorXd a = candidate(c);
      probe.segment<3>(3 * m) = a;
      const double r = env.lookahead_reward(probe, m);
      ++evaluations_;
      if (r > best) {
        best = r;
        joint.segment<3>(3 * m) = a;
      }
    }
  }
  return joint;
}

Eigen::VectorXd GreedyTraversal::explore(const SliceEnv& env, double epsilon, std::mt19937_64& rng) {
  Eigen::VectorXd joint = act(env);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, candidate_count() - 1);
  for (int m = 0; m < env.agent_count(); ++m)
    if (coin(rng) < epsilon) joint.segment<3>(3 * m) = candidate(pick(rng));
  return joint;
}

TrainingResult run_greedy(SliceEnv& env, GreedyTraversal& policy, const LearnerConfig& config,
                          std::uint64_t seed, const EpisodeCallback& on_episode) {
  std::mt19937_64 rng(seed);
  TrainingResult result;
  for (int ep = 0; ep < config.episodes; ++ep) {
    EpisodeAccumulator acc(ep, env.agent_count());
    env.reset();
    for (int t = 0; t < config.steps; ++t) {
      const Eigen::VectorXd action = policy.explore(env, config.greedy_epsilon, rng);
      const StepResult r = env.step(action);
      acc.add(r.metrics, action);
    }
    result.episodes.push_back(acc.finish());
    if (on_episode) on_episode(result.episodes.back());
  }
  return result;
}

}  // namespace skyslice::marl
