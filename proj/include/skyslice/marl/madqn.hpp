#pragma once

#include "skyslice/marl/env.hpp"
#include "skyslice/marl/learner_config.hpp"
#include "skyslice/marl/maddpg.hpp"
#include "skyslice/neuro/adam.hpp"
#include "skyslice/neuro/mlp.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace skyslice::marl {

/// Independent deep Q-learners over a discretized action grid: every action
/// component takes one of `levels`, so an agent chooses among
/// levels^action_dim joint settings.
struct DiscreteTransition {
  Eigen::VectorXd state;
  std::vector<int> actions;  // one grid index per agent
  Eigen::VectorXd rewards;
  Eigen::VectorXd next_state;
};

class Madqn {
 public:
  Madqn(MaddpgDims dims, const LearnerConfig& config, std::uint64_t seed);

  int action_count() const { return action_count_; }

  /// Grid index to continuous action block.
  Eigen::VectorXd decode(int index) const;
  Eigen::VectorXd joint_action(const std::vector<int>& indices) const;

  std::vector<int> greedy(const Eigen::VectorXd& state) const;
  std::vector<int> explore(const Eigen::VectorXd& state, double epsilon, std::mt19937_64& rng) const;

  /// One TD step per agent on the given transitions, then soft target
  /// updates. Returns the number of skipped agent updates.
  long update(const std::vector<const DiscreteTransition*>& batch);

  const Net& q_net(int agent) const { return q_[static_cast<std::size_t>(agent)]; }

 private:
  MaddpgDims dims_;
  LearnerConfig config_;
  int action_count_ = 0;
  std::vector<Net> q_, target_;
  std::vector<neuro::Adam<double>> opt_;
};

TrainingResult train_madqn(MultiAgentEnv& env, Madqn& learner, const LearnerConfig& config,
                           std::uint64_t seed, const EpisodeCallback& on_episode = {});

}  // namespace skyslice::marl
