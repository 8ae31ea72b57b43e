#pragma once

#include "skyslice/marl/env.hpp"
#include "skyslice/marl/learner_config.hpp"
#include "skyslice/marl/maddpg.hpp"
#include "skyslice/marl/slice_env.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace skyslice::marl {

/// One-step traversal baseline. Each agent scores every point of the grid
/// cube by stepping a copy of the environment, holding the other agents at
/// zero action, and keeps its best point. Ties go to the first point in
/// lexicographic grid order.
class GreedyTraversal {
 public:
  explicit GreedyTraversal(std::vector<double> grid);

  std::size_t candidate_count() const;
  Eigen::VectorXd candidate(std::size_t index) const;

  Eigen::VectorXd act(const SliceEnv& env);

  /// With probability epsilon an agent takes a uniformly drawn grid point
  /// instead of its traversal choice.
  Eigen::VectorXd explore(const SliceEnv& env, double epsilon, std::mt19937_64& rng);

  long evaluations() const { return evaluations_; }

 private:
  std::vector<double> grid_;
  long evaluations_ = 0;
};

TrainingResult run_greedy(SliceEnv& env, GreedyTraversal& policy, const LearnerConfig& config,
                          std::uint64_t seed, const EpisodeCallback& on_episode = {});

}  // namespace skyslice::marl
