#pragma once

#include <Eigen/Core>

#include <vector>

namespace skyslice::marl {

/// Per-step quantities reported by an environment, one entry per agent.
struct StepMetrics {
  Eigen::VectorXd reward;
  Eigen::VectorXd sat_sum;
  Eigen::VectorXd sat_mean;
  Eigen::VectorXd op_cost;
  Eigen::VectorXd vio_cost;
  Eigen::Matrix3Xd fractions;
  int unpaired = 0;
  double unpaired_cost = 0.0;
  double consumption = 0.0;  // reserved pool relative to the base pool
  int level = 0;
  double objective = 0.0;

  static StepMetrics zeros(int agents);
};

struct StepResult {
  Eigen::VectorXd state;  // concatenated observations
  Eigen::VectorXd rewards;
  StepMetrics metrics;
};

/// Cooperative-competitive environment with one continuous action block per
/// agent. The global state is the concatenation of agent observations.
class MultiAgentEnv {
 public:
  virtual ~MultiAgentEnv() = default;

  virtual int agent_count() const = 0;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  int state_dim() const { return agent_count() * observation_dim(); }
  int joint_action_dim() const { return agent_count() * action_dim(); }

  /// Starts a new episode and returns the initial global state.
  virtual Eigen::VectorXd reset() = 0;
  virtual StepResult step(const Eigen::VectorXd& joint_action) = 0;
};

/// Episode totals per agent, averaged where a per-step mean is meaningful.
struct EpisodeRecord {
  int episode = 0;
  Eigen::VectorXd reward;    // sum over steps
  Eigen::VectorXd sat_sum;   // mean over steps
  Eigen::VectorXd sat_mean;  // mean over steps
  Eigen::VectorXd op_cost;   // sum over steps
  Eigen::VectorXd vio_cost;  // sum over steps
  Eigen::Matrix3Xd fractions;  // mean over steps
  int unpaired = 0;            // sum over steps
  double unpaired_cost = 0.0;  // sum over steps
  double consumption = 0.0;    // mean over steps
  double level = 0.0;          // mean over steps
  double objective = 0.0;      // sum over steps
  double mean_abs_action = 0.0;
  int steps = 0;

  double total_reward() const { return reward.sum(); }
  double total_op_cost() const { return op_cost.sum(); }
  double total_vio_cost() const { return vio_cost.sum() + unpaired_cost; }
  double mean_satisfaction() const { return sat_mean.mean(); }
};

class EpisodeAccumulator {
 public:
  EpisodeAccumulator(int episode, int agents);
  void add(const StepMetrics& m, const Eigen::VectorXd& joint_action);
  EpisodeRecord finish() const;

 private:
  EpisodeRecord rec_;
  double abs_action_sum_ = 0.0;
  long action_count_ = 0;
};

}  // namespace skyslice::marl
