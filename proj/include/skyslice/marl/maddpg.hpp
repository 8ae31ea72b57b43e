#pragma once

#include "skyslice/marl/env.hpp"
#include "skyslice/marl/learner_config.hpp"
#include "skyslice/neuro/adam.hpp"
#include "skyslice/neuro/mlp.hpp"
#include "skyslice/neuro/replay.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace skyslice::marl {

using Net = neuro::Mlp<double>;
using NetGradients = neuro::MlpGradients<double>;
using Transition = neuro::Transition<double>;

/// Online and target actor/critic of one agent with their optimizers. The
/// actor sees the agent's own observation; the critic sees the global state
/// and the joint action.
struct AgentNets {
  Net actor, target_actor, critic, target_critic;
  neuro::Adam<double> actor_opt, critic_opt;
};

/// Column-stacked minibatch.
struct Batch {
  Eigen::MatrixXd state;       // state_dim x K
  Eigen::MatrixXd action;      // joint_action_dim x K
  Eigen::MatrixXd rewards;     // agents x K
  Eigen::MatrixXd next_state;  // state_dim x K

  Eigen::Index size() const { return state.cols(); }
};

Batch make_batch(std::span<const Transition* const> transitions);

struct UpdateStats {
  Eigen::VectorXd critic_loss;
  long skipped = 0;
};

struct MaddpgDims {
  int agents = 0;
  int obs_dim = 0;
  int action_dim = 0;
  int state_dim() const { return agents * obs_dim; }
  int joint_action_dim() const { return agents * action_dim; }
};

class Maddpg {
 public:
  Maddpg(MaddpgDims dims, const LearnerConfig& config, std::uint64_t seed);
  /// Wraps pre-built networks (used by tests and checkpoint loading).
  Maddpg(MaddpgDims dims, const LearnerConfig& config, std::vector<AgentNets> agents);

  const MaddpgDims& dims() const { return dims_; }
  std::vector<AgentNets>& agents() { return agents_; }
  const std::vector<AgentNets>& agents() const { return agents_; }

  /// Deterministic joint action mu(o) for a global state.
  Eigen::VectorXd act(const Eigen::VectorXd& state) const;

  /// Joint action with additive Gaussian noise, clipped to [-1, 1].
  Eigen::VectorXd explore(const Eigen::VectorXd& state, double sigma, std::mt19937_64& rng) const;

  /// y = r_m + gamma * Q'_m(s', mu'(s')) for every sample.
  Eigen::RowVectorXd td_targets(const Batch& batch, int agent) const;

  /// Mean squared TD error of agent m's online critic against `targets`.
  double critic_loss(const Batch& batch, int agent, const Eigen::RowVectorXd& targets) const;

  /// Gradient of the critic loss with respect to the critic parameters.
  NetGradients critic_gradient(const Batch& batch, int agent, const Eigen::RowVectorXd& targets,
                               double* loss = nullptr) const;

  /// Gradient of -mean_k Q_m(s_k, a_k with a_m = mu_m(o_m)) with respect to
  /// the actor parameters; descending it ascends the deterministic policy
  /// gradient.
  NetGradients actor_gradient(const Batch& batch, int agent) const;

  /// One full learning step for every agent, then soft target updates.
  UpdateStats update(const Batch& batch);

  void save(const std::filesystem::path& dir) const;
  static Maddpg load(const std::filesystem::path& dir, const LearnerConfig& config);

 private:
  Eigen::MatrixXd observation_rows(const Eigen::MatrixXd& states, int agent) const;

  MaddpgDims dims_;
  LearnerConfig config_;
  std::vector<AgentNets> agents_;
};

/// Called after every finished episode.
using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

struct TrainingResult {
  std::vector<EpisodeRecord> episodes;
  long updates = 0;
  long skipped_updates = 0;
};

/// Episode loop: act with decaying exploration noise, store transitions,
/// learn once the buffer is warm.
TrainingResult train_maddpg(MultiAgentEnv& env, Maddpg& learner, const LearnerConfig& config,
                            std::uint64_t seed, const EpisodeCallback& on_episode = {});

/// Runs `episodes` noise-free episodes with the current actors.
std::vector<EpisodeRecord> evaluate_policy(MultiAgentEnv& env, const Maddpg& learner, int episodes,
                                           int steps);

}  // namespace skyslice::marl
