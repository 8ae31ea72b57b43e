#include "skyslice/marl/madqn.hpp"

#include "skyslice/errors.hpp"
#include "skyslice/neuro/replay.hpp"

#include <algorithm>
#include <cmath>

namespace skyslice::marl {

Madqn::Madqn(MaddpgDims dims, const LearnerConfig& config, std::uint64_t seed)
    : dims_(dims), config_(config) {
  if (config_.dqn_levels.empty()) throw ConfigError("dqn_levels must not be empty");
  action_count_ = 1;
  for (int k = 0; k < dims_.action_dim; ++k) action_count_ *= static_cast<int>(config_.dqn_levels.size());
  std::mt19937_64 rng(seed);
  std::vector<int> widths{dims_.obs_dim};
  widths.insert(widths.end(), config_.hidden.begin(), config_.hidden.end());
  widths.push_back(action_count_);
  for (int m = 0; m < dims_.agents; ++m) {
    q_.emplace_back(widths, neuro::OutputActivation::Identity, rng);
    target_.push_back(q_.back());
    opt_.emplace_back(q_.back());
  }
}

Eigen::VectorXd Madqn::decode(int index) const {
  const int n = static_cast<int>(config_.dqn_levels.size());
  Eigen::VectorXd a(dims_.action_dim);
  for (int k = 0; k < dims_.action_dim; ++k) {
    a[k] = config_.dqn_levels[static_cast<std::size_t>(index % n)];
    index /= n;
  }
  return a;
}

Eigen::VectorXd Madqn::joint_action(const std::vector<int>& indices) const {
  Eigen::VectorXd joint(dims_.joint_action_dim());
  for (int m = 0; m < dims_.agents; ++m)
    joint.segment(static_cast<Eigen::Index>(m) * dims_.action_dim, dims_.action_dim) =
        decode(indices[static_cast<std::size_t>(m)]);
  return joint;
}

std::vector<int> Madqn::greedy(const Eigen::VectorXd& state) const {
  std::vector<int> out;
  for (int m = 0; m < dims_.agents; ++m) {
    const Eigen::VectorXd o = state.segment(static_cast<Eigen::Index>(m) * dims_.obs_dim, dims_.obs_dim);
    Eigen::Index best = 0;
    q_[static_cast<std::size_t>(m)].forward(o).col(0).maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

std::vector<int> Madqn::explore(const Eigen::VectorXd& state, double epsilon, std::mt19937_64& rng) const {
  std::vector<int> out = greedy(state);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, action_count_ - 1);
  for (int& a : out)
    if (coin(rng) < epsilon) a = pick(rng);
  return out;
}

long Madqn::update(const std::vector<const DiscreteTransition*>& batch) {
  const auto k = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd s(dims_.state_dim(), k), s2(dims_.state_dim(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    s.col(c) = batch[static_cast<std::size_t>(c)]->state;
    s2.col(c) = batch[static_cast<std::size_t>(c)]->next_state;
  }
  long skipped = 0;
  for (int m = 0; m < dims_.agents; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    const Eigen::Index row = static_cast<Eigen::Index>(m) * dims_.obs_dim;
    const Eigen::MatrixXd q_next = target_[idx].forward(Eigen::MatrixXd(s2.middleRows(row, dims_.obs_dim)));
    Net::Cache cache;
    const Eigen::MatrixXd q = q_[idx].forward(Eigen::MatrixXd(s.middleRows(row, dims_.obs_dim)), cache);
    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
      const DiscreteTransition& t = *batch[static_cast<std::size_t>(c)];
      const double y = t.rewards[m] + config_.gamma * q_next.col(c).maxCoeff();
      const int a = t.actions[idx];
      upstream(a, c) = 2.0 * (q(a, c) - y) / static_cast<double>(k);
    }
    if (!upstream.allFinite() || !opt_[idx].step(q_[idx], q_[idx].backward(cache, upstream), config_.dqn_lr))
      ++skipped;
  }
  for (std::size_t m = 0; m < q_.size(); ++m) neuro::soft_update(target_[m], q_[m], config_.tau);
  return skipped;
}

TrainingResult train_madqn(MultiAgentEnv& env, Madqn& learner, const LearnerConfig& config,
                           std::uint64_t seed, const EpisodeCallback& on_episode) {
  std::mt19937_64 rng(seed);
  neuro::ReplayBuffer<DiscreteTransition> buffer(static_cast<std::size_t>(config.buffer_capacity));
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t warmup = batch * static_cast<std::size_t>(std::max(config.warmup_batches, 1));
  const double total_steps = static_cast<double>(config.episodes) * config.steps;

  TrainingResult result;
  long step_counter = 0;
  for (int ep = 0; ep < config.episodes; ++ep) {
    EpisodeAccumulator acc(ep, env.agent_count());
    Eigen::VectorXd state = env.reset();
    for (int t = 0; t < config.steps; ++t) {
      const double eps = linear_schedule(config.epsilon_start, config.epsilon_end,
                                         static_cast<double>(step_counter) / total_steps,
                                         config.epsilon_decay_fraction);
      const std::vector<int> indices = learner.explore(state, eps, rng);
      const Eigen::VectorXd action = learner.joint_action(indices);
      StepResult r = env.step(action);
      acc.add(r.metrics, action);
      buffer.push({state, indices, r.rewards, r.state});
      state = std::move(r.state);
      ++step_counter;
      if (buffer.ready(std::max(warmup, batch)) && step_counter % std::max(config.update_every, 1) == 0) {
        const auto sample = buffer.sample(rng, batch);
        result.skipped_updates += learner.update(*sample);
        ++result.updates;
      }
    }
    result.episodes.push_back(acc.finish());
    if (on_episode) on_episode(result.episodes.back());
  }
  return result;
}

}  // namespace skyslice::marl
