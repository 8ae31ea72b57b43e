#include "skyslice/marl/maddpg.hpp"

#include "skyslice/errors.hpp"
#include "skyslice/neuro/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace skyslice::marl {

namespace {

Eigen::MatrixXd stack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

std::vector<int> layout(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> widths{in};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  return widths;
}

}  // namespace

Batch make_batch(std::span<const Transition* const> transitions) {
  if (transitions.empty()) throw ContractViolation("make_batch: empty batch");
  const auto k = static_cast<Eigen::Index>(transitions.size());
  const Transition& first = *transitions.front();
  Batch b;
  b.state.resize(first.state.size(), k);
  b.action.resize(first.action.size(), k);
  b.rewards.resize(first.rewards.size(), k);
  b.next_state.resize(first.next_state.size(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Transition& t = *transitions[static_cast<std::size_t>(c)];
    b.state.col(c) = t.state;
    b.action.col(c) = t.action;
    b.rewards.col(c) = t.rewards;
    b.next_state.col(c) = t.next_state;
  }
  return b;
}

Maddpg::Maddpg(MaddpgDims dims, const LearnerConfig& config, std::uint64_t seed)
    : dims_(dims), config_(config) {
  std::mt19937_64 rng(seed);
  for (int m = 0; m < dims_.agents; ++m) {
    AgentNets a;
    a.actor = Net(layout(dims_.obs_dim, config_.hidden, dims_.action_dim),
                  neuro::OutputActivation::Tanh, rng);
    a.critic = Net(layout(dims_.state_dim() + dims_.joint_action_dim(), config_.hidden, 1),
                   neuro::OutputActivation::Identity, rng);
    a.target_actor = a.actor;
    a.target_critic = a.critic;
    a.actor_opt = neuro::Adam<double>(a.actor);
    a.critic_opt = neuro::Adam<double>(a.critic);
    agents_.push_back(std::move(a));
  }
}

Maddpg::Maddpg(MaddpgDims dims, const LearnerConfig& config, std::vector<AgentNets> agents)
    : dims_(dims), config_(config), agents_(std::move(agents)) {
  if (static_cast<int>(agents_.size()) != dims_.agents)
    throw ContractViolation("Maddpg: agent count does not match dimensions");
}

Eigen::MatrixXd Maddpg::observation_rows(const Eigen::MatrixXd& states, int agent) const {
  return states.middleRows(static_cast<Eigen::Index>(agent) * dims_.obs_dim, dims_.obs_dim);
}

Eigen::VectorXd Maddpg::act(const Eigen::VectorXd& state) const {
  Eigen::VectorXd joint(dims_.joint_action_dim());
  for (int m = 0; m < dims_.agents; ++m) {
    const Eigen::VectorXd o = state.segment(static_cast<Eigen::Index>(m) * dims_.obs_dim, dims_.obs_dim);
    joint.segment(static_cast<Eigen::Index>(m) * dims_.action_dim, dims_.action_dim) =
        agents_[static_cast<std::size_t>(m)].actor.forward(o);
  }
  return joint;
}

Eigen::VectorXd Maddpg::explore(const Eigen::VectorXd& state, double sigma,
                                std::mt19937_64& rng) const {
  Eigen::VectorXd a = act(state);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = std::clamp(a[k] + sigma * noise(rng), -1.0, 1.0);
  return a;
}

Eigen::RowVectorXd Maddpg::td_targets(const Batch& batch, int agent) const {
  Eigen::MatrixXd next_action(dims_.joint_action_dim(), batch.size());
  for (int k = 0; k < dims_.agents; ++k)
    next_action.middleRows(static_cast<Eigen::Index>(k) * dims_.action_dim, dims_.action_dim) =
        agents_[static_cast<std::size_t>(k)].target_actor.forward(observation_rows(batch.next_state, k));
  const Eigen::MatrixXd q_next =
      agents_[static_cast<std::size_t>(agent)].target_critic.forward(stack(batch.next_state, next_action));
  return batch.rewards.row(agent) + config_.gamma * q_next.row(0);
}

double Maddpg::critic_loss(const Batch& batch, int agent, const Eigen::RowVectorXd& targets) const {
  const Eigen::MatrixXd q =
      agents_[static_cast<std::size_t>(agent)].critic.forward(stack(batch.state, batch.action));
  return (q.row(0) - targets).squaredNorm() / static_cast<double>(batch.size());
}

NetGradients Maddpg::critic_gradient(const Batch& batch, int agent, const Eigen::RowVectorXd& targets,
                                     double* loss) const {
  const Net& critic = agents_[static_cast<std::size_t>(agent)].critic;
  Net::Cache cache;
  const Eigen::MatrixXd q = critic.forward(stack(batch.state, batch.action), cache);
  const Eigen::RowVectorXd diff = q.row(0) - targets;
  const double k = static_cast<double>(batch.size());
  if (loss) *loss = diff.squaredNorm() / k;
  return critic.backward(cache, (2.0 / k) * diff);
}

NetGradients Maddpg::actor_gradient(const Batch& batch, int agent) const {
  const AgentNets& a = agents_[static_cast<std::size_t>(agent)];
  Net::Cache actor_cache;
  const Eigen::MatrixXd own = a.actor.forward(observation_rows(batch.state, agent), actor_cache);
  Eigen::MatrixXd joint = batch.action;
  const Eigen::Index offset = static_cast<Eigen::Index>(agent) * dims_.action_dim;
  joint.middleRows(offset, dims_.action_dim) = own;

  Net::Cache critic_cache;
  a.critic.forward(stack(batch.state, joint), critic_cache);
  const double k = static_cast<double>(batch.size());
  const NetGradients through_critic =
      a.critic.backward(critic_cache, Eigen::RowVectorXd::Constant(batch.size(), -1.0 / k));
  const Eigen::MatrixXd d_action =
      through_critic.input.middleRows(dims_.state_dim() + offset, dims_.action_dim);
  return a.actor.backward(actor_cache, d_action);
}

UpdateStats Maddpg::update(const Batch& batch) {
  UpdateStats stats;
  stats.critic_loss = Eigen::VectorXd::Zero(dims_.agents);
  for (int m = 0; m < dims_.agents; ++m) {
    AgentNets& a = agents_[static_cast<std::size_t>(m)];
    const Eigen::RowVectorXd y = td_targets(batch, m);
    double loss = 0.0;
    const NetGradients gc = critic_gradient(batch, m, y, &loss);
    stats.critic_loss[m] = loss;
    if (!std::isfinite(loss) || !a.critic_opt.step(a.critic, gc, config_.critic_lr)) {
      ++stats.skipped;
      continue;
    }
    const NetGradients ga = actor_gradient(batch, m);
    if (!a.actor_opt.step(a.actor, ga, config_.actor_lr)) ++stats.skipped;
  }
  for (AgentNets& a : agents_) {
    neuro::soft_update(a.target_critic, a.critic, config_.tau);
    neuro::soft_update(a.target_actor, a.actor, config_.tau);
  }
  return stats;
}

void Maddpg::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "maddpg.meta");
    if (!meta) throw std::runtime_error("cannot write " + (dir / "maddpg.meta").string());
    meta << "agents " << dims_.agents << "\nobs_dim " << dims_.obs_dim << "\naction_dim "
         << dims_.action_dim << '\n';
  }
  for (int m = 0; m < dims_.agents; ++m) {
    const AgentNets& a = agents_[static_cast<std::size_t>(m)];
    const std::string p = "agent" + std::to_string(m) + "_";
    neuro::save_file(dir / (p + "actor.txt"), a.actor);
    neuro::save_file(dir / (p + "target_actor.txt"), a.target_actor);
    neuro::save_file(dir / (p + "critic.txt"), a.critic);
    neuro::save_file(dir / (p + "target_critic.txt"), a.target_critic);
  }
}

Maddpg Maddpg::load(const std::filesystem::path& dir, const LearnerConfig& config) {
  std::ifstream meta(dir / "maddpg.meta");
  if (!meta) throw ConfigError("checkpoint directory " + dir.string() + " has no maddpg.meta");
  MaddpgDims dims;
  std::string key;
  meta >> key >> dims.agents >> key >> dims.obs_dim >> key >> dims.action_dim;
  if (!meta || dims.agents < 1) throw ConfigError("malformed maddpg.meta in " + dir.string());
  std::vector<AgentNets> agents;
  for (int m = 0; m < dims.agents; ++m) {
    const std::string p = "agent" + std::to_string(m) + "_";
    AgentNets a;
    a.actor = neuro::load_file<double>(dir / (p + "actor.txt"));
    a.target_actor = neuro::load_file<double>(dir / (p + "target_actor.txt"));
    a.critic = neuro::load_file<double>(dir / (p + "critic.txt"));
    a.target_critic = neuro::load_file<double>(dir / (p + "target_critic.txt"));
    if (a.actor.input_dim() != dims.obs_dim || a.actor.output_dim() != dims.action_dim ||
        a.critic.input_dim() != dims.state_dim() + dims.joint_action_dim())
      throw ConfigError("checkpoint networks do not match maddpg.meta dimensions");
    a.actor_opt = neuro::Adam<double>(a.actor);
    a.critic_opt = neuro::Adam<double>(a.critic);
    agents.push_back(std::move(a));
  }
  return Maddpg(dims, config, std::move(agents));
}

TrainingResult train_maddpg(MultiAgentEnv& env, Maddpg& learner, const LearnerConfig& config,
                            std::uint64_t seed, const EpisodeCallback& on_episode) {
  std::mt19937_64 rng(seed);
  neuro::ReplayBuffer<Transition> buffer(static_cast<std::size_t>(config.buffer_capacity));
  const auto batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t warmup = batch * static_cast<std::size_t>(std::max(config.warmup_batches, 1));
  const double total_steps = static_cast<double>(config.episodes) * config.steps;

  TrainingResult result;
  long step_counter = 0;
  for (int ep = 0; ep < config.episodes; ++ep) {
    EpisodeAccumulator acc(ep, env.agent_count());
    Eigen::VectorXd state = env.reset();
    for (int t = 0; t < config.steps; ++t) {
      const double sigma =
          linear_schedule(config.noise_start, config.noise_end, static_cast<double>(step_counter) / total_steps);
      const Eigen::VectorXd action = learner.explore(state, sigma, rng);
      StepResult r = env.step(action);
      acc.add(r.metrics, action);
      buffer.push({state, action, r.rewards, r.state});
      state = std::move(r.state);
      ++step_counter;
      if (buffer.ready(std::max(warmup, batch)) && step_counter % std::max(config.update_every, 1) == 0) {
        const auto sample = buffer.sample(rng, batch);
        const UpdateStats stats = learner.update(make_batch(*sample));
        ++result.updates;
        result.skipped_updates += stats.skipped;
      }
    }
    result.episodes.push_back(acc.finish());
    if (on_episode) on_episode(result.episodes.back());
  }
  return result;
}

std::vector<EpisodeRecord> evaluate_policy(MultiAgentEnv& env, const Maddpg& learner, int episodes,
                                           int steps) {
  std::vector<EpisodeRecord> out;
  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeAccumulator acc(ep, env.agent_count());
    Eigen::VectorXd state = env.reset();
    for (int t = 0; t < steps; ++t) {
      const Eigen::VectorXd action = learner.act(state);
      StepResult r = env.step(action);
      acc.add(r.metrics, action);
      state = std::move(r.state);
    }
    out.push_back(acc.finish());
  }
  return out;
}

}  // namespace skyslice::marl
