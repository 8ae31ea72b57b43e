#include "skyslice/marl/slice_env.hpp"

#include "skyslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skyslice::marl {

StepMetrics StepMetrics::zeros(int agents) {
  StepMetrics m;
  m.reward = Eigen::VectorXd::Zero(agents);
  m.sat_sum = Eigen::VectorXd::Zero(agents);
  m.sat_mean = Eigen::VectorXd::Zero(agents);
  m.op_cost = Eigen::VectorXd::Zero(agents);
  m.vio_cost = Eigen::VectorXd::Zero(agents);
  m.fractions = Eigen::Matrix3Xd::Zero(3, agents);
  return m;
}

EpisodeAccumulator::EpisodeAccumulator(int episode, int agents) {
  const StepMetrics z = StepMetrics::zeros(agents);
  rec_.episode = episode;
  rec_.reward = z.reward;
  rec_.sat_sum = z.sat_sum;
  rec_.sat_mean = z.sat_mean;
  rec_.op_cost = z.op_cost;
  rec_.vio_cost = z.vio_cost;
  rec_.fractions = z.fractions;
}

void EpisodeAccumulator::add(const StepMetrics& m, const Eigen::VectorXd& joint_action) {
  rec_.reward += m.reward;
  rec_.sat_sum += m.sat_sum;
  rec_.sat_mean += m.sat_mean;
  rec_.op_cost += m.op_cost;
  rec_.vio_cost += m.vio_cost;
  rec_.fractions += m.fractions;
  rec_.unpaired += m.unpaired;
  rec_.unpaired_cost += m.unpaired_cost;
  rec_.consumption += m.consumption;
  rec_.level += m.level;
  rec_.objective += m.objective;
  ++rec_.steps;
  abs_action_sum_ += joint_action.cwiseAbs().sum();
  action_count_ += joint_action.size();
}

EpisodeRecord EpisodeAccumulator::finish() const {
  EpisodeRecord r = rec_;
  if (r.steps > 0) {
    const double n = r.steps;
    r.sat_sum /= n;
    r.sat_mean /= n;
    r.fractions /= n;
    r.consumption /= n;
    r.level /= n;
  }
  if (action_count_ > 0) r.mean_abs_action = abs_action_sum_ / static_cast<double>(action_count_);
  return r;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("scenario.dt must be positive");
  if (!(climb_rate > 0.0)) throw ConfigError("scenario.climb_rate must be positive");
  validate_layers(layers, layer_separation);
  if (base_stations.empty()) throw ConfigError("at least one base station is required");
  for (std::size_t j = 0; j < base_stations.size(); ++j) {
    if (base_stations[j].position.z() != 0.0)
      throw ConfigError("base station " + std::to_string(j) + " must sit on z = 0");
    if (base_stations[j].max_attachments < 1)
      throw ConfigError("base station " + std::to_string(j) + ": max_attachments must be >= 1");
  }
  if (evtols.empty()) throw ConfigError("at least one eVTOL is required");
  for (std::size_t i = 0; i < evtols.size(); ++i) {
    if (evtols[i].layer < 0 || static_cast<std::size_t>(evtols[i].layer) >= layers.size())
      throw ConfigError("eVTOL " + std::to_string(i) + ": unknown layer " +
                        std::to_string(evtols[i].layer));
    if (!evtols[i].start.allFinite())
      throw ConfigError("eVTOL " + std::to_string(i) + ": start position must be finite");
  }
  if (!(radio.tx_power > 0.0 && radio.noise_power > 0.0 && radio.beamwidth_3db > 0.0 &&
        radio.reference_distance > 0.0))
    throw ConfigError("radio powers, beamwidth and reference distance must be positive");
  skyslice::validate(pool);
  if (!(step_scale > 0.0)) throw ConfigError("slices.step_scale must be positive");
  if (slice_count < 1) throw ConfigError("slices.count must be >= 1");
  if (slice_capacity < 1) throw ConfigError("slices.max_attachments must be >= 1");
  if (preset && ((*preset < 0.0).any() || (*preset > 1.0).any()))
    throw ConfigError("slices.preset fractions must lie in [0, 1]");
  skyslice::validate(tasks);
  const CostWeights& c = costs;
  if (c.omega_v < 0 || c.omega_band < 0 || c.omega_beam < 0 || c.omega_comp < 0 || c.alpha < 0 ||
      c.beta < 0 || c.omega_1 < 0 || c.omega_2 < 0)
    throw ConfigError("cost weights must be non-negative");
  if (!(c.eta > 0.0)) throw ConfigError("costs.eta must be positive");
  if (c.gamma_match < 0.0 || c.gamma_match > 1.0)
    throw ConfigError("costs.gamma_match must lie in [0, 1]");
  if (admission.l_max < 1) throw ConfigError("admission.l_max must be >= 1");
  if (admission.period < 1) throw ConfigError("admission.period must be >= 1");
}

Eigen::Matrix<double, Observation::kDim, 1> Observation::vector() const {
  Eigen::Matrix<double, kDim, 1> v;
  v << fractions[kBand], fractions[kBeam], fractions[kComp], cost, satisfaction;
  return v;
}

double reward(double sat_mean, double total_cost, double omega_1, double omega_2) {
  return omega_1 * (sat_mean - 0.5) - omega_2 * total_cost;
}

std::vector<Observation> build_observations(const std::vector<SliceState>& slices,
                                            const StepMetrics& metrics) {
  std::vector<Observation> obs(slices.size());
  for (std::size_t q = 0; q < slices.size(); ++q) {
    if (!slices[q].active()) continue;
    const auto k = static_cast<Eigen::Index>(q);
    obs[q].fractions = slices[q].fractions;
    obs[q].cost = metrics.op_cost[k] + metrics.vio_cost[k];
    obs[q].satisfaction = metrics.sat_mean[k];
  }
  return obs;
}

Eigen::VectorXd concatenate(const std::vector<Observation>& observations) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(observations.size()) * Observation::kDim);
  for (std::size_t q = 0; q < observations.size(); ++q)
    s.segment<Observation::kDim>(static_cast<Eigen::Index>(q) * Observation::kDim) =
        observations[q].vector();
  return s;
}

SliceEnv::SliceEnv(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)), generator_(config_.tasks) {
  config_.validate();
  world_.rng.seed(seed);
  metrics_ = StepMetrics::zeros(config_.slice_count);
}

Resources SliceEnv::available_pool() const {
  return config_.pool.totals() * world_.level_fraction;
}

Eigen::VectorXd SliceEnv::reset() {
  world_.step = 0;
  world_.diagnostics = {};
  world_.evtols.clear();
  for (std::size_t i = 0; i < config_.evtols.size(); ++i) {
    const EvtolSpec& spec = config_.evtols[i];
    const LayerConfig& layer = config_.layers[static_cast<std::size_t>(spec.layer)];
    EvtolState e;
    e.id = static_cast<int>(i);
    e.position = spec.start;
    e.phase = spec.phase;
    e.target_layer = spec.layer;
    if (spec.phase == FlightPhase::Cruise) {
      e.position.z() = layer.altitude;
      e.v_y = layer.prescribed_speed;
    } else if (spec.phase == FlightPhase::Grounded) {
      e.position.z() = 0.0;
    }
    world_.evtols.push_back(phase_controller(e, config_.layers, config_.climb_rate));
  }

  const Resources preset = config_.preset.value_or(equal_split(config_.slice_count));
  world_.slices.assign(static_cast<std::size_t>(config_.slice_count), SliceState{});
  for (int q = 0; q < config_.slice_count; ++q) {
    SliceState s;
    s.id = q;
    s.max_attachments = config_.slice_capacity;
    world_.slices[static_cast<std::size_t>(q)] = initialize_slice(s, preset);
  }
  project_allocations(world_.slices);

  world_.level_fraction = 1.0;
  world_.assessment = {config_.admission.l_max, true};
  world_.channel_gain_sq = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(world_.evtols.size()),
                                                 static_cast<Eigen::Index>(config_.base_stations.size()));
  if (config_.rayleigh_fading) draw_fading();
  refresh_tasks(true);
  admit();
  evaluate();
  return global_state();
}

void SliceEnv::apply_actions(const Eigen::VectorXd& joint_action) {
  if (joint_action.size() != joint_action_dim())
    throw ContractViolation("SliceEnv::step: joint action has dimension " +
                            std::to_string(joint_action.size()) + ", expected " +
                            std::to_string(joint_action_dim()));
  for (std::size_t q = 0; q < world_.slices.size(); ++q) {
    const Resources a = joint_action.segment<3>(static_cast<Eigen::Index>(3 * q)).array();
    world_.slices[q] = apply_scaling(world_.slices[q], a, config_.step_scale, &world_.diagnostics);
  }
  project_allocations(world_.slices);
}

void SliceEnv::advance_aircraft() {
  for (std::size_t i = 0; i < world_.evtols.size(); ++i) {
    EvtolState& e = world_.evtols[i];
    if (config_.evtols[i].land_at_step >= 0 && world_.step >= config_.evtols[i].land_at_step)
      e = begin_landing(e, config_.climb_rate);
    e = advance(e, config_.layers, config_.dt, config_.climb_rate);
  }
}

void SliceEnv::draw_fading() {
  std::exponential_distribution<double> unit_power(1.0);
  for (Eigen::Index i = 0; i < world_.channel_gain_sq.rows(); ++i)
    for (Eigen::Index j = 0; j < world_.channel_gain_sq.cols(); ++j)
      world_.channel_gain_sq(i, j) = unit_power(world_.rng);
}

void SliceEnv::refresh_tasks(bool regenerate) {
  if (regenerate) {
    world_.tasks = generator_.generate(world_.rng, world_.evtols);
    return;
  }
  std::vector<TaskRequest> kept;
  for (TaskRequest t : world_.tasks) {
    const EvtolState& e = world_.evtols[static_cast<std::size_t>(t.owner)];
    if (!e.airborne()) continue;
    t.position = e.position;
    t.speed = std::hypot(e.v_y, e.v_z);
    kept.push_back(t);
  }
  world_.tasks = std::move(kept);
}

double SliceEnv::link_delay(const TaskRequest& task, int bs, const Resources& fractions,
                            const Resources& pool, double link_sinr) const {
  const BaseStation& b = config_.base_stations[static_cast<std::size_t>(bs)];
  try {
    const double d = distance(task.position, b.position);
    const double gain = scale_gain(steered_gain(azimuth(task.position, b.position),
                                                config_.radio.beamwidth_3db),
                                   fractions[kBeam], pool[kBeam]);
    const double rate = achievable_rate(fractions[kBand] * pool[kBand], link_sinr, gain, d,
                                        config_.radio.reference_distance);
    return total_delay(transmission_delay(task, rate),
                       computation_delay(task, fractions[kComp], pool[kComp]));
  } catch (const DegenerateGeometry&) {
    return kInfiniteDelay;
  }
}

PairingProblem SliceEnv::pairing_problem() const {
  PairingProblem problem;
  for (const BaseStation& b : config_.base_stations) problem.bs_capacity.push_back(b.max_attachments);
  for (const SliceState& s : world_.slices) problem.slice_capacity.push_back(s.max_attachments);

  RadioParams radio = config_.radio;
  radio.channel_gain_sq = world_.channel_gain_sq;
  std::vector<int> transmitters;
  for (const TaskRequest& t : world_.tasks) transmitters.push_back(t.owner);

  const Resources avail = available_pool();
  const Resources preset = config_.preset.value_or(equal_split(config_.slice_count));
  for (const TaskRequest& task : world_.tasks) {
    PairingRequest request;
    request.evtol = task.owner;
    request.t_ask = task.t_ask;
    for (std::size_t j = 0; j < config_.base_stations.size(); ++j) {
      const int bs = static_cast<int>(j);
      const double link_sinr = worst_case_sinr(task.owner, bs, transmitters, radio);
      const double d = distance(task.position, config_.base_stations[j].position);
      for (const SliceState& s : world_.slices) {
        const Resources& fr = s.active() ? s.fractions : preset;
        Candidate c;
        c.bs = bs;
        c.slice = s.id;
        c.delay = link_delay(task, bs, fr, avail, link_sinr);
        c.distance = std::max(d, 1e-9);
        request.candidates.push_back(c);
      }
    }
    problem.requests.push_back(std::move(request));
  }
  return problem;
}

void SliceEnv::update_lifecycle() {
  for (SliceState& s : world_.slices) s.attached.clear();
  for (const Pairing& p : world_.pairings)
    world_.slices[static_cast<std::size_t>(p.slice)].attached.insert(p.evtol);

  const Resources preset = config_.preset.value_or(equal_split(config_.slice_count));
  for (SliceState& s : world_.slices) {
    if (!s.attached.empty() && s.phase == SlicePhase::Idle) {
      const std::set<int> attached = s.attached;
      s = initialize_slice(s, preset);
      s.attached = attached;
    } else if (s.attached.empty() && s.active()) {
      s.live_tasks = 0;
      s = dispose_slice(s);
    }
    s.live_tasks = static_cast<int>(s.attached.size());
  }
  project_allocations(world_.slices);
}

void SliceEnv::assess() {
  const AdmissionOptions& opt = config_.admission;
  if (!opt.pre_assessment) {
    world_.assessment = {opt.l_max, true};
    world_.level_fraction = 1.0;
    return;
  }
  RadioParams radio = config_.radio;
  radio.channel_gain_sq = world_.channel_gain_sq;
  std::vector<ActiveLink> active;
  for (const Pairing& p : world_.pairings) active.push_back({p.evtol, p.bs});
  int n_active = 0;
  for (const SliceState& s : world_.slices) n_active += s.active() ? 1 : 0;
  const Resources split = equal_split(std::max(n_active, 1));
  const Resources totals = config_.pool.totals();

  auto delay_at = [&](const TaskRequest& averaged, double fraction) {
    const auto it = std::find_if(world_.pairings.begin(), world_.pairings.end(),
                                 [&](const Pairing& p) { return p.evtol == averaged.owner; });
    if (it == world_.pairings.end()) return 0.0;
    const double link_sinr = sinr(it->evtol, it->bs, active, radio);
    return link_delay(averaged, it->bs, split, totals * fraction, link_sinr);
  };
  world_.assessment = pre_assess(world_.tasks, opt.l_max, delay_at);
  world_.level_fraction = static_cast<double>(world_.assessment.level) / opt.l_max;
}

void SliceEnv::admit() {
  const PairingProblem problem = pairing_problem();
  const PairingOutcome outcome = config_.admission.pairing == PairingMode::Priority
                                     ? pair_all(problem, config_.costs.gamma_match)
                                     : pair_random(problem, world_.rng);
  world_.pairings = outcome.pairings;
  world_.unpaired = outcome.unpaired;
  update_lifecycle();
  assess();
}

void SliceEnv::evaluate() {
  const int n = config_.slice_count;
  metrics_ = StepMetrics::zeros(n);
  links_.clear();

  RadioParams radio = config_.radio;
  radio.channel_gain_sq = world_.channel_gain_sq;
  std::vector<ActiveLink> active;
  for (const Pairing& p : world_.pairings) active.push_back({p.evtol, p.bs});

  std::vector<const TaskRequest*> task_of(world_.evtols.size(), nullptr);
  for (const TaskRequest& t : world_.tasks) task_of[static_cast<std::size_t>(t.owner)] = &t;

  const Resources avail = available_pool();
  std::vector<std::vector<double>> sats(static_cast<std::size_t>(n)), delays(sats.size()),
      deadlines(sats.size());
  for (const Pairing& p : world_.pairings) {
    const TaskRequest* task = task_of[static_cast<std::size_t>(p.evtol)];
    if (task == nullptr) continue;
    const SliceState& s = world_.slices[static_cast<std::size_t>(p.slice)];
    LinkOutcome out;
    out.pairing = p;
    out.deadline = task->t_ask;
    const BaseStation& b = config_.base_stations[static_cast<std::size_t>(p.bs)];
    out.budget.sinr = sinr(p.evtol, p.bs, active, radio);
    try {
      const double d = distance(task->position, b.position);
      out.budget.gain = scale_gain(steered_gain(azimuth(task->position, b.position),
                                                radio.beamwidth_3db),
                                   s.v_beam(), avail[kBeam]);
      out.budget.rate = achievable_rate(s.v_band() * avail[kBand], out.budget.sinr,
                                        out.budget.gain, d, radio.reference_distance);
      out.t_tran = transmission_delay(*task, out.budget.rate);
    } catch (const DegenerateGeometry&) {
      out.t_tran = kInfiniteDelay;
    }
    out.t_comp = computation_delay(*task, s.v_comp(), avail[kComp]);
    out.delay = total_delay(out.t_tran, out.t_comp);
    out.satisfaction = satisfaction(task->t_ask, out.delay, config_.costs.eta);
    const auto q = static_cast<std::size_t>(p.slice);
    sats[q].push_back(out.satisfaction);
    delays[q].push_back(out.delay);
    deadlines[q].push_back(out.deadline);
    links_.push_back(out);
  }

  const CostWeights& w = config_.costs;
  const Resources unit(config_.pool.s_band, config_.pool.s_beam, config_.pool.s_comp);
  for (int q = 0; q < n; ++q) {
    const auto k = static_cast<std::size_t>(q);
    const SliceState& s = world_.slices[k];
    metrics_.fractions.col(q) = s.fractions.matrix();
    if (!s.active()) continue;
    const Resources absolute = s.fractions * unit;
    metrics_.sat_sum[q] = slice_satisfaction(sats[k]);
    metrics_.sat_mean[q] = mean_satisfaction(sats[k]);
    metrics_.vio_cost[q] = violation_cost(delays[k], deadlines[k], w.omega_v);
    metrics_.op_cost[q] = operation_cost(absolute[kBand], absolute[kBeam], absolute[kComp], w);
    metrics_.reward[q] = reward(metrics_.sat_mean[q], total_cost(metrics_.vio_cost[q], metrics_.op_cost[q]),
                                w.omega_1, w.omega_2);
  }
  metrics_.unpaired = static_cast<int>(world_.unpaired.size());
  metrics_.unpaired_cost = w.omega_v * metrics_.unpaired;
  metrics_.consumption = world_.level_fraction * config_.pool.scale;
  metrics_.level = world_.assessment.level;
  const Eigen::VectorXd slice_cost = metrics_.op_cost + metrics_.vio_cost;
  metrics_.objective = system_objective({metrics_.sat_sum.data(), static_cast<std::size_t>(n)},
                                        {slice_cost.data(), static_cast<std::size_t>(n)}, w.alpha, w.beta);
  observations_ = build_observations(world_.slices, metrics_);
}

Eigen::VectorXd SliceEnv::global_state() const { return concatenate(observations_); }

StepResult SliceEnv::step(const Eigen::VectorXd& joint_action) { return step(joint_action, {}); }

StepResult SliceEnv::step(const Eigen::VectorXd& joint_action, const StepOptions& options) {
  apply_actions(joint_action);
  ++world_.step;
  advance_aircraft();
  if (options.regenerate_tasks && config_.rayleigh_fading) draw_fading();
  refresh_tasks(options.regenerate_tasks);

  // Grounded aircraft leave their slice immediately.
  const auto grounded = [&](int id) { return !world_.evtols[static_cast<std::size_t>(id)].airborne(); };
  std::erase_if(world_.pairings, [&](const Pairing& p) { return grounded(p.evtol); });
  std::erase_if(world_.unpaired, grounded);

  if (options.run_admission && world_.step % config_.admission.period == 0)
    admit();
  else
    update_lifecycle();

  evaluate();
  return {global_state(), metrics_.reward, metrics_};
}

double SliceEnv::lookahead_reward(const Eigen::VectorXd& joint_action, int agent,
                                  const StepOptions& options) const {
  SliceEnv copy = *this;
  const StepResult r = copy.step(joint_action, options);
  return r.rewards[agent];
}

}  // namespace skyslice::marl
