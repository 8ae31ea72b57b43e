#pragma once

#include "skyslice/admission.hpp"
#include "skyslice/airspace.hpp"
#include "skyslice/marl/env.hpp"
#include "skyslice/radio.hpp"
#include "skyslice/slices.hpp"
#include "skyslice/workload.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace skyslice::marl {

enum class PairingMode { Priority, Random };

struct EvtolSpec {
  int layer = 0;
  Vec3 start = Vec3::Zero();
  FlightPhase phase = FlightPhase::Takeoff;
  int land_at_step = -1;  // negative: never lands within an episode

  bool operator==(const EvtolSpec&) const = default;
};

struct AdmissionOptions {
  PairingMode pairing = PairingMode::Priority;
  bool pre_assessment = true;
  int l_max = 10;
  int period = 10;  // steps between admission epochs

  bool operator==(const AdmissionOptions&) const = default;
};

struct EnvConfig {
  double dt = 1.0;
  double climb_rate = 10.0;
  double layer_separation = 100.0;
  std::vector<LayerConfig> layers;
  std::vector<BaseStation> base_stations;
  std::vector<EvtolSpec> evtols;
  RadioParams radio;
  bool rayleigh_fading = false;
  ResourcePool pool;
  double step_scale = 0.1;
  int slice_count = 3;
  int slice_capacity = 2;
  std::optional<Resources> preset;  // default: equal split
  TaskGenConfig tasks;
  CostWeights costs;
  AdmissionOptions admission;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Observation of one slice agent: its fractions, total cost and mean user
/// satisfaction.
struct Observation {
  Resources fractions = Resources::Zero();
  double cost = 0.0;
  double satisfaction = 0.0;

  static constexpr int kDim = 5;
  Eigen::Matrix<double, kDim, 1> vector() const;
};

/// Per-link outcome of one evaluation.
struct LinkOutcome {
  Pairing pairing;
  LinkBudget budget;
  double t_tran = 0.0;
  double t_comp = 0.0;
  double delay = 0.0;
  double deadline = 0.0;
  double satisfaction = 0.0;
};

/// Complete simulator state. Copyable; a copy is an independent snapshot.
struct World {
  std::vector<EvtolState> evtols;
  std::vector<SliceState> slices;
  std::vector<TaskRequest> tasks;
  std::vector<Pairing> pairings;
  std::vector<int> unpaired;
  AssessmentResult assessment;
  double level_fraction = 1.0;
  Eigen::MatrixXd channel_gain_sq;
  int step = 0;
  std::mt19937_64 rng;
  ScalingDiagnostics diagnostics;
};

/// ω1 (sat_mean - 0.5) - ω2 C.
double reward(double sat_mean, double total_cost, double omega_1, double omega_2);

struct StepOptions {
  bool regenerate_tasks = true;
  bool run_admission = true;
};

/// The slice orchestration environment: one agent per slice.
class SliceEnv : public MultiAgentEnv {
 public:
  SliceEnv(EnvConfig config, std::uint64_t seed);

  int agent_count() const override { return config_.slice_count; }
  int observation_dim() const override { return Observation::kDim; }
  int action_dim() const override { return 3; }

  Eigen::VectorXd reset() override;
  StepResult step(const Eigen::VectorXd& joint_action) override;
  StepResult step(const Eigen::VectorXd& joint_action, const StepOptions& options);

  /// Reward agent `agent` would receive if `joint_action` were applied to a
  /// copy of the environment, random stream included. The live environment
  /// is untouched.
  double lookahead_reward(const Eigen::VectorXd& joint_action, int agent,
                          const StepOptions& options = {}) const;

  const World& world() const { return world_; }
  World& mutable_world() { return world_; }
  const EnvConfig& config() const { return config_; }

  std::vector<Observation> observations() const { return observations_; }
  const std::vector<LinkOutcome>& links() const { return links_; }
  const StepMetrics& last_metrics() const { return metrics_; }

  /// Resources reserved for orchestration at the current level.
  Resources available_pool() const;

  /// Recomputes rates, delays, satisfaction, costs and rewards for the
  /// current world without advancing it.
  void evaluate();

  /// Runs access pairing, slice lifecycle transitions and pre-assessment.
  void admit();

  /// Delay of `task` on (bs, slice) given explicit slice fractions and pool.
  double link_delay(const TaskRequest& task, int bs, const Resources& fractions,
                    const Resources& pool, double link_sinr) const;

 private:
  void apply_actions(const Eigen::VectorXd& joint_action);
  void advance_aircraft();
  void draw_fading();
  void refresh_tasks(bool regenerate);
  PairingProblem pairing_problem() const;
  void update_lifecycle();
  void assess();
  Eigen::VectorXd global_state() const;

  EnvConfig config_;
  TaskGenerator generator_;
  World world_;
  std::vector<Observation> observations_;
  std::vector<LinkOutcome> links_;
  StepMetrics metrics_;
};

std::vector<Observation> build_observations(const std::vector<SliceState>& slices,
                                            const StepMetrics& metrics);
Eigen::VectorXd concatenate(const std::vector<Observation>& observations);

}  // namespace skyslice::marl
