#pragma once

#include "skyslice/airspace.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace skyslice {

/// Delay value standing in for a task that can never finish.
inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

struct TaskRequest {
  int owner = 0;
  double w_ask = 0.0;  // Mbit
  double f_ask = 0.0;  // Gcycle
  double t_ask = 0.0;  // s
  Vec3 position = Vec3::Zero();
  double speed = 0.0;  // m/s, |v|
};

struct CostWeights {
  double omega_v = 2.0;
  double omega_band = 0.01;
  double omega_beam = 1.0;
  double omega_comp = 0.01;
  double eta = 0.1;
  double alpha = 1.0;
  double beta = 1.0;
  double omega_1 = 10.0;
  double omega_2 = 1.0;
  double gamma_match = 0.5;

  bool operator==(const CostWeights&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct TaskGenConfig {
  Range w{5.0, 20.0};   // Mbit
  Range f{10.0, 50.0};  // Gcycle
  Range t{1.0, 5.0};    // s
  bool operator==(const TaskGenConfig&) const = default;
};

double transmission_delay(const TaskRequest& task, double rate);
double computation_delay(const TaskRequest& task, double v_comp, double s_comp);
inline double total_delay(double t_tran, double t_comp) { return t_tran + t_comp; }

/// Logistic satisfaction 1 / (1 + exp(-eta (t_ask - t))). An infinite delay
/// yields exactly 0.
double satisfaction(double t_ask, double t_actual, double eta);

/// Sum of per-user satisfactions of one slice.
double slice_satisfaction(std::span<const double> per_task);
/// Mean of per-user satisfactions; 0 for an empty slice.
double mean_satisfaction(std::span<const double> per_task);

/// Number of tasks with delay strictly above their deadline.
int late_count(std::span<const double> delays, std::span<const double> deadlines);
double violation_cost(std::span<const double> delays, std::span<const double> deadlines,
                      double omega_v);

/// Weighted cost of the absolute resources (MHz, beam units, GFLOPS) held.
double operation_cost(double band, double beam, double comp, const CostWeights& w);

inline double total_cost(double c_violation, double c_operation) {
  return c_violation + c_operation;
}

/// Sum over slices of alpha * Sat_q - beta * C_q, with Sat_q the summed
/// satisfaction. Reporting only; learners optimize the reward.
double system_objective(std::span<const double> sat_sums, std::span<const double> costs, double alpha,
                        double beta);

/// Draws one task per airborne eVTOL. Throws ConfigError for empty or
/// inverted ranges.
class TaskGenerator {
 public:
  explicit TaskGenerator(TaskGenConfig config);

  std::vector<TaskRequest> generate(std::mt19937_64& rng, std::span<const EvtolState> evtols) const;
  TaskRequest draw(std::mt19937_64& rng, const EvtolState& owner) const;

  const TaskGenConfig& config() const { return config_; }

 private:
  TaskGenConfig config_;
};

void validate(const TaskGenConfig& config);

}  // namespace skyslice
