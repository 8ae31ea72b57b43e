#include "skyslice/workload.hpp"

#include "skyslice/errors.hpp"

#include <numeric>
#include <string>

namespace skyslice {

double transmission_delay(const TaskRequest& task, double rate) {
  if (!(rate > 0.0)) return kInfiniteDelay;
  return task.w_ask / rate;
}

double computation_delay(const TaskRequest& task, double v_comp, double s_comp) {
  const double capacity = v_comp * s_comp;
  if (!(capacity > 0.0)) return kInfiniteDelay;
  return task.f_ask / capacity;
}

double satisfaction(double t_ask, double t_actual, double eta) {
  if (std::isinf(t_actual)) return 0.0;
  return 1.0 / (1.0 + std::exp(-eta * (t_ask - t_actual)));
}

double slice_satisfaction(std::span<const double> per_task) {
  return std::accumulate(per_task.begin(), per_task.end(), 0.0);
}

double mean_satisfaction(std::span<const double> per_task) {
  if (per_task.empty()) return 0.0;
  return slice_satisfaction(per_task) / static_cast<double>(per_task.size());
}

int late_count(std::span<const double> delays, std::span<const double> deadlines) {
  if (delays.size() != deadlines.size())
    throw ContractViolation("late_count: delays and deadlines differ in length");
  int late = 0;
  for (std::size_t k = 0; k < delays.size(); ++k)
    if (delays[k] > deadlines[k]) ++late;
  return late;
}

double violation_cost(std::span<const double> delays, std::span<const double> deadlines,
                      double omega_v) {
  return omega_v * late_count(delays, deadlines);
}

double operation_cost(double band, double beam, double comp, const CostWeights& w) {
  return w.omega_band * band + w.omega_beam * beam + w.omega_comp * comp;
}

void validate(const TaskGenConfig& c) {
  auto check = [](const Range& r, const char* name) {
    if (!(r.lo > 0.0) || !(r.hi >= r.lo))
      throw ConfigError(std::string("task range '") + name + "' must satisfy 0 < lo <= hi");
  };
  check(c.w, "w");
  check(c.f, "f");
  check(c.t, "t");
}

TaskGenerator::TaskGenerator(TaskGenConfig config) : config_(config) { validate(config_); }

TaskRequest TaskGenerator::draw(std::mt19937_64& rng, const EvtolState& owner) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&](const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); };
  TaskRequest task;
  task.owner = owner.id;
  task.w_ask = sample(config_.w);
  task.f_ask = sample(config_.f);
  task.t_ask = sample(config_.t);
  task.position = owner.position;
  task.speed = std::hypot(owner.v_y, owner.v_z);
  return task;
}

std::vector<TaskRequest> TaskGenerator::generate(std::mt19937_64& rng,
                                                 std::span<const EvtolState> evtols) const {
  std::vector<TaskRequest> tasks;
  for (const EvtolState& e : evtols)
    if (e.airborne()) tasks.push_back(draw(rng, e));
  return tasks;
}

double system_objective(std::span<const double> sat_sums, std::span<const double> costs, double alpha,
                        double beta) {
  if (sat_sums.size() != costs.size()) throw ContractViolation("system_objective: size mismatch");
  double j = 0.0;
  for (std::size_t q = 0; q < costs.size(); ++q) j += alpha * sat_sums[q] - beta * costs[q];
  return j;
}

}  // namespace skyslice
