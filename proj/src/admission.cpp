#include "skyslice/admission.hpp"

#include "skyslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skyslice {

double match_priority_numerator(double t_ask, const Candidate& c, double gamma) {
  if (!(c.distance > 0.0)) throw ContractViolation("match priority: distance must be positive");
  const double efficiency = std::isinf(c.delay) ? 0.0 : t_ask / c.delay;
  return gamma * efficiency + (1.0 - gamma) / c.distance;
}

std::vector<double> match_priorities(double t_ask, std::span<const Candidate> candidates,
                                     double gamma) {
  if (candidates.empty()) throw ContractViolation("match priority: no candidates");
  std::vector<double> p(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k)
    p[k] = match_priority_numerator(t_ask, candidates[k], gamma);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total > 0.0)
    for (double& v : p) v /= total;
  else
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  return p;
}

namespace {

struct Occupancy {
  std::vector<int> bs;
  std::vector<int> slice;

  explicit Occupancy(const PairingProblem& problem)
      : bs(problem.bs_capacity.size(), 0), slice(problem.slice_capacity.size(), 0) {}

  bool free(const PairingProblem& problem, const Candidate& c) const {
    const auto j = static_cast<std::size_t>(c.bs);
    const auto q = static_cast<std::size_t>(c.slice);
    return bs[j] < problem.bs_capacity[j] && slice[q] < problem.slice_capacity[q];
  }
  void take(const Candidate& c) {
    ++bs[static_cast<std::size_t>(c.bs)];
    ++slice[static_cast<std::size_t>(c.slice)];
  }
};

}  // namespace

PairingOutcome pair_all(const PairingProblem& problem, double gamma) {
  PairingOutcome out;
  Occupancy occupancy(problem);
  for (const PairingRequest& request : problem.requests) {
    if (request.candidates.empty()) {
      out.unpaired.push_back(request.evtol);
      continue;
    }
    const std::vector<double> priority = match_priorities(request.t_ask, request.candidates, gamma);
    std::vector<std::size_t> order(priority.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return priority[a] > priority[b]; });
    bool paired = false;
    for (std::size_t k : order) {
      const Candidate& c = request.candidates[k];
      if (!occupancy.free(problem, c)) continue;
      occupancy.take(c);
      out.pairings.push_back({request.evtol, c.bs, c.slice, priority[k]});
      paired = true;
      break;
    }
    if (!paired) out.unpaired.push_back(request.evtol);
  }
  return out;
}

PairingOutcome pair_random(const PairingProblem& problem, std::mt19937_64& rng) {
  PairingOutcome out;
  Occupancy occupancy(problem);
  for (const PairingRequest& request : problem.requests) {
    std::vector<std::size_t> open;
    for (std::size_t k = 0; k < request.candidates.size(); ++k)
      if (occupancy.free(problem, request.candidates[k])) open.push_back(k);
    if (open.empty()) {
      out.unpaired.push_back(request.evtol);
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    const Candidate& c = request.candidates[open[pick(rng)]];
    occupancy.take(c);
    out.pairings.push_back({request.evtol, c.bs, c.slice, 1.0 / static_cast<double>(open.size())});
  }
  return out;
}

AverageDemand average_demand(std::span<const TaskRequest> tasks) {
  AverageDemand avg;
  if (tasks.empty()) return avg;
  for (const TaskRequest& t : tasks) {
    avg.w += t.w_ask;
    avg.f += t.f_ask;
    avg.t += t.t_ask;
  }
  const auto n = static_cast<double>(tasks.size());
  avg.w /= n;
  avg.f /= n;
  avg.t /= n;
  return avg;
}

AssessmentResult pre_assess(std::span<const TaskRequest> tasks, int l_max,
                            const LevelDelayFn& delay_at) {
  if (l_max < 1) throw ContractViolation("pre_assess: l_max must be at least 1");
  if (tasks.empty()) return {1, true};

  const AverageDemand avg = average_demand(tasks);
  std::vector<TaskRequest> averaged(tasks.begin(), tasks.end());
  for (TaskRequest& t : averaged) {
    t.w_ask = avg.w;
    t.f_ask = avg.f;
    t.t_ask = avg.t;
  }

  for (int level = 1; level <= l_max; ++level) {
    const double fraction = static_cast<double>(level) / l_max;
    const bool all_met = std::all_of(averaged.begin(), averaged.end(), [&](const TaskRequest& t) {
      return delay_at(t, fraction) <= avg.t;
    });
    if (all_met) return {level, true};
  }
  return {l_max, false};
}

}  // namespace skyslice
