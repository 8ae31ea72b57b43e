#pragma once

#include "skyslice/workload.hpp"

#include <functional>
#include <random>
#include <span>
#include <vector>

namespace skyslice {

struct Pairing {
  int evtol = 0;
  int bs = 0;
  int slice = 0;
  double priority = 0.0;

  bool operator==(const Pairing&) const = default;
};

/// One (BS, slice) option for an eVTOL together with what it would deliver.
struct Candidate {
  int bs = 0;
  int slice = 0;
  double delay = kInfiniteDelay;  // s, t_{i,j,q}
  double distance = 0.0;          // m
};

/// gamma * t_ask / delay + (1 - gamma) / distance. Infinite delays contribute
/// nothing through the first term.
double match_priority_numerator(double t_ask, const Candidate& c, double gamma);

/// Priorities of all candidates of one eVTOL, normalized to sum to 1.
/// Throws ContractViolation for an empty candidate list or a non-positive
/// distance.
std::vector<double> match_priorities(double t_ask, std::span<const Candidate> candidates,
                                     double gamma);

struct PairingRequest {
  int evtol = 0;
  double t_ask = 0.0;
  std::vector<Candidate> candidates;
};

struct PairingProblem {
  std::vector<PairingRequest> requests;  // attempt order
  std::vector<int> bs_capacity;          // by BS id
  std::vector<int> slice_capacity;       // by slice id
};

struct PairingOutcome {
  std::vector<Pairing> pairings;
  std::vector<int> unpaired;
};

/// Priority-ordered access pairing. Each eVTOL in turn walks its candidates
/// by descending priority and takes the first whose BS and slice both have
/// a free access slot.
PairingOutcome pair_all(const PairingProblem& problem, double gamma);

/// Baseline: each eVTOL takes a uniformly drawn candidate among those with
/// free slots.
PairingOutcome pair_random(const PairingProblem& problem, std::mt19937_64& rng);

struct AssessmentResult {
  int level = 1;
  bool satisfied = true;

  bool operator==(const AssessmentResult&) const = default;
};

/// Mean data volume, compute demand and deadline over `tasks`.
struct AverageDemand {
  double w = 0.0;
  double f = 0.0;
  double t = 0.0;
};
AverageDemand average_demand(std::span<const TaskRequest> tasks);

/// Delay of an averaged task (owner dynamics kept individual) when the pool
/// is reserved at `level_fraction` of its total.
using LevelDelayFn = std::function<double(const TaskRequest& averaged, double level_fraction)>;

/// Smallest level l in [1, l_max] at which every averaged task meets the
/// averaged deadline, reserving l / l_max of the pool. Falls back to
/// {l_max, false}. Throws ContractViolation for l_max < 1.
AssessmentResult pre_assess(std::span<const TaskRequest> tasks, int l_max,
                            const LevelDelayFn& delay_at);

}  // namespace skyslice
