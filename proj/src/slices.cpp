#include "skyslice/slices.hpp"

#include "skyslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skyslice {

void validate(const ResourcePool& pool) {
  if (!(pool.s_band > 0.0 && pool.s_beam > 0.0 && pool.s_comp > 0.0 && pool.scale > 0.0))
    throw ConfigError("resource pool totals and scale must be positive");
}

std::string_view to_string(SlicePhase phase) {
  switch (phase) {
    case SlicePhase::Idle: return "idle";
    case SlicePhase::Initialization: return "initialization";
    case SlicePhase::Scaling: return "scaling";
    case SlicePhase::Disposal: return "disposal";
  }
  return "idle";
}

Resources absolute_resources(const SliceState& s, const ResourcePool& pool) {
  return s.fractions * pool.totals();
}

SliceState initialize_slice(const SliceState& s, const Resources& preset) {
  if (s.phase != SlicePhase::Idle)
    throw ContractViolation("initialize_slice: slice " + std::to_string(s.id) + " is not idle");
  SliceState next = s;
  next.phase = SlicePhase::Initialization;
  next.fractions = preset.cwiseMax(0.0).cwiseMin(1.0);
  next.phase = SlicePhase::Scaling;
  return next;
}

SliceState apply_scaling(const SliceState& s, const Resources& action, double step_scale,
                         ScalingDiagnostics* diag) {
  if (!s.active()) return s;
  Resources a = action;
  for (int k = 0; k < 3; ++k) {
    if (a[k] < -1.0 || a[k] > 1.0 || std::isnan(a[k])) {
      if (diag) ++diag->clamped_actions;
      a[k] = std::isnan(a[k]) ? 0.0 : std::clamp(a[k], -1.0, 1.0);
    }
  }
  SliceState next = s;
  next.fractions = (s.fractions + a * step_scale).cwiseMax(0.0).cwiseMin(1.0);
  return next;
}

SliceState dispose_slice(const SliceState& s) {
  if (s.live_tasks > 0)
    throw ContractViolation("dispose_slice: slice " + std::to_string(s.id) + " has live tasks");
  if (s.phase == SlicePhase::Idle) return s;
  SliceState next = s;
  next.phase = SlicePhase::Disposal;
  next.fractions.setZero();
  next.attached.clear();
  next.phase = SlicePhase::Idle;
  return next;
}

void project_allocations(std::span<SliceState> slices) {
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0;
    for (SliceState& s : slices) {
      s.fractions[k] = std::clamp(s.fractions[k], 0.0, 1.0);
      sum += s.fractions[k];
    }
    // Sums within rounding of 1 are left alone so the projection is idempotent.
    if (sum > 1.0 + 1e-12)
      for (SliceState& s : slices) s.fractions[k] /= sum;
  }
}

Eigen::Matrix3Xd allocation_matrix(std::span<const SliceState> slices) {
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(slices.size()));
  for (std::size_t q = 0; q < slices.size(); ++q)
    m.col(static_cast<Eigen::Index>(q)) = slices[q].fractions.matrix();
  return m;
}

Resources equal_split(int n) {
  if (n <= 0) throw ContractViolation("equal_split: slice count must be positive");
  return Resources::Constant(1.0 / n);
}

}  // namespace skyslice
