#pragma once

#include <Eigen/Core>

#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace skyslice {

/// Bandwidth, beam and compute triple. Used both for fractions and for
/// absolute amounts.
using Resources = Eigen::Array3d;

enum Resource : int { kBand = 0, kBeam = 1, kComp = 2 };

struct ResourcePool {
  double s_band = 100.0;  // MHz
  double s_beam = 1.0;    // beam units
  double s_comp = 100.0;  // GFLOPS
  double scale = 1.0;     // k-fold multiplier

  Resources totals() const { return Resources(s_band, s_beam, s_comp) * scale; }
  bool operator==(const ResourcePool&) const = default;
};

void validate(const ResourcePool& pool);

enum class SlicePhase { Idle, Initialization, Scaling, Disposal };

std::string_view to_string(SlicePhase phase);

struct SliceState {
  int id = 0;
  Resources fractions = Resources::Zero();
  SlicePhase phase = SlicePhase::Idle;
  std::set<int> attached;
  int max_attachments = 2;
  int live_tasks = 0;

  bool active() const { return phase == SlicePhase::Scaling; }
  double v_band() const { return fractions[kBand]; }
  double v_beam() const { return fractions[kBeam]; }
  double v_comp() const { return fractions[kComp]; }
};

/// fractions * pool totals (including the pool's scale).
Resources absolute_resources(const SliceState& s, const ResourcePool& pool);

/// Idle -> Initialization -> Scaling with the preset clamped into [0, 1].
/// Cross-slice feasibility is restored by project_allocations. Throws
/// ContractViolation unless the slice is Idle.
SliceState initialize_slice(const SliceState& s, const Resources& preset);

/// Counts action components that arrived outside [-1, 1].
struct ScalingDiagnostics {
  long clamped_actions = 0;
};

/// fraction' = clamp(fraction + a * step_scale, 0, 1). Inactive slices are
/// returned unchanged.
SliceState apply_scaling(const SliceState& s, const Resources& action, double step_scale,
                         ScalingDiagnostics* diag = nullptr);

/// Releases every resource and returns to Idle. Throws ContractViolation if
/// the slice still carries live tasks.
SliceState dispose_slice(const SliceState& s);

/// Proportional rescaling so that every resource sums to at most 1 across
/// slices. Ratios among slices are preserved for each rescaled resource.
void project_allocations(std::span<SliceState> slices);

/// Column q holds slice q's fractions.
Eigen::Matrix3Xd allocation_matrix(std::span<const SliceState> slices);

/// Equal split 1/n of every resource.
Resources equal_split(int n);

}  // namespace skyslice
