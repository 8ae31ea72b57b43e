#pragma once

#include "skyslice/airspace.hpp"

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace skyslice {

struct RadioParams {
  double tx_power = 0.1;       // W, every eVTOL
  double noise_power = 1e-9;   // W
  double beamwidth_3db = 0.2;  // rad, narrowest half-power beam the array forms
  /// Distances enter the rate's 1/d^2 factor in units of this many meters.
  double reference_distance = 2000.0;
  /// |h|^2 per (eVTOL, BS); empty means 1 everywhere.
  Eigen::MatrixXd channel_gain_sq;

  double gain_sq(int evtol, int bs) const {
    if (channel_gain_sq.size() == 0) return 1.0;
    return channel_gain_sq(evtol, bs);
  }
};

struct LinkBudget {
  double sinr = 0.0;
  double gain = 0.0;
  double rate = 0.0;  // Mbit/s
};

/// An eVTOL currently transmitting to a base station.
struct ActiveLink {
  int evtol = 0;
  int bs = 0;
};

/// Peak beam gain at the rate-optimal half-power beamwidth for a link seen
/// under angle `phi`: 16 / (6.76 phi sqrt(8 ln2 e)).
template <typename Scalar>
Scalar max_beam_gain(Scalar phi) {
  if (!(phi > Scalar(0))) throw std::domain_error("max_beam_gain: angle must be positive");
  using std::sqrt;
  const Scalar ln2 = std::numbers::ln2_v<Scalar>;
  const Scalar e = std::numbers::e_v<Scalar>;
  return Scalar(16) / (Scalar(6.76) * phi * sqrt(Scalar(8) * ln2 * e));
}

/// Gaussian main-lobe gain of a beam of half-power width `beamwidth`
/// evaluated at angle `phi` off boresight.
template <typename Scalar>
Scalar beam_pattern_gain(Scalar phi, Scalar beamwidth) {
  if (!(beamwidth > Scalar(0))) throw std::domain_error("beam_pattern_gain: beamwidth must be positive");
  using std::exp;
  const Scalar ln2 = std::numbers::ln2_v<Scalar>;
  return Scalar(16) / (Scalar(6.76) * beamwidth) *
         exp(Scalar(-4) * ln2 * phi * phi / (beamwidth * beamwidth));
}

/// Beamwidth that maximizes beam_pattern_gain for angle `phi`.
template <typename Scalar>
Scalar optimal_beamwidth(Scalar phi) {
  using std::sqrt;
  return sqrt(Scalar(8) * std::numbers::ln2_v<Scalar>) * phi;
}

/// Best achievable pattern gain when the beam cannot be made narrower than
/// `min_beamwidth`. Equals max_beam_gain(phi) whenever the optimum is
/// reachable; for near-boresight links the beam saturates at the minimum.
double steered_gain(double phi, double min_beamwidth);

/// max_beam_gain(phi) * v_beam * s_beam. Throws ContractViolation when
/// v_beam lies outside [0, 1].
double effective_gain(double phi, double v_beam, double s_beam);

/// Same scaling applied to an already computed pattern gain.
double scale_gain(double pattern_gain, double v_beam, double s_beam);

/// SINR of eVTOL `evtol` at base station `bs`. Every other link that
/// terminates at a different base station interferes.
double sinr(int evtol, int bs, std::span<const ActiveLink> active, const RadioParams& params);

/// SINR when every other listed transmitter interferes regardless of its
/// serving base station.
double worst_case_sinr(int evtol, int bs, std::span<const int> transmitters,
                       const RadioParams& params);

/// r = bandwidth * log2(1 + sinr) * gain / (d / d_ref)^2, with bandwidth the
/// slice's absolute share in MHz. Throws DegenerateGeometry for d <= 0.
double achievable_rate(double bandwidth_mhz, double sinr, double gain, double d,
                       double reference_distance);

/// Full per-link evaluation for a slice share of (v_band * s_band) MHz and
/// (v_beam * s_beam) beam units.
LinkBudget link_budget(const EvtolState& e, const BaseStation& b, double v_band, double s_band,
                       double v_beam, double s_beam, double link_sinr, const RadioParams& params);

}  // namespace skyslice
