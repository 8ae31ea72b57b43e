#include "skyslice/radio.hpp"

#include "skyslice/errors.hpp"

#include <cmath>

namespace skyslice {

double steered_gain(double phi, double min_beamwidth) {
  const double best = optimal_beamwidth(phi);
  if (best >= min_beamwidth && phi > 0.0) return max_beam_gain(phi);
  return beam_pattern_gain(phi, min_beamwidth);
}

double scale_gain(double pattern_gain, double v_beam, double s_beam) {
  if (!(v_beam >= 0.0 && v_beam <= 1.0))
    throw ContractViolation("beam fraction must lie in [0, 1]");
  return pattern_gain * v_beam * s_beam;
}

double effective_gain(double phi, double v_beam, double s_beam) {
  return scale_gain(max_beam_gain(phi), v_beam, s_beam);
}

double sinr(int evtol, int bs, std::span<const ActiveLink> active, const RadioParams& params) {
  double interference = 0.0;
  for (const ActiveLink& link : active) {
    if (link.evtol == evtol || link.bs == bs) continue;
    interference += params.tx_power * params.gain_sq(link.evtol, bs);
  }
  return params.tx_power * params.gain_sq(evtol, bs) / (interference + params.noise_power);
}

double worst_case_sinr(int evtol, int bs, std::span<const int> transmitters,
                       const RadioParams& params) {
  double interference = 0.0;
  for (int other : transmitters) {
    if (other == evtol) continue;
    interference += params.tx_power * params.gain_sq(other, bs);
  }
  return params.tx_power * params.gain_sq(evtol, bs) / (interference + params.noise_power);
}

double achievable_rate(double bandwidth_mhz, double link_sinr, double gain, double d,
                       double reference_distance) {
  if (!(d > 0.0)) throw DegenerateGeometry("achievable_rate: zero link distance");
  const double rel = d / reference_distance;
  return bandwidth_mhz * std::log2(1.0 + link_sinr) * gain / (rel * rel);
}

LinkBudget link_budget(const EvtolState& e, const BaseStation& b, double v_band, double s_band,
                       double v_beam, double s_beam, double link_sinr, const RadioParams& params) {
  if (!(v_band >= 0.0 && v_band <= 1.0))
    throw ContractViolation("bandwidth fraction must lie in [0, 1]");
  LinkBudget out;
  const double d = distance(e, b);
  out.sinr = link_sinr;
  out.gain = scale_gain(steered_gain(azimuth(e, b), params.beamwidth_3db), v_beam, s_beam);
  out.rate = achievable_rate(v_band * s_band, link_sinr, out.gain, d, params.reference_distance);
  return out;
}

}  // namespace skyslice
