#include "skyslice/airspace.hpp"

#include "skyslice/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace skyslice {

std::string_view to_string(FlightPhase phase) {
  switch (phase) {
    case FlightPhase::Takeoff: return "takeoff";
    case FlightPhase::Cruise: return "cruise";
    case FlightPhase::Landing: return "landing";
    case FlightPhase::Grounded: return "grounded";
  }
  return "grounded";
}

FlightPhase flight_phase_from_string(std::string_view name) {
  if (name == "takeoff") return FlightPhase::Takeoff;
  if (name == "cruise") return FlightPhase::Cruise;
  if (name == "landing") return FlightPhase::Landing;
  if (name == "grounded") return FlightPhase::Grounded;
  throw ConfigError("unknown flight phase '" + std::string(name) + "'");
}

void validate_layers(std::span<const LayerConfig> layers, double separation) {
  if (layers.empty()) throw ConfigError("at least one flight layer is required");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (!(layers[k].altitude > 0.0))
      throw ConfigError("layer " + std::to_string(k) + ": altitude must be positive");
    if (!(layers[k].prescribed_speed > 0.0))
      throw ConfigError("layer " + std::to_string(k) + ": prescribed speed must be positive");
    if (k > 0 && std::abs(layers[k].altitude - layers[k - 1].altitude - separation) > 1e-9)
      throw ConfigError("layer " + std::to_string(k) + ": adjacent layers must be separated by " +
                        std::to_string(separation) + " m");
  }
}

EvtolState step_kinematics(const EvtolState& e, double dt) {
  EvtolState next = e;
  next.position.y() += e.v_y * dt;
  next.position.z() += e.v_z * dt;
  return next;
}

EvtolState phase_controller(const EvtolState& e, std::span<const LayerConfig> layers,
                            double climb_rate) {
  if (e.target_layer < 0 || static_cast<std::size_t>(e.target_layer) >= layers.size())
    throw ConfigError("eVTOL " + std::to_string(e.id) + ": unknown target layer " +
                      std::to_string(e.target_layer));
  const LayerConfig& layer = layers[static_cast<std::size_t>(e.target_layer)];

  EvtolState next = e;
  switch (e.phase) {
    case FlightPhase::Takeoff:
      if (next.position.z() >= layer.altitude) {
        next.position.z() = layer.altitude;
        next.v_z = 0.0;
        next.v_y = layer.prescribed_speed;
        next.phase = FlightPhase::Cruise;
      } else {
        next.v_z = climb_rate;
        next.v_y = 0.0;
      }
      break;
    case FlightPhase::Landing:
      if (next.position.z() <= 0.0) {
        next.position.z() = 0.0;
        next.v_y = 0.0;
        next.v_z = 0.0;
        next.phase = FlightPhase::Grounded;
      } else {
        next.v_z = -climb_rate;
      }
      break;
    case FlightPhase::Cruise:
    case FlightPhase::Grounded:
      break;
  }
  return next;
}

EvtolState begin_landing(const EvtolState& e, double climb_rate) {
  if (e.phase != FlightPhase::Cruise) return e;
  EvtolState next = e;
  next.phase = FlightPhase::Landing;
  next.v_y = 0.0;
  next.v_z = -climb_rate;
  return next;
}

EvtolState advance(const EvtolState& e, std::span<const LayerConfig> layers, double dt,
                   double climb_rate) {
  return phase_controller(step_kinematics(e, dt), layers, climb_rate);
}

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double distance(const EvtolState& e, const BaseStation& b) {
  return distance(e.position, b.position);
}

double azimuth(const Vec3& evtol, const Vec3& bs) {
  const double d = distance(evtol, bs);
  if (!(d > 0.0)) throw DegenerateGeometry("azimuth: eVTOL and base station coincide");
  const double dz = evtol.z() - bs.z();
  return std::acos(std::clamp(dz / d, -1.0, 1.0));
}

double azimuth(const EvtolState& e, const BaseStation& b) {
  return azimuth(e.position, b.position);
}

}  // namespace skyslice
