#pragma once

#include <Eigen/Core>

#include <span>
#include <string_view>

namespace skyslice {

/// Cartesian position or velocity in meters (m/s). Base stations sit on z = 0.
using Vec3 = Eigen::Vector3d;

struct LayerConfig {
  double altitude = 100.0;         // m
  double prescribed_speed = 30.0;  // m/s

  bool operator==(const LayerConfig&) const = default;
};

enum class FlightPhase { Takeoff, Cruise, Landing, Grounded };

std::string_view to_string(FlightPhase phase);
FlightPhase flight_phase_from_string(std::string_view name);

struct EvtolState {
  int id = 0;
  Vec3 position = Vec3::Zero();
  double v_y = 0.0;  // horizontal, along +y
  double v_z = 0.0;  // vertical
  FlightPhase phase = FlightPhase::Grounded;
  int target_layer = 0;

  bool airborne() const { return phase != FlightPhase::Grounded; }
};

struct BaseStation {
  int id = 0;
  Vec3 position = Vec3::Zero();
  int max_attachments = 3;
};

/// Checks altitude/speed positivity and the vertical separation between
/// adjacent layers. Throws ConfigError.
void validate_layers(std::span<const LayerConfig> layers, double separation);

/// Integrates one time step at constant velocity. x is never touched.
EvtolState step_kinematics(const EvtolState& e, double dt);

/// Applies the takeoff/cruise/landing rules after integration.
///
/// Takeoff climbs at `climb_rate` until the target altitude is reached, then
/// snaps onto the layer and adopts the layer's prescribed speed. Landing
/// descends at `climb_rate` until the ground, then everything stops.
/// Throws ConfigError for an unknown target layer.
EvtolState phase_controller(const EvtolState& e,
                            std::span<const LayerConfig> layers,
                            double climb_rate = 10.0);

/// Switches a cruising aircraft into its descent.
EvtolState begin_landing(const EvtolState& e, double climb_rate = 10.0);

/// One full simulation tick: integrate, then apply the phase rules.
EvtolState advance(const EvtolState& e, std::span<const LayerConfig> layers,
                   double dt, double climb_rate = 10.0);

double distance(const Vec3& a, const Vec3& b);
double distance(const EvtolState& e, const BaseStation& b);

/// Angle between the vertical through the base station and the line of
/// sight, arccos(dz / d) clamped into [0, pi]. Throws DegenerateGeometry
/// when the two positions coincide.
double azimuth(const Vec3& evtol, const Vec3& bs);
double azimuth(const EvtolState& e, const BaseStation& b);

}  // namespace skyslice
