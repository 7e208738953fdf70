#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/kinematics.hpp"
#include "mocap/skeleton.hpp"

namespace mocap {

enum class RootMode { Constant, Linear, Sinusoid };

// Sinusoidal rotation of one segment about a fixed axis, applied on top of
// the base pose: q(t) = base * axis_angle(axis, amplitude * sin(2 pi f t + phase)).
struct Oscillation {
  int segment = -1;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double amplitude_rad = 0.0;  // in [0, pi]
  double freq_hz = 0.0;
  double phase_rad = 0.0;
};

struct MotionSpec {
  KinematicState base;
  std::vector<Oscillation> oscillations;

  RootMode root_mode = RootMode::Constant;
  Eigen::Vector3d root_velocity = Eigen::Vector3d::Zero();  // Linear
  Eigen::Vector3d root_axis = Eigen::Vector3d::UnitX();     // Sinusoid
  double root_amplitude_m = 0.0;
  double root_freq_hz = 0.0;
  double root_phase_rad = 0.0;

  double duration_s = 15.0;
  double rate_hz = 20.0;
  std::uint64_t seed = 1;  // consumed by the paired corruption stage

  void validate(const SkeletonTopology& topo) const;  // throws ValidationError
};

// Per joint-frame corruption: i.i.d. Gaussian noise, uniform teleport
// outliers, and tracking loss, mirroring the random-error / tracking-loss
// taxonomy the outlier model assumes.
struct CorruptionSpec {
  double gaussian_sd = 0.0;       // m, per coordinate
  double outlier_rate = 0.0;      // in [0, 1)
  double outlier_halfwidth = 0.5; // m; teleport offset uniform in [-w, w]^3
  double lost_rate = 0.0;         // in [0, 1)
  std::uint64_t seed = 1;

  void validate() const;
};

enum class SampleLabel : int { Clean = 0, Outlier = 1, Lost = 2 };

struct CorruptionLabels {
  std::vector<std::array<SampleLabel, kNumJoints>> labels;  // per frame
};

// Deterministic motion synthesis: per-frame states from the oscillation
// specs, positions via forward kinematics.
std::pair<FrameStream, std::vector<KinematicState>> generate_motion(
    const MotionSpec& spec, const SkeletonTopology& topo);

// Applies the corruption model; all randomness flows from spec.seed, so
// identical specs give bit-identical streams.
std::pair<FrameStream, CorruptionLabels> corrupt_stream(const FrameStream& stream,
                                                        const CorruptionSpec& spec);

// Articulated standing rest pose used by the default scenario and tests.
KinematicState default_base_state(const SkeletonTopology& topo);

// Arm-raise scenario: 300 frames at 20 Hz, left shoulder and elbow rotations
// oscillating at 0.25 Hz over the bent-arm base pose.
MotionSpec default_motion_spec(const SkeletonTopology& topo);

// Depth-sensor-scale corruption: 25 mm Gaussian noise, 5% teleports of
// half-width 0.5 m, no tracking loss.
CorruptionSpec default_corruption_spec();

}  // namespace mocap
