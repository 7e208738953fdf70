#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <utility>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/kinematics.hpp"

namespace mocap {

struct MetricsConfig {
  double prominence_min_rad = 10.0 * M_PI / 180.0;  // for angle signals
  double prominence_min_m = 0.05;                   // for position signals
  double min_period_s = 0.5;                        // minimum peak separation
  double speed_min = 0.05;                          // m/s, moving-time cutoff

  void validate() const;
};

// Counts peaks of the mean-subtracted signal with at least the given
// prominence, keeping only peaks separated by min_period_s (taller peaks
// win). Signals shorter than 2 s count as zero repetitions.
int count_repetitions(std::span<const double> timestamps, std::span<const double> values,
                      double prominence_min, double min_period_s);

struct SessionMetrics {
  int repetitions = 0;
  // Joints ranked by summed inter-frame displacement, descending.
  std::vector<std::pair<JointId, double>> most_moving;
  struct Range {
    Eigen::Vector3d extent = Eigen::Vector3d::Zero();  // per-axis max - min
    double max_radial = 0.0;  // max distance from the first-frame position
  };
  std::array<Range, kNumJoints> reachable;
  double moving_time_s = 0.0;
  double moving_fraction = 0.0;
};

// Session-level activity measures. When a state trajectory is supplied the
// repetition signal is the joint angle of the most-moving joint's segment;
// otherwise the joint's dominant position axis is used. Path lengths,
// radial excursions, moving time, and repetitions are invariant under rigid
// transforms of the stream; the axis-aligned extents are frame-dependent.
SessionMetrics compute_session_metrics(const FrameStream& stream,
                                       const std::vector<KinematicState>* states,
                                       const MetricsConfig& config = {});

}  // namespace mocap
