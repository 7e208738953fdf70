#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "mocap/skeleton.hpp"

namespace mocap {

// Sensor tracking state per joint. Lost joints carry NaN positions.
enum class Confidence : int {
  Lost = 0,
  Inferred = 1,
  Tracked = 2,
};

// One time-stamped sample of all joint positions, meters.
struct Frame {
  double t = 0.0;
  std::array<Eigen::Vector3d, kNumJoints> pos;
  std::array<Confidence, kNumJoints> conf;

  Frame();

  const Eigen::Vector3d& position(JointId id) const { return pos[joint_index(id)]; }
  Eigen::Vector3d& position(JointId id) { return pos[joint_index(id)]; }
  Confidence confidence(JointId id) const { return conf[joint_index(id)]; }
};

// Ordered frame sequence over one topology. Timestamps strictly increasing.
struct FrameStream {
  SkeletonTopology topology;
  std::vector<Frame> frames;
  double nominal_rate = 20.0;  // Hz

  int size() const { return static_cast<int>(frames.size()); }
  double duration() const;

  // Checks strictly increasing timestamps and the confidence/position
  // consistency rule (Lost <=> NaN). Throws ValidationError.
  void validate() const;
};

}  // namespace mocap
