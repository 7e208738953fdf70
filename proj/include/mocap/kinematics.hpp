#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/quat.hpp"
#include "mocap/skeleton.hpp"

namespace mocap {

// Full kinematic parameter set: root position, one length and one relative
// rotation per segment. Each quaternion rotates within its parent segment's
// frame; the rest direction is +z, i.e. a segment with identity rotation
// extends along its parent's +z axis.
struct KinematicState {
  Eigen::Vector3d root_pos = Eigen::Vector3d::Zero();
  std::vector<double> lengths;  // per segment, topology order, meters
  std::vector<Quat> quats;      // per segment, topology order

  // Throws ValidationError on size mismatch, non-positive lengths, or
  // non-normalized quaternions.
  void validate(const SkeletonTopology& topo) const;
};

// Fixed flattened layout shared by the filter and the parameter CSV:
//   [root_pos(3) | lengths(S) | quats(4*S, w x y z)]   full, dim 3+5*S
//   [root_pos(3) | quats(4*S)]                         reduced (lengths frozen)
// S = 19 for the default topology: dim 98 full, 79 reduced.
struct StateLayout {
  int num_segments;
  bool reduced;

  static StateLayout full(const SkeletonTopology& topo);
  static StateLayout with_frozen_lengths(const SkeletonTopology& topo);

  int dim() const { return 3 + (reduced ? 0 : num_segments) + 4 * num_segments; }
  int root_offset() const { return 0; }
  int length_offset(int seg) const;  // full layout only
  int quat_offset(int seg) const;

  Eigen::VectorXd flatten(const KinematicState& state) const;
  // Inverse of flatten. Quaternion blocks are normalized and canonicalized;
  // the reduced layout takes lengths from `frozen_lengths`.
  KinematicState unflatten(const Eigen::VectorXd& v,
                           const std::vector<double>& frozen_lengths = {}) const;
};

// Joint positions from kinematic parameters, accumulating rotations down the
// tree: global(child) = global(parent) * local(child), child position =
// parent position + global(child) applied to (0, 0, length).
std::array<Eigen::Vector3d, kNumJoints> forward_kinematics(
    const KinematicState& state, const SkeletonTopology& topo);

// Same sweep over a flattened vector. Quaternion blocks are scaled to unit
// norm for rotation application but not canonicalized, so sigma-point
// vectors pass through unchanged in distribution. The reduced layout takes
// lengths from `frozen_lengths`.
std::array<Eigen::Vector3d, kNumJoints> forward_kinematics_raw(
    const Eigen::VectorXd& v, const StateLayout& layout,
    const std::vector<double>& frozen_lengths, const SkeletonTopology& topo);

// Single-frame inverse: root from the observed ROOT position, lengths from
// observed inter-joint distances, rotations via shortest_arc against the +z
// rest direction expressed in the parent's frame (computed root-outward).
// Reproduces the frame's positions under forward_kinematics; the twist
// about each segment axis is left at zero.
// Throws ValidationError for Lost joints (naming the joint) and zero-length
// observed segments.
KinematicState init_state_from_frame(const Frame& frame, const SkeletonTopology& topo);

// Per-segment rotation angle relative to the parent segment, radians in
// [0, pi], plus the full relative quaternion.
struct JointAngles {
  std::vector<double> angles;  // per segment, topology order
  std::vector<Quat> quats;
};

JointAngles extract_joint_angles(const KinematicState& state);

}  // namespace mocap
