#include "mocap/kinematics.hpp"

#include <cmath>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

// Shared FK core: accumulates global rotations down the tree and places each
// child at parent + global * (0, 0, length). Quaternions are normalized on
// the fly so the same sweep serves sigma-point vectors, whose blocks are not
// unit quaternions.
template <typename LengthFn, typename QuatFn>
std::array<Eigen::Vector3d, kNumJoints> fk_sweep(const Eigen::Vector3d& root,
                                                 LengthFn&& length_of,
                                                 QuatFn&& quat_of,
                                                 const SkeletonTopology& topo) {
  std::array<Eigen::Vector3d, kNumJoints> positions;
  std::array<Quat, kNumJoints> global;
  positions[joint_index(JointId::ROOT)] = root;
  global[joint_index(JointId::ROOT)] = Quat::identity();

  const auto& segments = topo.segments();
  for (size_t s = 0; s < segments.size(); ++s) {
    const Segment& seg = segments[s];
    const int c = joint_index(seg.child);
    const int p = joint_index(seg.parent);
    const Quat local = quat_of(static_cast<int>(s)).normalized();
    const Quat g = global[p] * local;
    global[c] = g;
    const double len = length_of(static_cast<int>(s));
    positions[c] = positions[p] + g.rotate(Eigen::Vector3d(0.0, 0.0, len));
  }
  return positions;
}

}  // namespace

void KinematicState::validate(const SkeletonTopology& topo) const {
  const size_t n = static_cast<size_t>(topo.num_segments());
  if (lengths.size() != n || quats.size() != n) {
    throw ValidationError("kinematic state: missing segment parameters (have " +
                          std::to_string(lengths.size()) + " lengths, " +
                          std::to_string(quats.size()) + " quaternions, need " +
                          std::to_string(n) + ")");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
      throw ValidationError("kinematic state: non-positive length for segment " +
                            topo.segment(static_cast<int>(i)).name);
    }
    if (!quats[i].is_finite() || std::abs(quats[i].norm() - 1.0) > 1e-9) {
      throw ValidationError("kinematic state: non-normalized quaternion for segment " +
                            topo.segment(static_cast<int>(i)).name);
    }
  }
  if (!root_pos.allFinite()) {
    throw ValidationError("kinematic state: non-finite root position");
  }
}

StateLayout StateLayout::full(const SkeletonTopology& topo) {
  return {topo.num_segments(), false};
}

StateLayout StateLayout::with_frozen_lengths(const SkeletonTopology& topo) {
  return {topo.num_segments(), true};
}

int StateLayout::length_offset(int seg) const {
  if (reduced) {
    throw ValidationError("state layout: no length block in reduced layout");
  }
  return 3 + seg;
}

int StateLayout::quat_offset(int seg) const {
  return 3 + (reduced ? 0 : num_segments) + 4 * seg;
}

Eigen::VectorXd StateLayout::flatten(const KinematicState& state) const {
  Eigen::VectorXd v(dim());
  v.segment<3>(0) = state.root_pos;
  for (int s = 0; s < num_segments; ++s) {
    if (!reduced) v[length_offset(s)] = state.lengths[s];
    const Quat& q = state.quats[s];
    v[quat_offset(s) + 0] = q.w;
    v[quat_offset(s) + 1] = q.x;
    v[quat_offset(s) + 2] = q.y;
    v[quat_offset(s) + 3] = q.z;
  }
  return v;
}

KinematicState StateLayout::unflatten(const Eigen::VectorXd& v,
                                      const std::vector<double>& frozen_lengths) const {
  if (v.size() != dim()) {
    throw ValidationError("state layout: vector dimension " + std::to_string(v.size()) +
                          " does not match layout dimension " + std::to_string(dim()));
  }
  KinematicState state;
  state.root_pos = v.segment<3>(0);
  state.lengths.resize(num_segments);
  state.quats.resize(num_segments);
  for (int s = 0; s < num_segments; ++s) {
    state.lengths[s] = reduced ? frozen_lengths.at(s) : v[length_offset(s)];
    const int q = quat_offset(s);
    state.quats[s] = Quat{v[q], v[q + 1], v[q + 2], v[q + 3]}.normalized().canonical();
  }
  return state;
}

std::array<Eigen::Vector3d, kNumJoints> forward_kinematics(
    const KinematicState& state, const SkeletonTopology& topo) {
  state.validate(topo);
  return fk_sweep(
      state.root_pos, [&](int s) { return state.lengths[s]; },
      [&](int s) -> const Quat& { return state.quats[s]; }, topo);
}

std::array<Eigen::Vector3d, kNumJoints> forward_kinematics_raw(
    const Eigen::VectorXd& v, const StateLayout& layout,
    const std::vector<double>& frozen_lengths, const SkeletonTopology& topo) {
  const Eigen::Vector3d root = v.segment<3>(0);
  auto length_of = [&](int s) {
    return layout.reduced ? frozen_lengths[s] : v[layout.length_offset(s)];
  };
  auto quat_of = [&](int s) {
    const int q = layout.quat_offset(s);
    return Quat{v[q], v[q + 1], v[q + 2], v[q + 3]};
  };
  return fk_sweep(root, length_of, quat_of, topo);
}

KinematicState init_state_from_frame(const Frame& frame, const SkeletonTopology& topo) {
  for (int j = 0; j < kNumJoints; ++j) {
    if (frame.conf[j] == Confidence::Lost || !frame.pos[j].allFinite()) {
      throw ValidationError(std::string("state initialization: joint ") +
                            joint_name(static_cast<JointId>(j)) +
                            " is Lost or non-finite in the initialization frame");
    }
  }

  KinematicState state;
  state.root_pos = frame.position(JointId::ROOT);
  const int n = topo.num_segments();
  state.lengths.resize(n);
  state.quats.resize(n);

  std::array<Quat, kNumJoints> global;
  global[joint_index(JointId::ROOT)] = Quat::identity();

  for (int s = 0; s < n; ++s) {
    const Segment& seg = topo.segment(s);
    const Eigen::Vector3d delta = frame.position(seg.child) - frame.position(seg.parent);
    const double len = delta.norm();
    if (!(len > 1e-9)) {
      throw ValidationError("state initialization: degenerate frame, segment " +
                            seg.name + " has zero observed length");
    }
    state.lengths[s] = len;
    const Quat& parent_global = global[joint_index(seg.parent)];
    // Observed direction in the parent's frame; local rotation is the
    // shortest arc from the +z rest direction (zero twist).
    const Eigen::Vector3d dir_parent = parent_global.conjugate().rotate(delta / len);
    const Quat local = shortest_arc(Eigen::Vector3d::UnitZ(), dir_parent);
    state.quats[s] = local;
    global[joint_index(seg.child)] = parent_global * local;
  }
  return state;
}

JointAngles extract_joint_angles(const KinematicState& state) {
  JointAngles out;
  out.angles.reserve(state.quats.size());
  out.quats = state.quats;
  for (const Quat& q : state.quats) {
    out.angles.push_back(q.angle());
  }
  return out;
}

}  // namespace mocap
