#include "mocap/synth.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

void MotionSpec::validate(const SkeletonTopology& topo) const {
  base.validate(topo);
  if (!(rate_hz > 0.0) || !(duration_s > 0.0)) {
    throw ValidationError("motion spec: duration and rate must be positive");
  }
  for (const Oscillation& osc : oscillations) {
    if (osc.segment < 0 || osc.segment >= topo.num_segments()) {
      throw ValidationError("motion spec: oscillation references unknown segment");
    }
    if (!(osc.amplitude_rad >= 0.0) || osc.amplitude_rad > M_PI) {
      throw ValidationError("motion spec: oscillation amplitude must be in [0, pi]");
    }
    if (!(osc.freq_hz >= 0.0) || !std::isfinite(osc.phase_rad)) {
      throw ValidationError("motion spec: oscillation frequency must be >= 0");
    }
    if (!(osc.axis.norm() > 1e-9)) {
      throw ValidationError("motion spec: oscillation axis must be nonzero");
    }
  }
  if (root_mode == RootMode::Sinusoid) {
    if (!(root_amplitude_m >= 0.0) || !(root_freq_hz >= 0.0) ||
        !(root_axis.norm() > 1e-9)) {
      throw ValidationError("motion spec: invalid root sinusoid parameters");
    }
  }
}

void CorruptionSpec::validate() const {
  if (!(gaussian_sd >= 0.0)) {
    throw ValidationError("corruption spec: gaussian_sd must be >= 0");
  }
  if (!(outlier_rate >= 0.0) || outlier_rate >= 1.0 || !(lost_rate >= 0.0) ||
      lost_rate >= 1.0) {
    throw ValidationError("corruption spec: rates must be in [0, 1)");
  }
  if (!(outlier_halfwidth >= 0.0)) {
    throw ValidationError("corruption spec: outlier_halfwidth must be >= 0");
  }
}

std::pair<FrameStream, std::vector<KinematicState>> generate_motion(
    const MotionSpec& spec, const SkeletonTopology& topo) {
  spec.validate(topo);

  const int n_frames = static_cast<int>(std::lround(spec.duration_s * spec.rate_hz));
  if (n_frames < 1) {
    throw ValidationError("motion spec: duration too short for one frame");
  }

  FrameStream stream;
  stream.topology = topo;
  stream.nominal_rate = spec.rate_hz;
  stream.frames.reserve(n_frames);
  std::vector<KinematicState> states;
  states.reserve(n_frames);

  for (int k = 0; k < n_frames; ++k) {
    const double t = k / spec.rate_hz;
    KinematicState state = spec.base;
    for (const Oscillation& osc : spec.oscillations) {
      const double angle =
          osc.amplitude_rad * std::sin(kTwoPi * osc.freq_hz * t + osc.phase_rad);
      state.quats[osc.segment] =
          (state.quats[osc.segment] * quat_from_axis_angle(osc.axis, angle)).canonical();
    }
    switch (spec.root_mode) {
      case RootMode::Constant:
        break;
      case RootMode::Linear:
        state.root_pos += spec.root_velocity * t;
        break;
      case RootMode::Sinusoid:
        state.root_pos += spec.root_axis.normalized() * spec.root_amplitude_m *
                          std::sin(kTwoPi * spec.root_freq_hz * t + spec.root_phase_rad);
        break;
    }

    Frame frame;
    frame.t = t;
    const auto positions = forward_kinematics(state, topo);
    for (int j = 0; j < kNumJoints; ++j) {
      frame.pos[j] = positions[j];
      frame.conf[j] = Confidence::Tracked;
    }
    stream.frames.push_back(std::move(frame));
    states.push_back(std::move(state));
  }
  return {std::move(stream), std::move(states)};
}

std::pair<FrameStream, CorruptionLabels> corrupt_stream(const FrameStream& stream,
                                                        const CorruptionSpec& spec) {
  spec.validate();

  FrameStream out = stream;
  CorruptionLabels labels;
  labels.labels.resize(stream.frames.size());

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> teleport(-spec.outlier_halfwidth,
                                                  spec.outlier_halfwidth);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (size_t f = 0; f < out.frames.size(); ++f) {
    Frame& frame = out.frames[f];
    for (int j = 0; j < kNumJoints; ++j) {
      SampleLabel label = SampleLabel::Clean;
      Eigen::Vector3d p = stream.frames[f].pos[j];
      if (spec.gaussian_sd > 0.0) {
        p += spec.gaussian_sd * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
      }
      if (spec.outlier_rate > 0.0 && unit(rng) < spec.outlier_rate) {
        label = SampleLabel::Outlier;
        p = stream.frames[f].pos[j] +
            Eigen::Vector3d(teleport(rng), teleport(rng), teleport(rng));
      }
      if (spec.lost_rate > 0.0 && unit(rng) < spec.lost_rate) {
        label = SampleLabel::Lost;
        p.setConstant(nan);
        frame.conf[j] = Confidence::Lost;
      }
      frame.pos[j] = p;
      labels.labels[f][j] = label;
    }
  }
  return {std::move(out), std::move(labels)};
}

KinematicState default_base_state(const SkeletonTopology& topo) {
  KinematicState state;
  state.root_pos = Eigen::Vector3d(0.0, 0.0, 1.0);
  state.lengths.assign(topo.num_segments(), 0.1);
  state.quats.assign(topo.num_segments(), Quat::identity());

  auto set = [&](const char* segment, double length, const Quat& q) {
    const int s = topo.segment_by_name(segment);
    if (s < 0) return;  // custom topology without this edge
    state.lengths[s] = length;
    state.quats[s] = q.canonical();
  };
  const auto rot_x = [](double a) { return quat_from_axis_angle(Eigen::Vector3d::UnitX(), a); };
  const auto rot_y = [](double a) { return quat_from_axis_angle(Eigen::Vector3d::UnitY(), a); };

  // Torso column straight up.
  set("SPINE", 0.25, Quat::identity());
  set("NECK", 0.20, Quat::identity());
  set("HEAD", 0.15, Quat::identity());
  // Shoulders splay outward, arms hang bent at shoulder and elbow. All local
  // rotations stay well under 180 degrees so the quaternion scalar parts keep
  // a comfortable margin from the sign boundary.
  set("SHO_L", 0.20, rot_y(1.3));
  set("SHO_R", 0.20, rot_y(-1.3));
  set("ARM_UP_L", 0.28, rot_x(0.9));
  set("ARM_UP_R", 0.28, rot_x(0.9));
  set("ARM_LO_L", 0.25, rot_x(0.9));
  set("ARM_LO_R", 0.25, rot_x(0.9));
  set("HAND_L", 0.18, Quat::identity());
  set("HAND_R", 0.18, Quat::identity());
  // Pelvis edges point outward-down; thighs continue toward vertical.
  set("PELVIC_L", 0.12, rot_y(1.9));
  set("PELVIC_R", 0.12, rot_y(-1.9));
  set("LEG_UP_L", 0.40, rot_y(1.24));
  set("LEG_UP_R", 0.40, rot_y(-1.24));
  set("LEG_LO_L", 0.38, rot_x(0.08));
  set("LEG_LO_R", 0.38, rot_x(0.08));
  set("FOOT_L", 0.20, rot_x(-1.2));
  set("FOOT_R", 0.20, rot_x(-1.2));
  return state;
}

MotionSpec default_motion_spec(const SkeletonTopology& topo) {
  MotionSpec spec;
  spec.base = default_base_state(topo);
  spec.duration_s = 15.0;
  spec.rate_hz = 20.0;

  const int shoulder = topo.segment_by_name("ARM_UP_L");
  const int elbow = topo.segment_by_name("ARM_LO_L");
  if (shoulder >= 0) {
    spec.oscillations.push_back(
        {shoulder, Eigen::Vector3d::UnitX(), 0.18, 0.25, 0.0});
  }
  if (elbow >= 0) {
    spec.oscillations.push_back(
        {elbow, Eigen::Vector3d::UnitX(), 0.22, 0.25, M_PI / 3.0});
  }
  return spec;
}

CorruptionSpec default_corruption_spec() {
  CorruptionSpec spec;
  spec.gaussian_sd = 0.025;
  spec.outlier_rate = 0.05;
  spec.outlier_halfwidth = 0.5;
  spec.lost_rate = 0.0;
  spec.seed = 1;
  return spec;
}

}  // namespace mocap
