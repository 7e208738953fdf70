#include "mocap/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mocap/errors.hpp"
#include "mocap/synth.hpp"
#include "oracles.hpp"

using mocap::count_repetitions;
using mocap::JointId;
using mocap::MetricsConfig;
using mocap::SessionMetrics;
using mocap::SkeletonTopology;

namespace {

constexpr double kDeg = M_PI / 180.0;

std::pair<std::vector<double>, std::vector<double>> sinusoid(double amplitude,
                                                             double freq_hz,
                                                             double duration_s,
                                                             double rate_hz) {
  std::vector<double> ts, vs;
  const int n = static_cast<int>(duration_s * rate_hz);
  for (int i = 0; i < n; ++i) {
    const double t = i / rate_hz;
    ts.push_back(t);
    vs.push_back(amplitude * std::sin(2.0 * M_PI * freq_hz * t));
  }
  return {ts, vs};
}

// Stream with only WRI_L oscillating +-amp on x at the given frequency.
mocap::FrameStream wrist_oscillation(double amp, double freq_hz, double duration_s) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.oscillations.clear();
  const auto [base_stream, states] = generate_motion(spec, topo);
  const auto base = base_stream.frames.front();

  mocap::FrameStream stream;
  stream.topology = topo;
  stream.nominal_rate = 20.0;
  const int n = static_cast<int>(duration_s * stream.nominal_rate);
  for (int i = 0; i < n; ++i) {
    mocap::Frame f = base;
    f.t = i / stream.nominal_rate;
    f.position(JointId::WRI_L).x() +=
        amp * std::sin(2.0 * M_PI * freq_hz * f.t);
    stream.frames.push_back(std::move(f));
  }
  return stream;
}

mocap::FrameStream rigidly_transformed(const mocap::FrameStream& stream,
                                       const mocap::Quat& rot,
                                       const Eigen::Vector3d& shift) {
  mocap::FrameStream out = stream;
  for (mocap::Frame& f : out.frames) {
    for (int j = 0; j < mocap::kNumJoints; ++j) {
      if (f.pos[j].allFinite()) f.pos[j] = rot.rotate(f.pos[j]) + shift;
    }
  }
  return out;
}

}  // namespace

TEST(CountRepetitions, PureSinusoidFivePeriods) {
  const auto [ts, vs] = sinusoid(30.0 * kDeg, 0.25, 20.0, 20.0);
  EXPECT_EQ(count_repetitions(ts, vs, 10.0 * kDeg, 0.5), 5);
}

TEST(CountRepetitions, NoisySinusoidTwentySeeds) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto [ts, vs] = sinusoid(30.0 * kDeg, 0.25, 20.0, 20.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 2.0 * kDeg);
    for (double& v : vs) v += noise(rng);
    EXPECT_EQ(count_repetitions(ts, vs, 10.0 * kDeg, 0.5), 5) << "seed " << seed;
  }
}

TEST(CountRepetitions, DegenerateSignals) {
  std::vector<double> ts, vs;
  for (int i = 0; i < 100; ++i) {
    ts.push_back(i * 0.05);
    vs.push_back(1.25);
  }
  EXPECT_EQ(count_repetitions(ts, vs, 0.17, 0.5), 0);  // constant
  EXPECT_EQ(count_repetitions({}, {}, 0.17, 0.5), 0);  // empty

  // Shorter than 2 s counts as zero.
  const auto [ts2, vs2] = sinusoid(1.0, 2.0, 1.5, 50.0);
  EXPECT_EQ(count_repetitions(ts2, vs2, 0.17, 0.1), 0);
}

TEST(SessionMetrics, StaticStreamIsAllZero) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.oscillations.clear();
  spec.duration_s = 5.0;
  const auto [stream, states] = generate_motion(spec, topo);

  const SessionMetrics m = compute_session_metrics(stream, nullptr, MetricsConfig{});
  EXPECT_EQ(m.repetitions, 0);
  EXPECT_EQ(m.moving_time_s, 0.0);
  for (const auto& [joint, path] : m.most_moving) {
    EXPECT_EQ(path, 0.0);
  }
  for (const auto& r : m.reachable) {
    EXPECT_EQ(r.extent.norm(), 0.0);
    EXPECT_EQ(r.max_radial, 0.0);
  }
}

TEST(SessionMetrics, WristOscillationScenario) {
  // +-0.2 m on x at 0.5 Hz for 10 s -> 5 repetitions, 0.4 m x-extent.
  const mocap::FrameStream stream = wrist_oscillation(0.2, 0.5, 10.0);
  const SessionMetrics m = compute_session_metrics(stream, nullptr, MetricsConfig{});

  EXPECT_EQ(m.most_moving.front().first, JointId::WRI_L);
  EXPECT_NEAR(m.reachable[joint_index(JointId::WRI_L)].extent.x(), 0.4, 1e-9);
  EXPECT_EQ(m.repetitions, 5);
  // One moving joint out of 20 keeps the mean joint speed below the
  // 0.05 m/s cutoff (peak 0.63 / 20 = 0.031), so no moving time accrues.
  EXPECT_EQ(m.moving_time_s, 0.0);
}

TEST(SessionMetrics, MovingTimeHalfAndHalf) {
  // 5 s static, then 5 s of motion.
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.oscillations.clear();
  const auto [base_stream, states] = generate_motion(spec, topo);
  const auto base = base_stream.frames.front();

  mocap::FrameStream stream;
  stream.topology = topo;
  stream.nominal_rate = 20.0;
  for (int i = 0; i < 200; ++i) {
    mocap::Frame f = base;
    f.t = i / 20.0;
    if (f.t >= 5.0) {
      // All joints translate at 0.2 m/s, well above the 0.05 m/s cutoff.
      const double excursion = 0.2 * (f.t - 5.0);
      for (int j = 0; j < mocap::kNumJoints; ++j) f.pos[j].x() += excursion;
    }
    stream.frames.push_back(std::move(f));
  }

  const SessionMetrics m = compute_session_metrics(stream, nullptr, MetricsConfig{});
  EXPECT_NEAR(m.moving_time_s, 5.0, 0.25);
  EXPECT_NEAR(m.moving_fraction, 0.5, 0.05);
}

TEST(SessionMetrics, RigidTransformInvariance) {
  const mocap::FrameStream stream = wrist_oscillation(0.2, 0.5, 10.0);
  const mocap::Quat rot = mocap::quat_from_axis_angle({1.0, -2.0, 0.5}, 1.9);
  const mocap::FrameStream moved = rigidly_transformed(stream, rot, {2.0, -1.0, 3.0});

  const SessionMetrics a = compute_session_metrics(stream, nullptr, MetricsConfig{});
  const SessionMetrics b = compute_session_metrics(moved, nullptr, MetricsConfig{});

  EXPECT_EQ(a.repetitions, b.repetitions);
  EXPECT_NEAR(a.moving_time_s, b.moving_time_s, 1e-9);
  for (size_t i = 0; i < a.most_moving.size(); ++i) {
    EXPECT_EQ(a.most_moving[i].first, b.most_moving[i].first);
    EXPECT_NEAR(a.most_moving[i].second, b.most_moving[i].second, 1e-9);
  }
  for (int j = 0; j < mocap::kNumJoints; ++j) {
    EXPECT_NEAR(a.reachable[j].max_radial, b.reachable[j].max_radial, 1e-9);
  }
}

TEST(SessionMetrics, TimeShiftInvariance) {
  const mocap::FrameStream stream = wrist_oscillation(0.15, 0.5, 8.0);
  mocap::FrameStream shifted = stream;
  for (mocap::Frame& f : shifted.frames) f.t += 1234.5;

  const SessionMetrics a = compute_session_metrics(stream, nullptr, MetricsConfig{});
  const SessionMetrics b = compute_session_metrics(shifted, nullptr, MetricsConfig{});
  EXPECT_EQ(a.repetitions, b.repetitions);
  EXPECT_NEAR(a.moving_time_s, b.moving_time_s, 1e-12);
}

TEST(SessionMetrics, AngleSignalUsedWhenStatesProvided) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.duration_s = 20.0;  // 5 periods at 0.25 Hz
  // Zero phases: a signal that starts next to a peak gives that peak almost
  // no boundary prominence, which is a property of the prominence rule, not
  // of the angle plumbing under test here.
  for (auto& osc : spec.oscillations) osc.phase_rad = 0.0;
  const auto [stream, states] = generate_motion(spec, topo);

  const SessionMetrics m = compute_session_metrics(stream, &states, MetricsConfig{});
  // The arm oscillation moves HAN_L the most; the highest-variance angle on
  // its root path is the elbow segment's, oscillating at 0.25 Hz.
  EXPECT_EQ(m.repetitions, 5);
}

TEST(SessionMetrics, EmptyStreamRejected) {
  mocap::FrameStream stream;
  EXPECT_THROW(compute_session_metrics(stream, nullptr, MetricsConfig{}),
               mocap::ValidationError);
}
