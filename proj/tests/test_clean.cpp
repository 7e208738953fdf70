#include "mocap/clean.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "mocap/errors.hpp"
#include "mocap/synth.hpp"
#include "oracles.hpp"

using mocap::CleanConfig;
using mocap::CorruptionSpec;
using mocap::SkeletonTopology;

namespace {

struct Scenario {
  mocap::FrameStream clean;
  mocap::FrameStream corrupted;
  mocap::CorruptionLabels labels;
};

Scenario make_scenario(double outlier_rate, double lost_rate, std::uint64_t seed) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const auto [stream, states] = generate_motion(mocap::default_motion_spec(topo), topo);
  CorruptionSpec spec = mocap::default_corruption_spec();
  spec.outlier_rate = outlier_rate;
  spec.lost_rate = lost_rate;
  spec.seed = seed;
  auto [corrupted, labels] = corrupt_stream(stream, spec);
  return {stream, std::move(corrupted), std::move(labels)};
}

}  // namespace

TEST(CleanStream, CleanInputFlagsFewSamples) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario sc = make_scenario(0.0, 0.0, seed);
    const auto [cleaned, report] = clean_stream(sc.corrupted, CleanConfig{});

    int flagged = 0, total = 0;
    for (const auto& jr : report.joints) {
      flagged += jr.n_flagged;
      total += jr.n_total;
    }
    EXPECT_LT(flagged, 0.02 * total) << "seed " << seed;

    // Positions differ from the input only at flagged samples.
    for (int k = 0; k < sc.corrupted.size(); ++k) {
      for (int j = 0; j < mocap::kNumJoints; ++j) {
        if (!report.joints[j].flagged[k]) {
          EXPECT_EQ(cleaned.frames[k].pos[j], sc.corrupted.frames[k].pos[j]);
        }
      }
    }
  }
}

TEST(CleanStream, DetectsInjectedTeleports) {
  double worst_precision = 1.0, worst_recall = 1.0;
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const Scenario sc = make_scenario(0.10, 0.0, seed);
    const auto [cleaned, report] = clean_stream(sc.corrupted, CleanConfig{});

    int tp = 0, fp = 0, fn = 0;
    for (int k = 0; k < sc.corrupted.size(); ++k) {
      for (int j = 0; j < mocap::kNumJoints; ++j) {
        const bool truth = sc.labels.labels[k][j] == mocap::SampleLabel::Outlier;
        const bool flag = report.joints[j].flagged[k];
        tp += (truth && flag) ? 1 : 0;
        fp += (!truth && flag) ? 1 : 0;
        fn += (truth && !flag) ? 1 : 0;
      }
    }
    const double precision = tp / std::max(1.0, double(tp + fp));
    const double recall = tp / std::max(1.0, double(tp + fn));
    worst_precision = std::min(worst_precision, precision);
    worst_recall = std::min(worst_recall, recall);
  }
  EXPECT_GE(worst_precision, 0.9);
  EXPECT_GE(worst_recall, 0.9);
}

TEST(CleanStream, ConstantStreamPassesThrough) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.oscillations.clear();
  spec.duration_s = 2.0;
  const auto [stream, states] = generate_motion(spec, topo);

  const auto [cleaned, report] = clean_stream(stream, CleanConfig{});
  for (int k = 0; k < stream.size(); ++k) {
    for (int j = 0; j < mocap::kNumJoints; ++j) {
      EXPECT_EQ(cleaned.frames[k].pos[j], stream.frames[k].pos[j]);
    }
  }
  for (const auto& jr : report.joints) {
    EXPECT_EQ(jr.n_flagged, 0);
    EXPECT_FALSE(jr.params.has_value());
  }
}

TEST(CleanStream, SecondPassIsNearlyIdle) {
  const Scenario sc = make_scenario(0.10, 0.0, 5);
  const auto [cleaned, report1] = clean_stream(sc.corrupted, CleanConfig{});
  const auto [cleaned2, report2] = clean_stream(cleaned, CleanConfig{});

  int flagged = 0, total = 0;
  for (const auto& jr : report2.joints) {
    flagged += jr.n_flagged;
    total += jr.n_total;
  }
  EXPECT_LT(flagged, 0.005 * total);
}

TEST(CleanStream, LostSamplesInterpolated) {
  const Scenario sc = make_scenario(0.0, 0.05, 9);
  const auto [cleaned, report] = clean_stream(sc.corrupted, CleanConfig{});

  cleaned.validate();
  for (int k = 0; k < cleaned.size(); ++k) {
    for (int j = 0; j < mocap::kNumJoints; ++j) {
      if (sc.labels.labels[k][j] == mocap::SampleLabel::Lost) {
        EXPECT_TRUE(cleaned.frames[k].pos[j].allFinite());
        EXPECT_EQ(cleaned.frames[k].conf[j], mocap::Confidence::Inferred);
        // Interpolation should land near the uncorrupted truth.
        EXPECT_LT((cleaned.frames[k].pos[j] - sc.clean.frames[k].pos[j]).norm(), 0.25);
      }
    }
  }
}

TEST(CleanStream, SystemicFailureLeavesJointUntouched) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto [stream, states] = generate_motion(mocap::default_motion_spec(topo), topo);

  // Push one joint into teleport chaos on most frames.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jump(-1.0, 1.0);
  const int j = joint_index(mocap::JointId::HAN_R);
  for (int k = 0; k < stream.size(); ++k) {
    if (k % 3 != 0) {
      stream.frames[k].pos[j] += Eigen::Vector3d(jump(rng), jump(rng), jump(rng));
    }
  }

  const auto [cleaned, report] = clean_stream(stream, CleanConfig{});
  const auto& jr = report.joints[j];
  if (jr.n_flagged > 0.5 * stream.size()) {
    EXPECT_FALSE(jr.warning.empty());
    for (int k = 0; k < stream.size(); ++k) {
      EXPECT_EQ(cleaned.frames[k].pos[j], stream.frames[k].pos[j]);
    }
  } else {
    GTEST_FAIL() << "scenario did not trigger the systemic-failure path: " << jr.n_flagged;
  }
}

TEST(CleanStream, TooShortStreamRejected) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.duration_s = 0.5;  // 10 frames < 2 * window
  const auto [stream, states] = generate_motion(spec, topo);
  EXPECT_THROW(clean_stream(stream, CleanConfig{}), mocap::ValidationError);
}
