#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/mixture.hpp"

namespace mocap {

struct EvalConfig {
  bool align = true;
  std::vector<JointId> align_joints = {JointId::ROOT,  JointId::SPINE, JointId::NECK,
                                       JointId::SHO_L, JointId::SHO_R, JointId::HIP_L,
                                       JointId::HIP_R};
  int align_frames = 50;
  bool exclude_outliers = false;

  void validate() const;
};

// Per-joint linear resampling onto the given timestamps. Targets must lie
// within the source span extended by one nominal period on each side (ends
// clamp to the boundary frames). A joint interpolates Lost whenever either
// bracketing sample is Lost.
FrameStream resample_stream(const FrameStream& stream, std::span<const double> target_ts);

// Least-squares rigid transform (rotation + translation, no scale) taking
// source points onto reference points, solved by SVD of the centered
// cross-covariance with reflection correction. Correspondences pair the
// selected joints at the selected frame indices of both streams; non-finite
// samples are skipped. Throws ValidationError when the correspondences are
// collinear or fewer than 3.
Eigen::Matrix4d align_rigid(const FrameStream& source, const FrameStream& reference,
                            std::span<const JointId> joints, std::span<const int> frames);

struct JointOffsetStat {
  JointId joint;
  double mean_mm = 0.0;
  double sd_mm = 0.0;
  int n = 0;
};

struct SegmentLengthStat {
  std::string segment;
  double mean_mm = 0.0;
  double sd_mm = 0.0;
  int n = 0;
};

struct AccuracyReport {
  std::vector<JointOffsetStat> joint_offsets;          // Euclidean distance, mm
  std::vector<SegmentLengthStat> segment_lengths;      // test - reference, mm
  std::optional<std::vector<JointOffsetStat>> joint_offsets_no_outliers;
  Eigen::Matrix4d alignment = Eigen::Matrix4d::Identity();
  bool aligned = false;
  std::vector<std::string> notices;  // omitted joints, degenerate fits
};

// Two-stream accuracy statistics: the reference is resampled onto the test
// timestamps, optionally aligned rigidly onto the test frame, then per-joint
// position offsets and per-evaluation-segment length differences are
// summarized as mean/SD in millimeters. With exclude_outliers, a mixture fit
// on each joint's offsets removes the uniform-tail samples and the
// statistics are reported again.
AccuracyReport evaluate_accuracy(const FrameStream& test, const FrameStream& reference,
                                 const EvalConfig& config = {});

}  // namespace mocap
