#include "mocap/eval.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

void EvalConfig::validate() const {
  if (align && (align_joints.empty() || align_frames < 1)) {
    throw ValidationError("eval config: alignment requires joints and at least one frame");
  }
}

FrameStream resample_stream(const FrameStream& stream, std::span<const double> target_ts) {
  stream.validate();
  if (stream.frames.empty()) {
    throw ValidationError("resample: empty source stream");
  }
  const double t0 = stream.frames.front().t;
  const double t1 = stream.frames.back().t;
  const double margin = 1.0 / stream.nominal_rate;

  std::string offending;
  for (double t : target_ts) {
    if (t < t0 - margin || t > t1 + margin) {
      offending += (offending.empty() ? "" : ", ") + std::to_string(t);
    }
  }
  if (!offending.empty()) {
    throw ValidationError("resample: target timestamps outside source span: " + offending);
  }

  FrameStream out;
  out.topology = stream.topology;
  out.nominal_rate = stream.nominal_rate;
  out.frames.reserve(target_ts.size());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double t : target_ts) {
    // First source frame at or after the target (targets may be unsorted).
    const size_t hi = std::lower_bound(stream.frames.begin(), stream.frames.end(), t,
                                       [](const Frame& f, double v) { return f.t < v; }) -
                      stream.frames.begin();

    Frame frame;
    frame.t = t;
    if (hi == 0 || hi == stream.frames.size()) {
      // Within the margin beyond the ends: clamp to the boundary frame.
      frame.pos = stream.frames[hi == 0 ? 0 : hi - 1].pos;
      frame.conf = stream.frames[hi == 0 ? 0 : hi - 1].conf;
    } else if (stream.frames[hi].t == t) {
      frame.pos = stream.frames[hi].pos;
      frame.conf = stream.frames[hi].conf;
    } else {
      const Frame& a = stream.frames[hi - 1];
      const Frame& b = stream.frames[hi];
      const double w = (t - a.t) / (b.t - a.t);
      for (int j = 0; j < kNumJoints; ++j) {
        if (a.conf[j] == Confidence::Lost || b.conf[j] == Confidence::Lost) {
          frame.pos[j].setConstant(nan);
          frame.conf[j] = Confidence::Lost;
        } else {
          frame.pos[j] = (1.0 - w) * a.pos[j] + w * b.pos[j];
          frame.conf[j] = std::min(a.conf[j], b.conf[j]);
        }
      }
    }
    out.frames.push_back(std::move(frame));
  }
  if (out.frames.size() >= 2) {
    const double span = out.frames.back().t - out.frames.front().t;
    if (span > 0.0) out.nominal_rate = (out.frames.size() - 1) / span;
  }
  return out;
}

Eigen::Matrix4d align_rigid(const FrameStream& source, const FrameStream& reference,
                            std::span<const JointId> joints, std::span<const int> frames) {
  std::vector<Eigen::Vector3d> src, ref;
  for (int f : frames) {
    if (f < 0 || f >= source.size() || f >= reference.size()) continue;
    for (JointId j : joints) {
      const Eigen::Vector3d& s = source.frames[f].position(j);
      const Eigen::Vector3d& r = reference.frames[f].position(j);
      if (!s.allFinite() || !r.allFinite()) continue;
      src.push_back(s);
      ref.push_back(r);
    }
  }
  if (src.size() < 3) {
    throw ValidationError("align_rigid: need at least 3 finite correspondences, got " +
                          std::to_string(src.size()));
  }

  Eigen::Vector3d src_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d ref_mean = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    src_mean += src[i];
    ref_mean += ref[i];
  }
  src_mean /= static_cast<double>(src.size());
  ref_mean /= static_cast<double>(ref.size());

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    cross += (src[i] - src_mean) * (ref[i] - ref_mean).transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  // Collinear correspondences leave the rotation about the line free.
  if (sv[1] <= 1e-12 * std::max(sv[0], 1e-300)) {
    throw ValidationError("align_rigid: degenerate geometry, correspondences are collinear");
  }

  Eigen::Matrix3d rot = svd.matrixV() * svd.matrixU().transpose();
  if (rot.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    rot = svd.matrixV() * flip * svd.matrixU().transpose();
  }

  Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
  transform.block<3, 3>(0, 0) = rot;
  transform.block<3, 1>(0, 3) = ref_mean - rot * src_mean;
  return transform;
}

namespace {

// Welford's running moments; the textbook sum-of-squares form cancels
// catastrophically when sd << mean.
struct RunningStat {
  double mean_ = 0.0;
  double m2_ = 0.0;
  int n = 0;

  void add(double v) {
    ++n;
    const double delta = v - mean_;
    mean_ += delta / n;
    m2_ += delta * (v - mean_);
  }
  double mean() const { return n > 0 ? mean_ : 0.0; }
  double sd() const { return n > 0 ? std::sqrt(std::max(0.0, m2_ / n)) : 0.0; }
};

}  // namespace

AccuracyReport evaluate_accuracy(const FrameStream& test, const FrameStream& reference,
                                 const EvalConfig& config) {
  config.validate();
  test.validate();
  reference.validate();
  if (test.frames.empty() || reference.frames.empty()) {
    throw ValidationError("evaluate_accuracy: empty stream");
  }
  if (!(test.topology == reference.topology)) {
    throw ValidationError("evaluate_accuracy: streams use different topologies");
  }

  // Overlapping test timestamps; the reference is resampled onto them.
  const double lo = reference.frames.front().t;
  const double hi = reference.frames.back().t;
  std::vector<double> ts;
  std::vector<int> test_index;
  for (int i = 0; i < test.size(); ++i) {
    const double t = test.frames[i].t;
    if (t >= lo && t <= hi) {
      ts.push_back(t);
      test_index.push_back(i);
    }
  }
  if (ts.empty()) {
    throw ValidationError("evaluate_accuracy: streams have no temporal overlap");
  }

  FrameStream ref_rs = resample_stream(reference, ts);

  FrameStream test_overlap;
  test_overlap.topology = test.topology;
  test_overlap.nominal_rate = test.nominal_rate;
  for (int i : test_index) test_overlap.frames.push_back(test.frames[i]);

  AccuracyReport report;
  if (config.align) {
    std::vector<int> frames;
    const int limit = std::min<int>(config.align_frames, test_overlap.size());
    for (int i = 0; i < limit; ++i) frames.push_back(i);
    report.alignment = align_rigid(test_overlap, ref_rs, config.align_joints, frames);
    report.aligned = true;
    // Already-aligned streams solve to the identity up to SVD rounding;
    // snap so self-comparison reports exact zeros.
    if ((report.alignment - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12) {
      report.alignment = Eigen::Matrix4d::Identity();
    }
    const Eigen::Matrix3d rot = report.alignment.block<3, 3>(0, 0);
    const Eigen::Vector3d trans = report.alignment.block<3, 1>(0, 3);
    for (Frame& f : test_overlap.frames) {
      for (int j = 0; j < kNumJoints; ++j) {
        if (f.pos[j].allFinite()) f.pos[j] = rot * f.pos[j] + trans;
      }
    }
  }

  const int n = test_overlap.size();

  // Per-joint position offsets.
  std::vector<std::vector<double>> offsets(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    for (int t = 0; t < n; ++t) {
      const Eigen::Vector3d& a = test_overlap.frames[t].pos[j];
      const Eigen::Vector3d& b = ref_rs.frames[t].pos[j];
      if (!a.allFinite() || !b.allFinite()) continue;
      offsets[j].push_back((a - b).norm() * 1000.0);
    }
    if (offsets[j].empty()) {
      report.notices.push_back(std::string(joint_name(static_cast<JointId>(j))) +
                               ": no overlapping finite samples; omitted");
      continue;
    }
    RunningStat stat;
    for (double v : offsets[j]) stat.add(v);
    report.joint_offsets.push_back(
        {static_cast<JointId>(j), stat.mean(), stat.sd(), stat.n});
  }

  // Per-evaluation-segment length differences.
  for (int s : test.topology.evaluation_segments()) {
    const Segment& seg = test.topology.segment(s);
    RunningStat stat;
    for (int t = 0; t < n; ++t) {
      const Eigen::Vector3d& tc = test_overlap.frames[t].position(seg.child);
      const Eigen::Vector3d& tp = test_overlap.frames[t].position(seg.parent);
      const Eigen::Vector3d& rc = ref_rs.frames[t].position(seg.child);
      const Eigen::Vector3d& rp = ref_rs.frames[t].position(seg.parent);
      if (!tc.allFinite() || !tp.allFinite() || !rc.allFinite() || !rp.allFinite()) continue;
      stat.add(((tc - tp).norm() - (rc - rp).norm()) * 1000.0);
    }
    report.segment_lengths.push_back({seg.name, stat.mean(), stat.sd(), stat.n});
  }

  if (config.exclude_outliers) {
    std::vector<JointOffsetStat> cleaned;
    for (const JointOffsetStat& js : report.joint_offsets) {
      const auto& samples = offsets[joint_index(js.joint)];
      RunningStat stat;
      bool fitted = false;
      if (static_cast<int>(samples.size()) >= EmConfig{}.min_samples) {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        if (*mx > *mn) {
          const MixtureFit fit = fit_mixture_em(samples);
          const OutlierReport rep = classify_outliers(samples, fit.params);
          for (size_t i = 0; i < samples.size(); ++i) {
            if (!rep.outlier[i]) stat.add(samples[i]);
          }
          fitted = true;
        }
      }
      if (!fitted) {
        report.notices.push_back(std::string(joint_name(js.joint)) +
                                 ": offset mixture fit degenerate; outliers not excluded");
        for (double v : samples) stat.add(v);
      }
      cleaned.push_back({js.joint, stat.mean(), stat.sd(), stat.n});
    }
    report.joint_offsets_no_outliers = std::move(cleaned);
  }
  return report;
}

}  // namespace mocap
