#include "mocap/ukf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

void UkfConfig::validate() const {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ValidationError("ukf config: alpha must be in (0, 1]");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta) || !std::isfinite(kappa)) {
    throw ValidationError("ukf config: beta/kappa must be finite, beta >= 0");
  }
  if (process_sd_root < 0 || process_sd_length < 0 || process_sd_quat < 0) {
    throw ValidationError("ukf config: process noise SDs must be >= 0");
  }
  if (!(measurement_sd > 0.0)) {
    throw ValidationError("ukf config: measurement SD must be > 0");
  }
  if (!(init_sd_root > 0.0) || !(init_sd_length > 0.0) || !(init_sd_quat > 0.0)) {
    throw ValidationError("ukf config: initial SDs must be > 0");
  }
  if (!(quat_sd_cap > 0.0)) {
    throw ValidationError("ukf config: quat_sd_cap must be > 0");
  }
}

NoiseModel NoiseModel::build(const StateLayout& layout, const SkeletonTopology& topo,
                             const UkfConfig& config) {
  NoiseModel nm;
  nm.process_diag = Eigen::VectorXd::Zero(layout.dim());
  nm.process_diag.segment<3>(0).setConstant(config.process_sd_root * config.process_sd_root);
  for (int s = 0; s < layout.num_segments; ++s) {
    if (!layout.reduced) {
      nm.process_diag[layout.length_offset(s)] =
          config.process_sd_length * config.process_sd_length;
    }
    nm.process_diag.segment<4>(layout.quat_offset(s))
        .setConstant(config.process_sd_quat * config.process_sd_quat);
  }
  nm.measurement_diag = Eigen::VectorXd::Constant(
      3 * topo.num_segments(), config.measurement_sd * config.measurement_sd);
  return nm;
}

SigmaPoints draw_sigma_points(const GaussianBelief& belief, const UkfConfig& config) {
  const int n = belief.dim();
  const double lambda = config.alpha * config.alpha * (n + config.kappa) - n;
  if (!(n + lambda > 0.0)) {
    throw ValidationError("sigma points: alpha^2*(n+kappa) must be positive");
  }

  Eigen::MatrixXd sym = 0.5 * (belief.cov + belief.cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    double jitter = 1e-12;
    while (true) {
      llt.compute(sym + jitter * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() == Eigen::Success) break;
      if (jitter >= 1e-6) {
        throw NumericalError("sigma points: covariance not positive definite after max jitter");
      }
      jitter *= 10.0;
    }
  }

  const double scale = std::sqrt(n + lambda);
  const Eigen::MatrixXd root = llt.matrixL();

  SigmaPoints sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = belief.mean;
  for (int i = 0; i < n; ++i) {
    sp.points.col(1 + i) = belief.mean + scale * root.col(i);
    sp.points.col(1 + n + i) = belief.mean - scale * root.col(i);
  }
  sp.wm = Eigen::VectorXd::Constant(2 * n + 1, 0.5 / (n + lambda));
  sp.wc = sp.wm;
  sp.wm[0] = lambda / (n + lambda);
  sp.wc[0] = sp.wm[0] + (1.0 - config.alpha * config.alpha + config.beta);
  return sp;
}

namespace {

// Weighted mean of transformed sigma points in deviation form: anchoring on
// column 0 avoids the large cancellations the raw weighted sum incurs when
// alpha is small (|w0| ~ 1e6 at the default alpha).
Eigen::VectorXd sigma_mean(const Eigen::MatrixXd& ys, const Eigen::VectorXd& wm) {
  Eigen::VectorXd mean = ys.col(0);
  for (int i = 1; i < ys.cols(); ++i) {
    mean += wm[i] * (ys.col(i) - ys.col(0));
  }
  return mean;
}

}  // namespace

GaussianBelief unscented_transform(
    const GaussianBelief& belief,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const UkfConfig& config) {
  const SigmaPoints sp = draw_sigma_points(belief, config);
  const int cols = static_cast<int>(sp.points.cols());

  const Eigen::VectorXd y0 = f(sp.points.col(0));
  const int m = static_cast<int>(y0.size());
  Eigen::MatrixXd ys(m, cols);
  ys.col(0) = y0;
  for (int i = 1; i < cols; ++i) {
    ys.col(i) = f(sp.points.col(i));
  }

  GaussianBelief out;
  out.mean = sigma_mean(ys, sp.wm);
  const Eigen::MatrixXd dy = ys.colwise() - out.mean;
  out.cov = dy * sp.wc.asDiagonal() * dy.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

KinematicUkf::KinematicUkf(const SkeletonTopology& topo, const UkfConfig& config)
    : topo_(topo), config_(config), layout_(StateLayout::full(topo)) {
  config_.validate();
  noise_ = NoiseModel::build(layout_, topo_, config_);
}

KinematicUkf::KinematicUkf(const SkeletonTopology& topo, const UkfConfig& config,
                           std::vector<double> frozen_lengths)
    : topo_(topo),
      config_(config),
      layout_(StateLayout::with_frozen_lengths(topo)),
      frozen_lengths_(std::move(frozen_lengths)) {
  config_.validate();
  if (static_cast<int>(frozen_lengths_.size()) != topo.num_segments()) {
    throw ValidationError("ukf: frozen length count does not match topology");
  }
  noise_ = NoiseModel::build(layout_, topo_, config_);
}

Eigen::VectorXd KinematicUkf::observe(const Eigen::VectorXd& state) const {
  const auto positions = forward_kinematics_raw(state, layout_, frozen_lengths_, topo_);
  const int n = topo_.num_segments();
  Eigen::VectorXd y(3 * n);
  for (int s = 0; s < n; ++s) {
    y.segment<3>(3 * s) = positions[joint_index(topo_.segment(s).child)];
  }
  return y;
}

GaussianBelief KinematicUkf::initial_belief(const Frame& frame) const {
  const KinematicState state = init_state_from_frame(frame, topo_);
  GaussianBelief belief;
  belief.mean = layout_.flatten(state);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(layout_.dim());
  diag.segment<3>(0).setConstant(config_.init_sd_root * config_.init_sd_root);
  for (int s = 0; s < layout_.num_segments; ++s) {
    if (!layout_.reduced) {
      diag[layout_.length_offset(s)] = config_.init_sd_length * config_.init_sd_length;
    }
    diag.segment<4>(layout_.quat_offset(s))
        .setConstant(config_.init_sd_quat * config_.init_sd_quat);
  }
  belief.cov = diag.asDiagonal();
  return belief;
}

GaussianBelief KinematicUkf::step(const GaussianBelief& belief, const Frame& frame,
                                  PassDirection direction, StepDiagnostics* diag) const {
  (void)direction;  // identity transition either way (random walk)
  if (belief.dim() != layout_.dim()) {
    throw ValidationError("ukf step: belief dimension " + std::to_string(belief.dim()) +
                          " does not match state layout " + std::to_string(layout_.dim()));
  }

  // Predict: x stays, covariance widens by Q.
  GaussianBelief pred;
  pred.mean = belief.mean;
  pred.cov = belief.cov;
  pred.cov.diagonal() += noise_.process_diag;

  // Observed rows: non-Lost joints with finite positions.
  const int n_seg = topo_.num_segments();
  std::vector<int> observed;
  observed.reserve(n_seg);
  for (int s = 0; s < n_seg; ++s) {
    const JointId child = topo_.segment(s).child;
    if (frame.confidence(child) != Confidence::Lost && frame.position(child).allFinite()) {
      observed.push_back(s);
    }
  }

  if (diag != nullptr) {
    diag->n_observed_joints = static_cast<int>(observed.size());
    diag->innovation_norm = 0.0;
    diag->quat_resets = 0;
  }

  GaussianBelief post;
  if (observed.empty()) {
    // Measurement-free step.
    post = pred;
  } else {
    const int m = 3 * static_cast<int>(observed.size());
    const SigmaPoints sp = draw_sigma_points(pred, config_);
    const int cols = static_cast<int>(sp.points.cols());

    Eigen::MatrixXd zs(m, cols);
    for (int i = 0; i < cols; ++i) {
      const Eigen::VectorXd full = observe(sp.points.col(i));
      for (size_t k = 0; k < observed.size(); ++k) {
        zs.block<3, 1>(3 * static_cast<int>(k), i) = full.segment<3>(3 * observed[k]);
      }
    }

    Eigen::VectorXd y(m);
    Eigen::VectorXd r(m);
    for (size_t k = 0; k < observed.size(); ++k) {
      y.segment<3>(3 * static_cast<int>(k)) = frame.position(topo_.segment(observed[k]).child);
      r.segment<3>(3 * static_cast<int>(k)) =
          noise_.measurement_diag.segment<3>(3 * observed[k]);
    }

    // The update is a statistical linearization about h(mean): innovation,
    // S, and the cross covariance are all anchored at the zeroth sigma
    // point instead of the weighted sigma mean. The quaternion-normalizing
    // observation breaks the weighted-mean machinery two ways: the mean
    // contracts every bone by ~4*var(quat)*length (rotation averaging in
    // the embedding space), so the filter settles with inflated lengths,
    // and the huge negative zeroth covariance weight at small alpha
    // multiplies that same gap and drives S indefinite. Anchoring at
    // h(mean) removes the zeroth point from every sum (its deviation is
    // zero), keeps S >= R, and is exact for affine observations.
    const Eigen::MatrixXd dz = zs.colwise() - zs.col(0);
    const Eigen::MatrixXd dx = sp.points.colwise() - pred.mean;

    Eigen::MatrixXd s_mat = dz * sp.wc.asDiagonal() * dz.transpose();
    s_mat.diagonal() += r;
    const Eigen::MatrixXd c_mat = dx * sp.wc.asDiagonal() * dz.transpose();

    const Eigen::LDLT<Eigen::MatrixXd> s_ldlt(0.5 * (s_mat + s_mat.transpose()));
    if (s_ldlt.info() != Eigen::Success) {
      throw NumericalError("ukf step: innovation covariance factorization failed");
    }
    const Eigen::MatrixXd gain = s_ldlt.solve(c_mat.transpose()).transpose();

    const Eigen::VectorXd innovation = y - zs.col(0);
    post.mean = pred.mean + gain * innovation;
    post.cov = pred.cov - gain * s_mat * gain.transpose();
    if (diag != nullptr) diag->innovation_norm = innovation.norm();
  }

  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();

  // Renormalize and canonicalize the quaternion blocks of the mean.
  for (int s = 0; s < layout_.num_segments; ++s) {
    const int q = layout_.quat_offset(s);
    Quat quat{post.mean[q], post.mean[q + 1], post.mean[q + 2], post.mean[q + 3]};
    if (quat.norm() < 1e-9 || !quat.is_finite()) {
      quat = Quat::identity();
      if (diag != nullptr) ++diag->quat_resets;
    } else {
      quat = quat.normalized().canonical();
    }
    post.mean[q] = quat.w;
    post.mean[q + 1] = quat.x;
    post.mean[q + 2] = quat.y;
    post.mean[q + 3] = quat.z;
  }

  // Project the norm direction out of each quaternion block's covariance
  // (the observation is invariant along it), then cap the block's spread.
  // Both are symmetric congruences, so positive semi-definiteness survives.
  const double cap_trace = 4.0 * config_.quat_sd_cap * config_.quat_sd_cap;
  for (int s = 0; s < layout_.num_segments; ++s) {
    const int q = layout_.quat_offset(s);
    const Eigen::Vector4d u = post.mean.segment<4>(q).normalized();
    const Eigen::RowVectorXd row = u.transpose() * post.cov.middleRows<4>(q);
    post.cov.middleRows<4>(q) -= u * row;
    const Eigen::VectorXd col = post.cov.middleCols<4>(q) * u;
    post.cov.middleCols<4>(q) -= col * u.transpose();

    const double block_trace = post.cov.block<4, 4>(q, q).trace();
    if (block_trace > cap_trace) {
      const double scale = std::sqrt(cap_trace / block_trace);
      post.cov.middleRows<4>(q) *= scale;
      post.cov.middleCols<4>(q) *= scale;
    }
  }

  if (diag != nullptr) diag->trace_cov = post.cov.trace();
  return post;
}

GaussianBelief ukf_step(const GaussianBelief& belief, const Frame& frame,
                        const SkeletonTopology& topo, const UkfConfig& config,
                        PassDirection direction, StepDiagnostics* diag) {
  const KinematicUkf filter(topo, config);
  return filter.step(belief, frame, direction, diag);
}

std::vector<GaussianBelief> run_pass(const KinematicUkf& filter, const FrameStream& stream,
                                     GaussianBelief belief, PassDirection direction,
                                     int pass_index,
                                     std::vector<StepDiagnostics>* diagnostics) {
  const int n = stream.size();
  std::vector<GaussianBelief> out(n);
  for (int k = 0; k < n; ++k) {
    const int i = (direction == PassDirection::Forward) ? k : n - 1 - k;
    StepDiagnostics d;
    d.pass = pass_index;
    d.frame = i;
    try {
      belief = filter.step(belief, stream.frames[i], direction, &d);
    } catch (const NumericalError& e) {
      throw NumericalError("pass " + std::to_string(pass_index) + ", frame " +
                           std::to_string(i) + ": " + e.what());
    }
    if (diagnostics != nullptr) diagnostics->push_back(d);
    out[i] = belief;
  }
  return out;
}

namespace {

// Drops the length rows/columns of a full-state belief.
GaussianBelief reduce_belief(const GaussianBelief& full_belief, const StateLayout& full,
                             const StateLayout& reduced) {
  std::vector<int> keep;
  keep.reserve(reduced.dim());
  for (int i = 0; i < 3; ++i) keep.push_back(i);
  for (int s = 0; s < full.num_segments; ++s) {
    for (int i = 0; i < 4; ++i) keep.push_back(full.quat_offset(s) + i);
  }
  GaussianBelief out;
  out.mean.resize(reduced.dim());
  out.cov.resize(reduced.dim(), reduced.dim());
  for (size_t a = 0; a < keep.size(); ++a) {
    out.mean[static_cast<int>(a)] = full_belief.mean[keep[a]];
    for (size_t b = 0; b < keep.size(); ++b) {
      out.cov(static_cast<int>(a), static_cast<int>(b)) = full_belief.cov(keep[a], keep[b]);
    }
  }
  return out;
}

}  // namespace

FilterResult four_pass_filter(const FrameStream& stream, const SkeletonTopology& topo,
                              const UkfConfig& config) {
  config.validate();
  stream.validate();
  const int n = stream.size();
  if (n < 10) {
    throw ValidationError("four-pass filter: requires at least 10 frames, got " +
                          std::to_string(n));
  }

  FilterResult result;
  result.timestamps.reserve(n);
  for (const Frame& f : stream.frames) result.timestamps.push_back(f.t);

  const KinematicUkf full_filter(topo, config);
  GaussianBelief belief = full_filter.initial_belief(stream.frames.front());

  const auto pass1 = run_pass(full_filter, stream, belief, PassDirection::Forward, 1,
                              &result.diagnostics);
  const auto pass2 = run_pass(full_filter, stream, pass1.back(), PassDirection::Backward, 2,
                              &result.diagnostics);

  const StateLayout full_layout = StateLayout::full(topo);
  result.frozen_lengths.assign(topo.num_segments(), 0.0);
  for (int s = 0; s < topo.num_segments(); ++s) {
    double sum = 0.0;
    for (const GaussianBelief& b : pass2) sum += b.mean[full_layout.length_offset(s)];
    result.frozen_lengths[s] = sum / n;
  }
  for (int s = 0; s < topo.num_segments(); ++s) {
    if (!(result.frozen_lengths[s] > 0.0)) {
      throw NumericalError("four-pass filter: non-positive frozen length for segment " +
                           topo.segment(s).name);
    }
  }

  std::vector<GaussianBelief> final_pass;
  StateLayout out_layout = full_layout;
  if (config.freeze_lengths) {
    const KinematicUkf reduced_filter(topo, config, result.frozen_lengths);
    out_layout = reduced_filter.layout();
    GaussianBelief b3 = reduce_belief(pass2.front(), full_layout, out_layout);
    const auto pass3 = run_pass(reduced_filter, stream, std::move(b3),
                                PassDirection::Forward, 3, &result.diagnostics);
    final_pass = run_pass(reduced_filter, stream, pass3.back(), PassDirection::Backward, 4,
                          &result.diagnostics);
  } else {
    const auto pass3 = run_pass(full_filter, stream, pass2.front(), PassDirection::Forward, 3,
                                &result.diagnostics);
    final_pass = run_pass(full_filter, stream, pass3.back(), PassDirection::Backward, 4,
                          &result.diagnostics);
  }

  // Re-express each output state in the zero-twist gauge: rotations about a
  // segment's own axis (and matching counter-rotations below it) leave every
  // joint position unchanged, so the filter state is free to wander along
  // them. Rebuilding the state from its own forward kinematics picks the
  // shortest-arc representative, the same chart init_state_from_frame uses,
  // and leaves positions and the frozen lengths untouched.
  result.trajectory.reserve(n);
  for (const GaussianBelief& b : final_pass) {
    const KinematicState state =
        config.freeze_lengths ? out_layout.unflatten(b.mean, result.frozen_lengths)
                              : out_layout.unflatten(b.mean);
    const auto positions = forward_kinematics(state, topo);
    Frame frame;
    frame.t = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
      frame.pos[j] = positions[j];
      frame.conf[j] = Confidence::Tracked;
    }
    KinematicState gauge = init_state_from_frame(frame, topo);
    if (config.freeze_lengths) gauge.lengths = result.frozen_lengths;
    result.trajectory.push_back(std::move(gauge));
  }
  result.beliefs = std::move(final_pass);
  return result;
}

}  // namespace mocap
