#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/kinematics.hpp"
#include "mocap/skeleton.hpp"

namespace mocap {

// Mean/covariance pair in the flattened state layout.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

struct UkfConfig {
  // Sigma-point spread (Wan-van der Merwe scaling).
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;

  // Random-walk process noise, per frame.
  double process_sd_root = 0.02;    // m
  double process_sd_length = 0.001; // m, zeroed structurally once frozen
  double process_sd_quat = 0.08;    // per quaternion component

  double measurement_sd = 0.025;    // m, per joint coordinate

  // Initial covariance for the pass-1 belief.
  double init_sd_root = 0.05;
  double init_sd_length = 0.03;
  double init_sd_quat = 0.1;

  // Per-component SD ceiling for each quaternion block's covariance. The
  // observation is invariant along twist directions of straight chains and
  // leaf segments, so their variance grows without bound under the random
  // walk; the cap keeps the sigma spread in the small-rotation regime.
  double quat_sd_cap = 0.2;

  // Run passes 3-4 on the reduced state with constant lengths. Disabling
  // keeps all four passes on the full state.
  bool freeze_lengths = true;

  void validate() const;  // throws ValidationError
};

// Diagonal process/measurement covariances for a given layout. The length
// block is absent entirely in the reduced layout, which realizes the
// zero-covariance constraint on frozen lengths without defeating the
// Cholesky factorization.
struct NoiseModel {
  Eigen::VectorXd process_diag;      // layout.dim()
  Eigen::VectorXd measurement_diag;  // 3 * num_segments (non-root joints)

  static NoiseModel build(const StateLayout& layout, const SkeletonTopology& topo,
                          const UkfConfig& config);
};

enum class PassDirection { Forward, Backward };

struct StepDiagnostics {
  int pass = 0;
  int frame = 0;
  double trace_cov = 0.0;
  int n_observed_joints = 0;
  double innovation_norm = 0.0;
  int quat_resets = 0;  // mean quaternion blocks that collapsed and were reset
};

// Scaled sigma points with mean/covariance weights. points.col(0) is the
// mean; columns 1..n and n+1..2n are the +/- spread.
struct SigmaPoints {
  Eigen::MatrixXd points;  // dim x (2*dim + 1)
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

// Draws 2n+1 sigma points. The covariance square root is taken by Cholesky
// after symmetrization; on failure a jitter of 1e-12*I is added and escalated
// by x10 up to 1e-6, after which NumericalError is thrown.
SigmaPoints draw_sigma_points(const GaussianBelief& belief, const UkfConfig& config);

// Propagates the belief through an arbitrary function. Exact for affine f.
GaussianBelief unscented_transform(
    const GaussianBelief& belief,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const UkfConfig& config);

// One predict+update cycle of the kinematic filter. The random-walk
// transition is the identity in both directions, so predict only widens the
// covariance by Q; the measurement update runs the unscented transform
// through forward kinematics restricted to the observed (non-Lost) joints.
class KinematicUkf {
 public:
  // Full-state filter (lengths part of the state).
  KinematicUkf(const SkeletonTopology& topo, const UkfConfig& config);
  // Reduced-state filter with constant lengths baked into the observation.
  KinematicUkf(const SkeletonTopology& topo, const UkfConfig& config,
               std::vector<double> frozen_lengths);

  const StateLayout& layout() const { return layout_; }

  // Observation function: non-root joint positions, topology order, 3 each.
  Eigen::VectorXd observe(const Eigen::VectorXd& state) const;

  GaussianBelief step(const GaussianBelief& belief, const Frame& frame,
                      PassDirection direction, StepDiagnostics* diag = nullptr) const;

  GaussianBelief initial_belief(const Frame& frame) const;

 private:
  SkeletonTopology topo_;
  UkfConfig config_;
  StateLayout layout_;
  std::vector<double> frozen_lengths_;
  NoiseModel noise_;
};

// Convenience wrapper over KinematicUkf for a single full-state step.
GaussianBelief ukf_step(const GaussianBelief& belief, const Frame& frame,
                        const SkeletonTopology& topo, const UkfConfig& config,
                        PassDirection direction, StepDiagnostics* diag = nullptr);

struct FilterResult {
  std::vector<double> timestamps;
  std::vector<KinematicState> trajectory;   // pass-4 means, frozen lengths
  std::vector<GaussianBelief> beliefs;      // pass-4 per-frame beliefs
  std::vector<double> frozen_lengths;       // per segment
  std::vector<StepDiagnostics> diagnostics; // all passes, in execution order
};

// Runs one filtering pass over the stream. `belief` is taken at the first
// processed frame (stream order for Forward, reversed for Backward); the
// returned per-frame beliefs are in stream order.
std::vector<GaussianBelief> run_pass(const KinematicUkf& filter,
                                     const FrameStream& stream,
                                     GaussianBelief belief, PassDirection direction,
                                     int pass_index,
                                     std::vector<StepDiagnostics>* diagnostics);

// Four-pass estimation: forward and backward over the full state, segment
// lengths frozen to the mean of the pass-2 estimates, then forward and
// backward over the reduced state. Requires at least 10 frames and a fully
// tracked first frame.
FilterResult four_pass_filter(const FrameStream& stream, const SkeletonTopology& topo,
                              const UkfConfig& config);

}  // namespace mocap
