#pragma once

#include <span>
#include <vector>

namespace mocap {

// Gaussian + uniform mixture: rho * N(mu, sigma) + (1 - rho) * U(x1, x2).
// The Gaussian carries random sensor error, the uniform carries
// tracking-loss outliers.
struct MixtureParams {
  double rho = 0.9;
  double mu = 0.0;
  double sigma = 1.0;
  double x1 = 0.0;
  double x2 = 1.0;

  void validate() const;  // throws ValidationError
  double gaussian_pdf(double s) const;
  double uniform_pdf(double s) const;  // 0 outside [x1, x2]
  double pdf(double s) const;
};

struct EmConfig {
  int max_iterations = 200;
  double tolerance = 1e-8;       // absolute log-likelihood change
  double init_rho = 0.9;
  int min_samples = 10;
};

// Maximum-likelihood fit by EM with the uniform support held fixed at the
// sample (min, max). Initialization is robust: mu0 = median, sigma0 =
// 1.4826 * MAD. The returned trace is the per-iteration log-likelihood.
struct MixtureFit {
  MixtureParams params;
  std::vector<double> log_likelihood;
  int iterations = 0;
};

MixtureFit fit_mixture_em(std::span<const double> samples, const EmConfig& config = {});

// Posterior responsibility of the uniform component per sample, with flags
// at `threshold`. Samples outside [x1, x2] get responsibility 1.
struct OutlierReport {
  std::vector<double> responsibility;
  std::vector<bool> outlier;
  MixtureParams params;
  std::vector<double> log_likelihood;
  int n_flagged = 0;
};

OutlierReport classify_outliers(std::span<const double> samples,
                                const MixtureParams& params, double threshold = 0.5);

}  // namespace mocap
