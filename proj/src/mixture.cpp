#include "mocap/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

const double kInvSqrt2Pi = 0.3989422804014327;

double median_of(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

}  // namespace

void MixtureParams::validate() const {
  if (!(rho >= 0.0) || rho > 1.0) {
    throw ValidationError("mixture: rho must be in [0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
    throw ValidationError("mixture: sigma must be positive and finite");
  }
  if (!(x2 > x1)) {
    throw ValidationError("mixture: uniform support requires x2 > x1");
  }
}

double MixtureParams::gaussian_pdf(double s) const {
  const double z = (s - mu) / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

double MixtureParams::uniform_pdf(double s) const {
  return (s >= x1 && s <= x2) ? 1.0 / (x2 - x1) : 0.0;
}

double MixtureParams::pdf(double s) const {
  return rho * gaussian_pdf(s) + (1.0 - rho) * uniform_pdf(s);
}

MixtureFit fit_mixture_em(std::span<const double> samples, const EmConfig& config) {
  const int n = static_cast<int>(samples.size());
  if (n < config.min_samples) {
    throw ValidationError("mixture fit: insufficient data, need at least " +
                          std::to_string(config.min_samples) + " samples, got " +
                          std::to_string(n));
  }
  for (double s : samples) {
    if (!std::isfinite(s)) {
      throw ValidationError("mixture fit: non-finite sample");
    }
  }

  std::vector<double> sorted(samples.begin(), samples.end());
  const auto [lo_it, hi_it] = std::minmax_element(sorted.begin(), sorted.end());
  const double x1 = *lo_it;
  const double x2 = *hi_it;
  if (!(x2 > x1)) {
    throw ValidationError("mixture fit: degenerate data, all samples identical");
  }

  MixtureParams params;
  params.x1 = x1;
  params.x2 = x2;
  params.rho = config.init_rho;
  params.mu = median_of(sorted);
  std::vector<double> abs_dev(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) abs_dev[i] = std::abs(sorted[i] - params.mu);
  params.sigma = 1.4826 * median_of(std::move(abs_dev));
  if (!(params.sigma > 0.0)) {
    // Majority of samples at the median; fall back to the full spread.
    params.sigma = 0.25 * (x2 - x1);
  }
  const double sigma_floor = 1e-12 * (x2 - x1);

  MixtureFit fit;
  std::vector<double> resp(n);  // Gaussian responsibilities
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    // E-step.
    const double u = 1.0 / (x2 - x1);
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = params.rho * params.gaussian_pdf(samples[i]);
      const double total = g + (1.0 - params.rho) * u;
      resp[i] = g / total;
      ll += std::log(total);
    }
    fit.log_likelihood.push_back(ll);
    fit.iterations = iter + 1;
    if (std::abs(ll - prev_ll) < config.tolerance) break;
    prev_ll = ll;

    // M-step: weighted Gaussian moments, uniform support stays (min, max).
    double wsum = 0.0, mean = 0.0;
    for (int i = 0; i < n; ++i) {
      wsum += resp[i];
      mean += resp[i] * samples[i];
    }
    if (wsum > 0.0) {
      mean /= wsum;
      double var = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = samples[i] - mean;
        var += resp[i] * d * d;
      }
      var /= wsum;
      params.mu = mean;
      params.sigma = std::max(std::sqrt(var), sigma_floor);
    }
    params.rho = wsum / n;
  }

  fit.params = params;
  return fit;
}

OutlierReport classify_outliers(std::span<const double> samples,
                                const MixtureParams& params, double threshold) {
  params.validate();
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw ValidationError("classify_outliers: threshold must be in (0, 1)");
  }

  OutlierReport report;
  report.params = params;
  report.responsibility.reserve(samples.size());
  report.outlier.reserve(samples.size());

  const double u = 1.0 / (params.x2 - params.x1);
  for (double s : samples) {
    double r;
    if (s < params.x1 || s > params.x2 || !std::isfinite(s)) {
      r = 1.0;  // outside the fitted support
    } else if (params.rho >= 1.0) {
      r = 0.0;
    } else {
      const double g = params.rho * params.gaussian_pdf(s);
      const double un = (1.0 - params.rho) * u;
      r = un / (g + un);
    }
    const bool flag = r > threshold;
    report.responsibility.push_back(r);
    report.outlier.push_back(flag);
    if (flag) ++report.n_flagged;
  }
  return report;
}

}  // namespace mocap
