#include "mocap/clean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

double median_inplace(std::vector<double>& v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  // After partitioning, the lower half's maximum is the other middle value.
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

// Deviation of each sample from the centered rolling median of its joint
// track, Euclidean norm over the three axes. NaN where the joint is Lost.
// Samples marked in `exclude` contribute nothing to the medians (their own
// deviations are still computed), so a second round can measure against
// medians free of already-identified outliers.
std::vector<double> deviation_signal(const FrameStream& stream, int joint, int window,
                                     const std::vector<bool>* exclude = nullptr) {
  const int n = stream.size();
  const int half = window / 2;
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> buf;
  buf.reserve(window);

  for (int t = 0; t < n; ++t) {
    const Eigen::Vector3d& p = stream.frames[t].pos[joint];
    if (!p.allFinite()) continue;
    Eigen::Vector3d med;
    bool ok = true;
    for (int axis = 0; axis < 3 && ok; ++axis) {
      buf.clear();
      for (int k = std::max(0, t - half); k <= std::min(n - 1, t + half); ++k) {
        if (exclude != nullptr && (*exclude)[k]) continue;
        const double v = stream.frames[k].pos[joint][axis];
        if (std::isfinite(v)) buf.push_back(v);
      }
      if (buf.empty()) {
        ok = false;
        break;
      }
      med[axis] = median_inplace(buf);
    }
    if (ok) out[t] = (p - med).norm();
  }
  return out;
}

}  // namespace

void CleanConfig::validate() const {
  if (window < 3 || window % 2 == 0) {
    throw ValidationError("clean config: window must be an odd integer >= 3");
  }
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw ValidationError("clean config: threshold must be in (0, 1)");
  }
  if (!(max_flag_fraction > 0.0) || max_flag_fraction > 1.0) {
    throw ValidationError("clean config: max_flag_fraction must be in (0, 1]");
  }
  if (!(min_support_sigma >= 0.0)) {
    throw ValidationError("clean config: min_support_sigma must be >= 0");
  }
}

std::pair<FrameStream, StreamCleanReport> clean_stream(const FrameStream& stream,
                                                       const CleanConfig& config) {
  config.validate();
  stream.validate();
  const int n = stream.size();
  if (n < 2 * config.window) {
    throw ValidationError("clean_stream: requires at least " +
                          std::to_string(2 * config.window) + " frames, got " +
                          std::to_string(n));
  }

  FrameStream out = stream;
  StreamCleanReport report;

  for (int j = 0; j < kNumJoints; ++j) {
    JointCleanReport& jr = report.joints[j];
    jr.joint = static_cast<JointId>(j);
    jr.n_total = n;

    // One classification round: mixture fit on the finite deviations, flags
    // per responsibility. Lost frames (NaN deviations) are always flagged.
    // Flags fire only in the tracking-loss regime: the fitted support must
    // dwarf the noise core, otherwise the uniform weight is shape misfit of
    // the noise distribution and there is no far tail to remove.
    auto classify_round = [&](const std::vector<double>& dev, bool* fitted) {
      std::vector<bool> flags(n, false);
      std::vector<double> samples;
      samples.reserve(n);
      for (double d : dev) {
        if (std::isfinite(d)) samples.push_back(d);
      }
      for (int t = 0; t < n; ++t) {
        if (!std::isfinite(dev[t])) flags[t] = true;
      }
      *fitted = false;
      if (static_cast<int>(samples.size()) >= config.em.min_samples) {
        const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
        if (*hi > *lo) {
          const MixtureFit fit = fit_mixture_em(samples, config.em);
          jr.params = fit.params;
          if (fit.params.x2 - fit.params.x1 >=
              config.min_support_sigma * fit.params.sigma) {
            *fitted = true;
            const OutlierReport rep = classify_outliers(dev, fit.params, config.threshold);
            for (int t = 0; t < n; ++t) {
              if (rep.outlier[t]) flags[t] = true;
            }
          }
        }
        // Zero spread (constant track): no deviations to flag.
      } else if (!samples.empty()) {
        jr.warning = "too few finite samples for a mixture fit";
      }
      return flags;
    };

    // The raw deviations are norms of ~3D Gaussian noise, whose chi-like
    // right tail a fitted Gaussian undershoots by an order of magnitude;
    // the Wilson-Hilferty transform d^(2/3) makes the noise core close to
    // Gaussian, which is the structure the mixture model assumes.
    auto transformed_deviations = [&](const std::vector<bool>* exclude) {
      std::vector<double> dev = deviation_signal(stream, j, config.window, exclude);
      for (double& d : dev) d = std::cbrt(d * d);
      return dev;
    };

    bool fitted = false;
    jr.flagged = classify_round(transformed_deviations(nullptr), &fitted);

    // Refinement round: at high outlier rates the teleports pollute the
    // rolling medians of their clean neighbors. Re-measuring against
    // medians that exclude the first round's flags removes those false
    // positives while true teleports keep their full deviation.
    const int first_flags = static_cast<int>(std::count(jr.flagged.begin(),
                                                        jr.flagged.end(), true));
    if (fitted && first_flags > 0 && first_flags <= config.max_flag_fraction * n) {
      const std::vector<bool> mask = jr.flagged;
      bool refitted = false;
      std::vector<bool> refined = classify_round(transformed_deviations(&mask), &refitted);
      if (refitted) {
        jr.flagged = std::move(refined);
      }
    }

    jr.n_flagged = static_cast<int>(std::count(jr.flagged.begin(), jr.flagged.end(), true));

    if (jr.n_flagged > config.max_flag_fraction * n) {
      jr.warning = "systemic tracking failure: " + std::to_string(jr.n_flagged) + "/" +
                   std::to_string(n) + " frames flagged; joint passed through";
      continue;
    }
    if (!fitted && jr.n_flagged == 0) continue;

    // Replace flagged samples by interpolation between clean neighbors.
    int prev_valid = -1;
    for (int t = 0; t < n; ++t) {
      if (!jr.flagged[t]) {
        prev_valid = t;
        continue;
      }
      int next_valid = -1;
      for (int k = t + 1; k < n; ++k) {
        if (!jr.flagged[k]) {
          next_valid = k;
          break;
        }
      }
      Eigen::Vector3d value;
      if (prev_valid >= 0 && next_valid >= 0) {
        const double t0 = stream.frames[prev_valid].t;
        const double t1 = stream.frames[next_valid].t;
        const double a = (stream.frames[t].t - t0) / (t1 - t0);
        value = (1.0 - a) * stream.frames[prev_valid].pos[j] +
                a * stream.frames[next_valid].pos[j];
      } else if (prev_valid >= 0) {
        value = stream.frames[prev_valid].pos[j];
      } else if (next_valid >= 0) {
        value = stream.frames[next_valid].pos[j];
      } else {
        continue;  // nothing clean to borrow from; handled by the warning path
      }
      out.frames[t].pos[j] = value;
      out.frames[t].conf[j] = Confidence::Inferred;
    }
  }
  return {std::move(out), std::move(report)};
}

}  // namespace mocap
