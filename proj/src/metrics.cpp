#include "mocap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mocap/errors.hpp"

namespace mocap {

void MetricsConfig::validate() const {
  if (!(prominence_min_rad > 0.0) || !(prominence_min_m > 0.0)) {
    throw ValidationError("metrics config: prominence thresholds must be > 0");
  }
  if (!(min_period_s >= 0.0) || !(speed_min >= 0.0)) {
    throw ValidationError("metrics config: min_period_s and speed_min must be >= 0");
  }
}

int count_repetitions(std::span<const double> timestamps, std::span<const double> values,
                      double prominence_min, double min_period_s) {
  const int n = static_cast<int>(values.size());
  if (n < 3 || timestamps.size() != values.size()) return 0;
  if (timestamps[n - 1] - timestamps[0] < 2.0) return 0;

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = values[i] - mean;

  // Local maxima with their prominences: the drop to the lowest valley on
  // each side before a strictly higher sample (or the signal edge).
  struct Peak {
    int index;
    double height;
    double prominence;
  };
  std::vector<Peak> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1]) || !(v[i] >= v[i + 1])) continue;
    double left_min = v[i];
    for (int k = i - 1; k >= 0; --k) {
      if (v[k] > v[i]) break;
      left_min = std::min(left_min, v[k]);
    }
    double right_min = v[i];
    for (int k = i + 1; k < n; ++k) {
      if (v[k] > v[i]) break;
      right_min = std::min(right_min, v[k]);
    }
    const double prominence = v[i] - std::max(left_min, right_min);
    if (prominence >= prominence_min) peaks.push_back({i, v[i], prominence});
  }

  // Enforce the minimum separation, taller peaks first.
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.height != b.height) return a.height > b.height;
    return a.index < b.index;
  });
  std::vector<int> kept;
  for (const Peak& p : peaks) {
    const double t = timestamps[p.index];
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](int k) {
      return std::abs(timestamps[k] - t) < min_period_s;
    });
    if (clear) kept.push_back(p.index);
  }
  return static_cast<int>(kept.size());
}

SessionMetrics compute_session_metrics(const FrameStream& stream,
                                       const std::vector<KinematicState>* states,
                                       const MetricsConfig& config) {
  config.validate();
  if (stream.frames.empty()) {
    throw ValidationError("session metrics: empty stream");
  }
  if (states != nullptr && states->size() != stream.frames.size()) {
    throw ValidationError("session metrics: state trajectory length mismatch");
  }

  const int n = stream.size();
  SessionMetrics out;

  // Path lengths and reachable ranges.
  std::array<double, kNumJoints> path{};
  for (int j = 0; j < kNumJoints; ++j) {
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d hi = -lo;
    Eigen::Vector3d origin;
    bool have_origin = false;
    const Eigen::Vector3d* prev = nullptr;
    double radial = 0.0;
    for (int t = 0; t < n; ++t) {
      const Eigen::Vector3d& p = stream.frames[t].pos[j];
      if (!p.allFinite()) {
        prev = nullptr;
        continue;
      }
      if (!have_origin) {
        origin = p;
        have_origin = true;
      }
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      radial = std::max(radial, (p - origin).norm());
      if (prev != nullptr) path[j] += (p - *prev).norm();
      prev = &p;
    }
    if (have_origin) {
      out.reachable[j].extent = hi - lo;
      out.reachable[j].max_radial = radial;
    }
  }

  out.most_moving.reserve(kNumJoints);
  for (int j = 0; j < kNumJoints; ++j) {
    out.most_moving.emplace_back(static_cast<JointId>(j), path[j]);
  }
  std::sort(out.most_moving.begin(), out.most_moving.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return joint_index(a.first) < joint_index(b.first);
            });

  // Moving time: duration of inter-frame gaps whose mean joint speed exceeds
  // the cutoff.
  const double duration = stream.duration();
  for (int t = 1; t < n; ++t) {
    const double dt = stream.frames[t].t - stream.frames[t - 1].t;
    double sum = 0.0;
    int count = 0;
    for (int j = 0; j < kNumJoints; ++j) {
      const Eigen::Vector3d& a = stream.frames[t - 1].pos[j];
      const Eigen::Vector3d& b = stream.frames[t].pos[j];
      if (!a.allFinite() || !b.allFinite()) continue;
      sum += (b - a).norm();
      ++count;
    }
    if (count > 0 && sum / count / dt > config.speed_min) {
      out.moving_time_s += dt;
    }
  }
  out.moving_fraction = duration > 0.0 ? out.moving_time_s / duration : 0.0;

  // Repetitions on the most-moving joint. With states available the signal
  // is a joint angle: distal joints sweep the longest paths while their own
  // segments barely rotate, so of the segments on the joint's root path we
  // take the one whose angle signal varies the most. Without states the
  // joint's dominant position axis is used.
  const JointId top = out.most_moving.front().first;
  std::vector<double> ts, signal;
  ts.reserve(n);
  signal.reserve(n);
  double prominence = config.prominence_min_m;
  if (states != nullptr && top != JointId::ROOT) {
    int seg = -1;
    double best_var = -1.0;
    for (JointId j = top; j != JointId::ROOT; j = stream.topology.parent(j)) {
      const int candidate = stream.topology.segment_of_child(j);
      double sum = 0.0, sum_sq = 0.0;
      for (int t = 0; t < n; ++t) {
        const double a = (*states)[t].quats[candidate].angle();
        sum += a;
        sum_sq += a * a;
      }
      const double var = sum_sq / n - (sum / n) * (sum / n);
      if (var > best_var) {
        best_var = var;
        seg = candidate;
      }
    }
    for (int t = 0; t < n; ++t) {
      ts.push_back(stream.frames[t].t);
      signal.push_back((*states)[t].quats[seg].angle());
    }
    prominence = config.prominence_min_rad;
  } else {
    const int ji = joint_index(top);
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (out.reachable[ji].extent[a] > out.reachable[ji].extent[axis]) axis = a;
    }
    for (int t = 0; t < n; ++t) {
      const Eigen::Vector3d& p = stream.frames[t].pos[ji];
      if (!p.allFinite()) continue;
      ts.push_back(stream.frames[t].t);
      signal.push_back(p[axis]);
    }
  }
  out.repetitions = count_repetitions(ts, signal, prominence, config.min_period_s);
  return out;
}

}  // namespace mocap
