#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mocap/frame.hpp"
#include "mocap/mixture.hpp"

namespace mocap {

struct CleanConfig {
  int window = 11;                 // rolling-median window, frames
  double threshold = 0.5;          // uniform-responsibility flag threshold
  double max_flag_fraction = 0.5;  // above this the joint is left untouched
  // Tracking-loss regime gate: mixture flags are emitted only when the
  // fitted support is at least this many core widths wide, i.e. when the
  // data actually contains a far tail for the uniform to model. Below the
  // gate the uniform weight reflects shape misfit of the noise core, not
  // outliers, and only Lost samples are repaired.
  double min_support_sigma = 8.0;
  EmConfig em;

  void validate() const;
};

// Per-joint cleaning outcome. `warning` is set when the joint was passed
// through unmodified (systemic tracking failure or an unusable fit).
struct JointCleanReport {
  JointId joint;
  std::optional<MixtureParams> params;  // absent when the fit was degenerate
  std::vector<bool> flagged;            // per frame; includes Lost frames
  int n_flagged = 0;
  int n_total = 0;
  std::string warning;
};

struct StreamCleanReport {
  std::array<JointCleanReport, kNumJoints> joints;
};

// Per joint: deviation from the centered rolling median, mixture fit on the
// deviations, flagged and Lost samples replaced by linear interpolation
// between the nearest clean neighbors (clamped at the stream ends) and
// marked Inferred. Joints flagged beyond max_flag_fraction pass through
// unmodified with a warning.
std::pair<FrameStream, StreamCleanReport> clean_stream(const FrameStream& stream,
                                                       const CleanConfig& config = {});

}  // namespace mocap
