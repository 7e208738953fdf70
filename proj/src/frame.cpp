#include "mocap/frame.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mocap/errors.hpp"

namespace mocap {

Frame::Frame() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  pos.fill(Eigen::Vector3d::Constant(nan));
  conf.fill(Confidence::Lost);
}

double FrameStream::duration() const {
  if (frames.size() < 2) return 0.0;
  return frames.back().t - frames.front().t;
}

void FrameStream::validate() const {
  for (size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].t > frames[i - 1].t)) {
      throw ValidationError("stream: timestamps not strictly increasing at frame " +
                            std::to_string(i));
    }
  }
  for (size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    for (int j = 0; j < kNumJoints; ++j) {
      const bool finite = f.pos[j].allFinite();
      if (f.conf[j] == Confidence::Lost) {
        if (finite) {
          throw ValidationError("stream: frame " + std::to_string(i) + " joint " +
                                joint_name(static_cast<JointId>(j)) +
                                " is Lost but has a finite position");
        }
      } else if (!finite) {
        throw ValidationError("stream: frame " + std::to_string(i) + " joint " +
                              joint_name(static_cast<JointId>(j)) +
                              " has a non-finite position but is not Lost");
      }
    }
  }
}

}  // namespace mocap
