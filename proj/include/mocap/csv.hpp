#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mocap/clean.hpp"
#include "mocap/eval.hpp"
#include "mocap/frame.hpp"
#include "mocap/kinematics.hpp"
#include "mocap/metrics.hpp"
#include "mocap/synth.hpp"
#include "mocap/ukf.hpp"

namespace mocap {

// Shortest round-trip decimal representation (serialize/parse is bit-exact
// for finite values; NaN is written as "nan").
std::string format_double(double v);

// Frame CSV: header `t` then `<JOINT>_x,<JOINT>_y,<JOINT>_z[,<JOINT>_c]` per
// joint in topology order, one row per frame, positions in meters, NaN for
// Lost joints. The confidence columns are either present for every joint or
// absent entirely (absent reads as Tracked); the writer always emits them.
FrameStream read_frame_csv(const std::string& path, const SkeletonTopology& topo);
void write_frame_csv(const std::string& path, const FrameStream& stream);

// Kinematic parameter CSV: `t,root_x,root_y,root_z`, `len_<SEGMENT>` per
// segment, `q_<SEGMENT>_{w,x,y,z}` per segment (canonical sign), and
// `angle_<CHILD>` per segment. Angle columns are derived and ignored on read.
void write_params_csv(const std::string& path, const SkeletonTopology& topo,
                      const std::vector<double>& timestamps,
                      const std::vector<KinematicState>& states);
std::pair<std::vector<double>, std::vector<KinematicState>> read_params_csv(
    const std::string& path, const SkeletonTopology& topo);

// Ground-truth sidecar: the parameter columns plus `label_<JOINT>` per joint
// (0 clean, 1 outlier, 2 lost). Labels may be empty when no corruption ran.
void write_truth_csv(const std::string& path, const SkeletonTopology& topo,
                     const std::vector<double>& timestamps,
                     const std::vector<KinematicState>& states,
                     const CorruptionLabels* labels);

// Report writers.
void write_outlier_report_csv(const std::string& path, const StreamCleanReport& report);
void write_metrics_csv(const std::string& path, const SessionMetrics& metrics);
void write_accuracy_csv(const std::string& path, const AccuracyReport& report);
void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diagnostics);

}  // namespace mocap
