#include "mocap/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& token, const std::string& path, int lineno) {
  double v;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError(path + ": line " + std::to_string(lineno) +
                          ": cannot parse number '" + token + "'");
  }
  return v;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open for writing: " + path);
  }
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open: " + path);
  }
  return in;
}

std::vector<std::string> params_header(const SkeletonTopology& topo) {
  std::vector<std::string> cols = {"t", "root_x", "root_y", "root_z"};
  for (const Segment& s : topo.segments()) cols.push_back("len_" + s.name);
  for (const Segment& s : topo.segments()) {
    for (const char* c : {"w", "x", "y", "z"}) {
      cols.push_back("q_" + s.name + "_" + c);
    }
  }
  for (const Segment& s : topo.segments()) {
    cols.push_back(std::string("angle_") + joint_name(s.child));
  }
  return cols;
}

void write_header(std::ofstream& out, const std::vector<std::string>& cols) {
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i > 0) out << ',';
    out << cols[i];
  }
  out << '\n';
}

void write_param_row(std::ofstream& out, double t, const KinematicState& state,
                     const SkeletonTopology& topo) {
  out << format_double(t);
  for (int i = 0; i < 3; ++i) out << ',' << format_double(state.root_pos[i]);
  for (int s = 0; s < topo.num_segments(); ++s) out << ',' << format_double(state.lengths[s]);
  for (int s = 0; s < topo.num_segments(); ++s) {
    const Quat q = state.quats[s].canonical();
    out << ',' << format_double(q.w) << ',' << format_double(q.x) << ','
        << format_double(q.y) << ',' << format_double(q.z);
  }
  const JointAngles angles = extract_joint_angles(state);
  for (int s = 0; s < topo.num_segments(); ++s) out << ',' << format_double(angles.angles[s]);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

FrameStream read_frame_csv(const std::string& path, const SkeletonTopology& topo) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path + ": empty file");
  }
  const std::vector<std::string> header = split_csv_line(line);

  const size_t with_conf = 1 + 4 * kNumJoints;
  const size_t without_conf = 1 + 3 * kNumJoints;
  bool has_conf;
  if (header.size() == with_conf) {
    has_conf = true;
  } else if (header.size() == without_conf) {
    has_conf = false;
  } else {
    throw ValidationError(path + ": line 1: expected " + std::to_string(without_conf) +
                          " or " + std::to_string(with_conf) + " columns, got " +
                          std::to_string(header.size()));
  }
  if (header[0] != "t") {
    throw ValidationError(path + ": line 1: first column must be 't'");
  }
  const int stride = has_conf ? 4 : 3;
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string name = joint_name(static_cast<JointId>(j));
    const size_t base = 1 + static_cast<size_t>(j) * stride;
    const char* suffix[] = {"_x", "_y", "_z", "_c"};
    for (int k = 0; k < stride; ++k) {
      if (header[base + k] != name + suffix[k]) {
        throw ValidationError(path + ": line 1: column " + std::to_string(base + k + 1) +
                              " is '" + header[base + k] + "', expected '" + name +
                              suffix[k] + "'");
      }
    }
  }

  FrameStream stream;
  stream.topology = topo;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError(path + ": line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    Frame frame;
    frame.t = parse_double(cells[0], path, lineno);
    for (int j = 0; j < kNumJoints; ++j) {
      const size_t base = 1 + static_cast<size_t>(j) * stride;
      for (int a = 0; a < 3; ++a) {
        frame.pos[j][a] = parse_double(cells[base + a], path, lineno);
      }
      if (has_conf) {
        const double c = parse_double(cells[base + 3], path, lineno);
        if (c != 0.0 && c != 1.0 && c != 2.0) {
          throw ValidationError(path + ": line " + std::to_string(lineno) +
                                ": confidence must be 0, 1 or 2");
        }
        frame.conf[j] = static_cast<Confidence>(static_cast<int>(c));
      } else {
        frame.conf[j] = Confidence::Tracked;
      }
    }
    stream.frames.push_back(std::move(frame));
  }
  if (stream.frames.size() >= 2) {
    const double span = stream.frames.back().t - stream.frames.front().t;
    if (span > 0.0) stream.nominal_rate = (stream.frames.size() - 1) / span;
  }
  try {
    stream.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return stream;
}

void write_frame_csv(const std::string& path, const FrameStream& stream) {
  std::ofstream out = open_for_write(path);
  std::vector<std::string> cols = {"t"};
  for (int j = 0; j < kNumJoints; ++j) {
    const std::string name = joint_name(static_cast<JointId>(j));
    for (const char* s : {"_x", "_y", "_z", "_c"}) cols.push_back(name + s);
  }
  write_header(out, cols);
  for (const Frame& f : stream.frames) {
    out << format_double(f.t);
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) out << ',' << format_double(f.pos[j][a]);
      out << ',' << static_cast<int>(f.conf[j]);
    }
    out << '\n';
  }
}

void write_params_csv(const std::string& path, const SkeletonTopology& topo,
                      const std::vector<double>& timestamps,
                      const std::vector<KinematicState>& states) {
  if (timestamps.size() != states.size()) {
    throw ValidationError("params csv: timestamp/state count mismatch");
  }
  std::ofstream out = open_for_write(path);
  write_header(out, params_header(topo));
  for (size_t i = 0; i < states.size(); ++i) {
    write_param_row(out, timestamps[i], states[i], topo);
    out << '\n';
  }
}

std::pair<std::vector<double>, std::vector<KinematicState>> read_params_csv(
    const std::string& path, const SkeletonTopology& topo) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path + ": empty file");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> expected = params_header(topo);
  if (header.size() != expected.size()) {
    throw ValidationError(path + ": line 1: expected " + std::to_string(expected.size()) +
                          " columns, got " + std::to_string(header.size()));
  }
  for (size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      throw ValidationError(path + ": line 1: column " + std::to_string(i + 1) + " is '" +
                            header[i] + "', expected '" + expected[i] + "'");
    }
  }

  const int n_seg = topo.num_segments();
  std::vector<double> ts;
  std::vector<KinematicState> states;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != expected.size()) {
      throw ValidationError(path + ": line " + std::to_string(lineno) + ": expected " +
                            std::to_string(expected.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    size_t c = 0;
    ts.push_back(parse_double(cells[c++], path, lineno));
    KinematicState state;
    for (int i = 0; i < 3; ++i) state.root_pos[i] = parse_double(cells[c++], path, lineno);
    state.lengths.resize(n_seg);
    state.quats.resize(n_seg);
    for (int s = 0; s < n_seg; ++s) state.lengths[s] = parse_double(cells[c++], path, lineno);
    for (int s = 0; s < n_seg; ++s) {
      Quat q;
      q.w = parse_double(cells[c++], path, lineno);
      q.x = parse_double(cells[c++], path, lineno);
      q.y = parse_double(cells[c++], path, lineno);
      q.z = parse_double(cells[c++], path, lineno);
      state.quats[s] = q;
    }
    try {
      state.validate(topo);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": line " + std::to_string(lineno) + ": " + e.what());
    }
    states.push_back(std::move(state));
  }
  return {std::move(ts), std::move(states)};
}

void write_truth_csv(const std::string& path, const SkeletonTopology& topo,
                     const std::vector<double>& timestamps,
                     const std::vector<KinematicState>& states,
                     const CorruptionLabels* labels) {
  if (timestamps.size() != states.size() ||
      (labels != nullptr && labels->labels.size() != states.size())) {
    throw ValidationError("truth csv: row count mismatch");
  }
  std::ofstream out = open_for_write(path);
  std::vector<std::string> cols = params_header(topo);
  for (int j = 0; j < kNumJoints; ++j) {
    cols.push_back(std::string("label_") + joint_name(static_cast<JointId>(j)));
  }
  write_header(out, cols);
  for (size_t i = 0; i < states.size(); ++i) {
    write_param_row(out, timestamps[i], states[i], topo);
    for (int j = 0; j < kNumJoints; ++j) {
      const int label = labels != nullptr ? static_cast<int>(labels->labels[i][j]) : 0;
      out << ',' << label;
    }
    out << '\n';
  }
}

void write_outlier_report_csv(const std::string& path, const StreamCleanReport& report) {
  std::ofstream out = open_for_write(path);
  out << "joint,rho,mu,sigma,x1,x2,n_flagged,n_total,warning\n";
  for (const JointCleanReport& jr : report.joints) {
    out << joint_name(jr.joint) << ',';
    if (jr.params) {
      out << format_double(jr.params->rho) << ',' << format_double(jr.params->mu) << ','
          << format_double(jr.params->sigma) << ',' << format_double(jr.params->x1) << ','
          << format_double(jr.params->x2);
    } else {
      out << ",,,,";
    }
    out << ',' << jr.n_flagged << ',' << jr.n_total << ',' << jr.warning << '\n';
  }
}

void write_metrics_csv(const std::string& path, const SessionMetrics& metrics) {
  std::ofstream out = open_for_write(path);
  out << "metric,value\n";
  out << "repetitions," << metrics.repetitions << '\n';
  out << "moving_time_s," << format_double(metrics.moving_time_s) << '\n';
  out << "moving_fraction," << format_double(metrics.moving_fraction) << '\n';
  out << '\n';
  out << "rank,joint,path_m\n";
  for (size_t i = 0; i < metrics.most_moving.size(); ++i) {
    out << (i + 1) << ',' << joint_name(metrics.most_moving[i].first) << ','
        << format_double(metrics.most_moving[i].second) << '\n';
  }
  out << '\n';
  out << "joint,extent_x_m,extent_y_m,extent_z_m,max_radial_m\n";
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& r = metrics.reachable[j];
    out << joint_name(static_cast<JointId>(j)) << ',' << format_double(r.extent.x()) << ','
        << format_double(r.extent.y()) << ',' << format_double(r.extent.z()) << ','
        << format_double(r.max_radial) << '\n';
  }
}

void write_accuracy_csv(const std::string& path, const AccuracyReport& report) {
  std::ofstream out = open_for_write(path);
  out << "joint,mean_mm,sd_mm,n\n";
  for (const JointOffsetStat& s : report.joint_offsets) {
    out << joint_name(s.joint) << ',' << format_double(s.mean_mm) << ','
        << format_double(s.sd_mm) << ',' << s.n << '\n';
  }
  out << '\n';
  out << "segment,mean_mm,sd_mm,n\n";
  for (const SegmentLengthStat& s : report.segment_lengths) {
    out << s.segment << ',' << format_double(s.mean_mm) << ',' << format_double(s.sd_mm)
        << ',' << s.n << '\n';
  }
  if (report.joint_offsets_no_outliers) {
    out << '\n';
    out << "joint_no_outliers,mean_mm,sd_mm,n\n";
    for (const JointOffsetStat& s : *report.joint_offsets_no_outliers) {
      out << joint_name(s.joint) << ',' << format_double(s.mean_mm) << ','
          << format_double(s.sd_mm) << ',' << s.n << '\n';
    }
  }
  if (!report.notices.empty()) {
    out << '\n';
    out << "notice\n";
    for (const std::string& n : report.notices) out << n << '\n';
  }
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diagnostics) {
  std::ofstream out = open_for_write(path);
  out << "pass,frame,trace_cov,n_observed_joints,innovation_norm\n";
  for (const StepDiagnostics& d : diagnostics) {
    out << d.pass << ',' << d.frame << ',' << format_double(d.trace_cov) << ','
        << d.n_observed_joints << ',' << format_double(d.innovation_norm) << '\n';
  }
}

}  // namespace mocap
