#include "mocap/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

const char* const kKnownKeys[] = {
    "ukf.alpha",
    "ukf.beta",
    "ukf.kappa",
    "ukf.process_sd_root",
    "ukf.process_sd_length",
    "ukf.process_sd_quat",
    "ukf.measurement_sd",
    "ukf.init_sd_root",
    "ukf.init_sd_length",
    "ukf.init_sd_quat",
    "ukf.quat_sd_cap",
    "ukf.freeze_lengths",
    "outlier.window",
    "outlier.threshold",
    "outlier.max_flag_fraction",
    "outlier.em_max_iterations",
    "outlier.em_tolerance",
    "outlier.em_init_rho",
    "outlier.em_min_samples",
    "metrics.prominence_min_rad",
    "metrics.prominence_min_m",
    "metrics.min_period_s",
    "metrics.speed_min",
    "eval.align",
    "eval.align_joints",
    "eval.align_frames",
    "eval.exclude_outliers",
    "synth.duration_s",
    "synth.rate_hz",
    "synth.seed",
    "synth.root_x",
    "synth.root_y",
    "synth.root_z",
    "synth.root_mode",
    "synth.root_velocity",
    "synth.root_axis",
    "synth.root_amplitude_m",
    "synth.root_freq_hz",
    "synth.root_phase_rad",
    "synth.gaussian_sd",
    "synth.outlier_rate",
    "synth.outlier_halfwidth",
    "synth.lost_rate",
};

// synth.osc.<SEGMENT> and synth.length.<SEGMENT> are keyed by segment name
// and validated against the topology when the motion spec is built.
bool key_is_known(const std::string& key) {
  if (std::any_of(std::begin(kKnownKeys), std::end(kKnownKeys),
                  [&](const char* k) { return key == k; })) {
    return true;
  }
  return key.rfind("synth.osc.", 0) == 0 || key.rfind("synth.length.", 0) == 0;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_double_list(const std::string& value) {
  std::istringstream ss(value);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  std::string rest;
  if (ss >> rest) return {};  // trailing junk
  return out;
}

}  // namespace

ToolConfig ToolConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("config: cannot open " + path);
  }
  ToolConfig config;
  config.path_ = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": expected 'section.key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!key_is_known(key)) {
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": unknown key '" + key + "'");
    }
    if (config.entries_.count(key) > 0) {
      throw ValidationError(path + ": line " + std::to_string(lineno) +
                            ": duplicate key '" + key + "'");
    }
    config.entries_[key] = {value, lineno};
  }
  return config;
}

void ToolConfig::fail(const std::string& key, const std::string& why) const {
  const auto it = entries_.find(key);
  const std::string where =
      it != entries_.end() ? path_ + ": line " + std::to_string(it->second.line) : path_;
  throw ValidationError(where + ": key '" + key + "': " + why);
}

double ToolConfig::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  double v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(key, "cannot parse '" + s + "' as a number");
  }
  return v;
}

int ToolConfig::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  int v;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(key, "cannot parse '" + s + "' as an integer");
  }
  return v;
}

bool ToolConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(key, "expected true/false");
}

std::string ToolConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it != entries_.end() ? it->second.value : fallback;
}

UkfConfig ToolConfig::ukf_config() const {
  UkfConfig c;
  c.alpha = get_double("ukf.alpha", c.alpha);
  c.beta = get_double("ukf.beta", c.beta);
  c.kappa = get_double("ukf.kappa", c.kappa);
  c.process_sd_root = get_double("ukf.process_sd_root", c.process_sd_root);
  c.process_sd_length = get_double("ukf.process_sd_length", c.process_sd_length);
  c.process_sd_quat = get_double("ukf.process_sd_quat", c.process_sd_quat);
  c.measurement_sd = get_double("ukf.measurement_sd", c.measurement_sd);
  c.init_sd_root = get_double("ukf.init_sd_root", c.init_sd_root);
  c.init_sd_length = get_double("ukf.init_sd_length", c.init_sd_length);
  c.init_sd_quat = get_double("ukf.init_sd_quat", c.init_sd_quat);
  c.quat_sd_cap = get_double("ukf.quat_sd_cap", c.quat_sd_cap);
  c.freeze_lengths = get_bool("ukf.freeze_lengths", c.freeze_lengths);
  c.validate();
  return c;
}

CleanConfig ToolConfig::clean_config() const {
  CleanConfig c;
  c.window = get_int("outlier.window", c.window);
  c.threshold = get_double("outlier.threshold", c.threshold);
  c.max_flag_fraction = get_double("outlier.max_flag_fraction", c.max_flag_fraction);
  c.em.max_iterations = get_int("outlier.em_max_iterations", c.em.max_iterations);
  c.em.tolerance = get_double("outlier.em_tolerance", c.em.tolerance);
  c.em.init_rho = get_double("outlier.em_init_rho", c.em.init_rho);
  c.em.min_samples = get_int("outlier.em_min_samples", c.em.min_samples);
  c.validate();
  return c;
}

MetricsConfig ToolConfig::metrics_config() const {
  MetricsConfig c;
  c.prominence_min_rad = get_double("metrics.prominence_min_rad", c.prominence_min_rad);
  c.prominence_min_m = get_double("metrics.prominence_min_m", c.prominence_min_m);
  c.min_period_s = get_double("metrics.min_period_s", c.min_period_s);
  c.speed_min = get_double("metrics.speed_min", c.speed_min);
  c.validate();
  return c;
}

EvalConfig ToolConfig::eval_config() const {
  EvalConfig c;
  c.align = get_bool("eval.align", c.align);
  c.align_frames = get_int("eval.align_frames", c.align_frames);
  c.exclude_outliers = get_bool("eval.exclude_outliers", c.exclude_outliers);
  if (has("eval.align_joints")) {
    c.align_joints.clear();
    std::string value = get_string("eval.align_joints", "");
    std::replace(value.begin(), value.end(), ',', ' ');
    std::istringstream ss(value);
    std::string name;
    while (ss >> name) {
      const auto j = parse_joint(name);
      if (!j) fail("eval.align_joints", "unknown joint '" + name + "'");
      c.align_joints.push_back(*j);
    }
    if (c.align_joints.empty()) fail("eval.align_joints", "empty joint list");
  }
  c.validate();
  return c;
}

MotionSpec ToolConfig::motion_spec(const SkeletonTopology& topo) const {
  MotionSpec spec = default_motion_spec(topo);
  spec.duration_s = get_double("synth.duration_s", spec.duration_s);
  spec.rate_hz = get_double("synth.rate_hz", spec.rate_hz);
  spec.seed = static_cast<std::uint64_t>(get_int("synth.seed", static_cast<int>(spec.seed)));
  spec.base.root_pos.x() = get_double("synth.root_x", spec.base.root_pos.x());
  spec.base.root_pos.y() = get_double("synth.root_y", spec.base.root_pos.y());
  spec.base.root_pos.z() = get_double("synth.root_z", spec.base.root_pos.z());

  const std::string mode = get_string("synth.root_mode", "constant");
  if (mode == "constant") {
    spec.root_mode = RootMode::Constant;
  } else if (mode == "linear") {
    spec.root_mode = RootMode::Linear;
  } else if (mode == "sinusoid") {
    spec.root_mode = RootMode::Sinusoid;
  } else {
    fail("synth.root_mode", "expected constant|linear|sinusoid");
  }
  if (has("synth.root_velocity")) {
    const auto v = parse_double_list(get_string("synth.root_velocity", ""));
    if (v.size() != 3) fail("synth.root_velocity", "expected 'vx vy vz'");
    spec.root_velocity = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  if (has("synth.root_axis")) {
    const auto v = parse_double_list(get_string("synth.root_axis", ""));
    if (v.size() != 3) fail("synth.root_axis", "expected 'x y z'");
    spec.root_axis = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  spec.root_amplitude_m = get_double("synth.root_amplitude_m", spec.root_amplitude_m);
  spec.root_freq_hz = get_double("synth.root_freq_hz", spec.root_freq_hz);
  spec.root_phase_rad = get_double("synth.root_phase_rad", spec.root_phase_rad);

  // Per-segment overrides. Any synth.osc.* key replaces the default
  // oscillation set entirely.
  const bool osc_overridden =
      std::any_of(entries_.begin(), entries_.end(), [](const auto& kv) {
        return kv.first.rfind("synth.osc.", 0) == 0;
      });
  if (osc_overridden) spec.oscillations.clear();
  for (const auto& [key, entry] : entries_) {
    if (key.rfind("synth.length.", 0) == 0) {
      const std::string seg_name = key.substr(std::string("synth.length.").size());
      const int s = topo.segment_by_name(seg_name);
      if (s < 0) fail(key, "unknown segment '" + seg_name + "'");
      const double len = get_double(key, 0.0);
      if (!(len > 0.0)) fail(key, "length must be > 0");
      spec.base.lengths[s] = len;
    } else if (key.rfind("synth.osc.", 0) == 0) {
      const std::string seg_name = key.substr(std::string("synth.osc.").size());
      const int s = topo.segment_by_name(seg_name);
      if (s < 0) fail(key, "unknown segment '" + seg_name + "'");
      const auto v = parse_double_list(entry.value);
      if (v.size() != 6) {
        fail(key, "expected 'ax ay az amplitude_rad freq_hz phase_rad'");
      }
      Oscillation osc;
      osc.segment = s;
      osc.axis = Eigen::Vector3d(v[0], v[1], v[2]);
      osc.amplitude_rad = v[3];
      osc.freq_hz = v[4];
      osc.phase_rad = v[5];
      spec.oscillations.push_back(osc);
    }
  }
  spec.validate(topo);
  return spec;
}

CorruptionSpec ToolConfig::corruption_spec() const {
  CorruptionSpec c = default_corruption_spec();
  c.gaussian_sd = get_double("synth.gaussian_sd", c.gaussian_sd);
  c.outlier_rate = get_double("synth.outlier_rate", c.outlier_rate);
  c.outlier_halfwidth = get_double("synth.outlier_halfwidth", c.outlier_halfwidth);
  c.lost_rate = get_double("synth.lost_rate", c.lost_rate);
  c.seed = static_cast<std::uint64_t>(get_int("synth.seed", static_cast<int>(c.seed)));
  c.validate();
  return c;
}

}  // namespace mocap
