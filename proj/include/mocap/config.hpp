#pragma once

#include <map>
#include <string>

#include "mocap/clean.hpp"
#include "mocap/eval.hpp"
#include "mocap/metrics.hpp"
#include "mocap/synth.hpp"
#include "mocap/ukf.hpp"

namespace mocap {

// Line-oriented `section.key = value` configuration covering every exposed
// default (ukf.*, outlier.*, metrics.*, eval.*, synth.*). Unknown keys are
// rejected with their line number; values are validated by the owning
// module when the typed section is built.
class ToolConfig {
 public:
  ToolConfig() = default;  // all defaults
  static ToolConfig from_file(const std::string& path);

  UkfConfig ukf_config() const;
  CleanConfig clean_config() const;
  MetricsConfig metrics_config() const;
  EvalConfig eval_config() const;
  MotionSpec motion_spec(const SkeletonTopology& topo) const;
  CorruptionSpec corruption_spec() const;

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

 private:
  struct Entry {
    std::string value;
    int line;
  };

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

  std::map<std::string, Entry> entries_;
  std::string path_ = "<defaults>";
};

}  // namespace mocap
