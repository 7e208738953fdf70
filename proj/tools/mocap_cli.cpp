// Command-line front end: synth | outliers | filter | fk | metrics | evaluate.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "mocap/clean.hpp"
#include "mocap/config.hpp"
#include "mocap/csv.hpp"
#include "mocap/errors.hpp"
#include "mocap/eval.hpp"
#include "mocap/kinematics.hpp"
#include "mocap/metrics.hpp"
#include "mocap/synth.hpp"
#include "mocap/ukf.hpp"

namespace {

struct CommonArgs {
  std::string input;
  std::string output;
  std::string report;
  std::string config_path;
  std::string topology_path;
  std::int64_t seed = -1;  // -1: keep the config value
};

mocap::SkeletonTopology load_topology(const CommonArgs& args) {
  if (!args.topology_path.empty()) {
    return mocap::SkeletonTopology::from_file(args.topology_path);
  }
  return mocap::SkeletonTopology::default_topology();
}

mocap::ToolConfig load_config(const CommonArgs& args) {
  if (!args.config_path.empty()) {
    return mocap::ToolConfig::from_file(args.config_path);
  }
  return mocap::ToolConfig();
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_input) {
  if (needs_input) {
    cmd->add_option("--input", args.input, "Input frame CSV")->required();
  }
  cmd->add_option("--config", args.config_path, "Configuration file");
  cmd->add_option("--topology", args.topology_path, "Topology file (default: built-in)");
  cmd->add_option("--seed", args.seed, "Override the synth/corruption seed");
}

int run(int argc, char** argv) {
  CLI::App app{"Skeletal motion-data processing toolkit"};
  app.require_subcommand(1);

  CommonArgs args;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic motion stream");
  add_common(synth, args, false);
  std::string truth_path;
  synth->add_option("--output", args.output, "Output frame CSV")->required();
  synth->add_option("--truth", truth_path, "Ground-truth sidecar CSV (states + labels)");

  // outliers
  auto* outliers = app.add_subcommand("outliers", "Remove tracking-loss outliers");
  add_common(outliers, args, true);
  outliers->add_option("--output", args.output, "Cleaned frame CSV")->required();
  outliers->add_option("--report", args.report, "Per-joint mixture report CSV");

  // filter
  auto* filter = app.add_subcommand("filter", "Four-pass kinematic filtering");
  add_common(filter, args, true);
  bool no_clean = false;
  std::string params_path;
  std::string diagnostics_path;
  filter->add_option("--output", args.output, "Smoothed positions CSV")->required();
  filter->add_option("--params", params_path,
                     "Kinematic parameter CSV (default: <output>.params.csv)");
  filter->add_option("--report", args.report, "Outlier-cleaning report CSV");
  filter->add_option("--diagnostics", diagnostics_path, "Per-step diagnostics CSV");
  filter->add_flag("--no-clean", no_clean, "Skip outlier cleaning before filtering");

  // fk
  auto* fk = app.add_subcommand("fk", "Forward kinematics from a parameter CSV");
  fk->add_option("--input", args.input, "Kinematic parameter CSV")->required();
  fk->add_option("--config", args.config_path, "Configuration file");
  fk->add_option("--topology", args.topology_path, "Topology file (default: built-in)");
  fk->add_option("--output", args.output, "Output frame CSV")->required();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Session performance metrics");
  add_common(metrics, args, true);
  std::string metrics_params;
  metrics->add_option("--params", metrics_params, "Optional kinematic parameter CSV");
  metrics->add_option("--report", args.report, "Metrics report CSV")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Two-stream accuracy evaluation");
  add_common(evaluate, args, true);
  std::string reference_path;
  bool no_align = false;
  bool exclude_outliers = false;
  std::string align_joints;
  evaluate->add_option("--reference", reference_path, "Reference frame CSV")->required();
  evaluate->add_option("--report", args.report, "Accuracy report CSV")->required();
  evaluate->add_flag("--no-align", no_align, "Skip rigid alignment");
  evaluate->add_flag("--exclude-outliers", exclude_outliers,
                     "Also report offsets with mixture-flagged outliers removed");
  evaluate->add_option("--align-joints", align_joints,
                       "Comma-separated joints used for alignment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // --help exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage problems are validation errors
  }

  const mocap::SkeletonTopology topo = load_topology(args);
  const mocap::ToolConfig config = load_config(args);

  if (synth->parsed()) {
    mocap::MotionSpec spec = config.motion_spec(topo);
    mocap::CorruptionSpec corruption = config.corruption_spec();
    if (args.seed >= 0) {
      spec.seed = static_cast<std::uint64_t>(args.seed);
      corruption.seed = spec.seed;
    } else {
      corruption.seed = spec.seed;
    }
    auto [stream, states] = mocap::generate_motion(spec, topo);
    auto [corrupted, labels] = mocap::corrupt_stream(stream, corruption);
    mocap::write_frame_csv(args.output, corrupted);
    if (!truth_path.empty()) {
      std::vector<double> ts;
      for (const auto& f : stream.frames) ts.push_back(f.t);
      mocap::write_truth_csv(truth_path, topo, ts, states, &labels);
    }
    return 0;
  }

  if (outliers->parsed()) {
    const mocap::FrameStream stream = mocap::read_frame_csv(args.input, topo);
    auto [cleaned, report] = mocap::clean_stream(stream, config.clean_config());
    mocap::write_frame_csv(args.output, cleaned);
    if (!args.report.empty()) mocap::write_outlier_report_csv(args.report, report);
    return 0;
  }

  if (filter->parsed()) {
    mocap::FrameStream stream = mocap::read_frame_csv(args.input, topo);
    if (!no_clean) {
      auto [cleaned, report] = mocap::clean_stream(stream, config.clean_config());
      stream = std::move(cleaned);
      if (!args.report.empty()) mocap::write_outlier_report_csv(args.report, report);
    }
    const mocap::FilterResult result =
        mocap::four_pass_filter(stream, topo, config.ukf_config());

    mocap::FrameStream smoothed;
    smoothed.topology = topo;
    smoothed.nominal_rate = stream.nominal_rate;
    for (size_t i = 0; i < result.trajectory.size(); ++i) {
      mocap::Frame frame;
      frame.t = result.timestamps[i];
      const auto positions = mocap::forward_kinematics(result.trajectory[i], topo);
      for (int j = 0; j < mocap::kNumJoints; ++j) {
        frame.pos[j] = positions[j];
        frame.conf[j] = mocap::Confidence::Tracked;
      }
      smoothed.frames.push_back(std::move(frame));
    }
    mocap::write_frame_csv(args.output, smoothed);

    const std::string params_out =
        params_path.empty() ? args.output + ".params.csv" : params_path;
    mocap::write_params_csv(params_out, topo, result.timestamps, result.trajectory);
    if (!diagnostics_path.empty()) {
      mocap::write_diagnostics_csv(diagnostics_path, result.diagnostics);
    }
    return 0;
  }

  if (fk->parsed()) {
    auto [ts, states] = mocap::read_params_csv(args.input, topo);
    mocap::FrameStream stream;
    stream.topology = topo;
    if (ts.size() >= 2 && ts.back() > ts.front()) {
      stream.nominal_rate = (ts.size() - 1) / (ts.back() - ts.front());
    }
    for (size_t i = 0; i < states.size(); ++i) {
      mocap::Frame frame;
      frame.t = ts[i];
      const auto positions = mocap::forward_kinematics(states[i], topo);
      for (int j = 0; j < mocap::kNumJoints; ++j) {
        frame.pos[j] = positions[j];
        frame.conf[j] = mocap::Confidence::Tracked;
      }
      stream.frames.push_back(std::move(frame));
    }
    mocap::write_frame_csv(args.output, stream);
    return 0;
  }

  if (metrics->parsed()) {
    const mocap::FrameStream stream = mocap::read_frame_csv(args.input, topo);
    std::vector<mocap::KinematicState> states;
    const std::vector<mocap::KinematicState>* states_ptr = nullptr;
    if (!metrics_params.empty()) {
      auto [ts, loaded] = mocap::read_params_csv(metrics_params, topo);
      states = std::move(loaded);
      states_ptr = &states;
    }
    const mocap::SessionMetrics result =
        mocap::compute_session_metrics(stream, states_ptr, config.metrics_config());
    mocap::write_metrics_csv(args.report, result);
    return 0;
  }

  if (evaluate->parsed()) {
    const mocap::FrameStream test = mocap::read_frame_csv(args.input, topo);
    const mocap::FrameStream reference = mocap::read_frame_csv(reference_path, topo);
    mocap::EvalConfig eval_config = config.eval_config();
    if (no_align) eval_config.align = false;
    if (exclude_outliers) eval_config.exclude_outliers = true;
    if (!align_joints.empty()) {
      eval_config.align_joints.clear();
      std::string value = align_joints;
      std::replace(value.begin(), value.end(), ',', ' ');
      std::istringstream ss(value);
      std::string name;
      while (ss >> name) {
        const auto j = mocap::parse_joint(name);
        if (!j) {
          throw mocap::ValidationError("--align-joints: unknown joint '" + name + "'");
        }
        eval_config.align_joints.push_back(*j);
      }
    }
    const mocap::AccuracyReport report = mocap::evaluate_accuracy(test, reference, eval_config);
    mocap::write_accuracy_csv(args.report, report);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mocap::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const mocap::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
