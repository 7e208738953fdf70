#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "mocap/config.hpp"
#include "mocap/csv.hpp"
#include "mocap/errors.hpp"
#include "mocap/synth.hpp"

using mocap::SkeletonTopology;
using mocap::ToolConfig;

namespace {

std::string temp_path(const std::string& name) { return testing::TempDir() + name; }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

mocap::FrameStream sample_stream(double lost_rate = 0.0) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.duration_s = 3.0;
  auto [stream, states] = generate_motion(spec, topo);
  if (lost_rate > 0.0) {
    mocap::CorruptionSpec cs;
    cs.lost_rate = lost_rate;
    cs.seed = 3;
    auto [corrupted, labels] = corrupt_stream(stream, cs);
    return corrupted;
  }
  return stream;
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.0, -0.0, 1.0, -1.5, 0.1, 1e-300, 1.7976931348623157e308,
                   3.141592653589793, 1.0 / 3.0}) {
    const std::string s = mocap::format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(mocap::format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(FrameCsv, RoundTripBitExact) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const mocap::FrameStream stream = sample_stream(0.03);  // includes Lost/NaN
  const std::string path = temp_path("frames.csv");
  write_frame_csv(path, stream);
  const mocap::FrameStream back = read_frame_csv(path, topo);

  ASSERT_EQ(back.size(), stream.size());
  for (int k = 0; k < stream.size(); ++k) {
    EXPECT_EQ(back.frames[k].t, stream.frames[k].t);
    for (int j = 0; j < mocap::kNumJoints; ++j) {
      EXPECT_EQ(back.frames[k].conf[j], stream.frames[k].conf[j]);
      for (int a = 0; a < 3; ++a) {
        const double x = stream.frames[k].pos[j][a];
        const double y = back.frames[k].pos[j][a];
        if (std::isnan(x)) {
          EXPECT_TRUE(std::isnan(y));
        } else {
          EXPECT_EQ(x, y);  // bit-exact for finite values
        }
      }
    }
  }
  std::remove(path.c_str());
}

TEST(FrameCsv, ConfidenceColumnsOptional) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const std::string path = temp_path("noconf.csv");
  std::ofstream out(path);
  out << "t";
  for (int j = 0; j < mocap::kNumJoints; ++j) {
    const std::string n = joint_name(static_cast<mocap::JointId>(j));
    out << ',' << n << "_x," << n << "_y," << n << "_z";
  }
  out << "\n0";
  for (int j = 0; j < mocap::kNumJoints; ++j) out << ",1,2," << j;
  out << "\n";
  out.close();

  const mocap::FrameStream stream = read_frame_csv(path, topo);
  ASSERT_EQ(stream.size(), 1);
  for (int j = 0; j < mocap::kNumJoints; ++j) {
    EXPECT_EQ(stream.frames[0].conf[j], mocap::Confidence::Tracked);
  }
  std::remove(path.c_str());
}

TEST(FrameCsv, MalformedInputsNameTheLine) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const std::string path = temp_path("bad.csv");

  write_file(path, "t,WRONG_x\n");
  EXPECT_THROW(read_frame_csv(path, topo), mocap::ValidationError);

  // Correct header, bad cell on line 3.
  const mocap::FrameStream stream = sample_stream();
  write_frame_csv(path, stream);
  {
    std::ifstream in(path);
    std::string header, row1;
    std::getline(in, header);
    std::getline(in, row1);
    std::ofstream out(path);
    std::string broken = row1;
    broken[broken.rfind(',') + 1] = 'x';
    out << header << "\n" << row1 << "\n" << broken << "\n";
  }
  try {
    read_frame_csv(path, topo);
    FAIL() << "expected ValidationError";
  } catch (const mocap::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::remove(path.c_str());

  EXPECT_THROW(read_frame_csv(temp_path("missing_file.csv"), topo),
               mocap::ValidationError);
}

TEST(ParamsCsv, RoundTrip) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  auto spec = mocap::default_motion_spec(topo);
  spec.duration_s = 2.0;
  const auto [stream, states] = generate_motion(spec, topo);
  std::vector<double> ts;
  for (const auto& f : stream.frames) ts.push_back(f.t);

  const std::string path = temp_path("params.csv");
  write_params_csv(path, topo, ts, states);
  const auto [ts_back, states_back] = read_params_csv(path, topo);

  ASSERT_EQ(states_back.size(), states.size());
  for (size_t k = 0; k < states.size(); ++k) {
    EXPECT_EQ(ts_back[k], ts[k]);
    EXPECT_EQ(states_back[k].root_pos, states[k].root_pos);
    for (int s = 0; s < topo.num_segments(); ++s) {
      EXPECT_EQ(states_back[k].lengths[s], states[k].lengths[s]);
      const mocap::Quat a = states[k].quats[s].canonical();
      const mocap::Quat b = states_back[k].quats[s];
      EXPECT_EQ(a.w, b.w);
      EXPECT_EQ(a.x, b.x);
      EXPECT_EQ(a.y, b.y);
      EXPECT_EQ(a.z, b.z);
    }
  }
  std::remove(path.c_str());
}

TEST(Config, DefaultsAreValid) {
  const ToolConfig config;
  EXPECT_NO_THROW(config.ukf_config());
  EXPECT_NO_THROW(config.clean_config());
  EXPECT_NO_THROW(config.metrics_config());
  EXPECT_NO_THROW(config.eval_config());
  EXPECT_NO_THROW(config.corruption_spec());
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  EXPECT_NO_THROW(config.motion_spec(topo));
}

TEST(Config, ParsesSectionsAndOverrides) {
  const std::string path = temp_path("config.cfg");
  write_file(path,
             "# comment line\n"
             "ukf.measurement_sd = 0.01\n"
             "ukf.alpha=0.5\n"
             "outlier.window = 15\n"
             "metrics.speed_min = 0.1\n"
             "eval.align = false\n"
             "eval.align_joints = ROOT,SPINE,NECK\n"
             "synth.duration_s = 5\n"
             "synth.osc.ARM_UP_R = 0 1 0 0.3 0.5 0\n"
             "synth.length.HEAD = 0.2\n"
             "synth.gaussian_sd = 0\n");
  const ToolConfig config = ToolConfig::from_file(path);

  EXPECT_EQ(config.ukf_config().measurement_sd, 0.01);
  EXPECT_EQ(config.ukf_config().alpha, 0.5);
  EXPECT_EQ(config.clean_config().window, 15);
  EXPECT_EQ(config.metrics_config().speed_min, 0.1);
  EXPECT_FALSE(config.eval_config().align);
  EXPECT_EQ(config.eval_config().align_joints.size(), 3u);
  EXPECT_EQ(config.corruption_spec().gaussian_sd, 0.0);

  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const mocap::MotionSpec spec = config.motion_spec(topo);
  EXPECT_EQ(spec.duration_s, 5.0);
  // Explicit oscillations replace the default set.
  ASSERT_EQ(spec.oscillations.size(), 1u);
  EXPECT_EQ(spec.oscillations[0].segment, topo.segment_by_name("ARM_UP_R"));
  EXPECT_EQ(spec.base.lengths[topo.segment_by_name("HEAD")], 0.2);
  std::remove(path.c_str());
}

TEST(Config, UnknownKeyNamesTheLine) {
  const std::string path = temp_path("bad.cfg");
  write_file(path, "ukf.alpha = 0.5\nukf.alhpa = 0.5\n");
  try {
    ToolConfig::from_file(path);
    FAIL() << "expected ValidationError";
  } catch (const mocap::ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 2"), std::string::npos) << what;
    EXPECT_NE(what.find("ukf.alhpa"), std::string::npos) << what;
  }
  std::remove(path.c_str());
}

TEST(Config, BadValuesNameKeyAndLine) {
  const std::string path = temp_path("badval.cfg");
  write_file(path, "ukf.alpha = banana\n");
  const ToolConfig config = ToolConfig::from_file(path);
  try {
    config.ukf_config();
    FAIL() << "expected ValidationError";
  } catch (const mocap::ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 1"), std::string::npos) << what;
    EXPECT_NE(what.find("ukf.alpha"), std::string::npos) << what;
  }

  // Values violating module invariants are rejected by the owning module.
  write_file(path, "ukf.alpha = 7\n");
  EXPECT_THROW(ToolConfig::from_file(path).ukf_config(), mocap::ValidationError);
  write_file(path, "outlier.window = 4\n");
  EXPECT_THROW(ToolConfig::from_file(path).clean_config(), mocap::ValidationError);
  write_file(path, "synth.osc.NOSUCH = 1 0 0 0.1 1 0\n");
  EXPECT_THROW(ToolConfig::from_file(path).motion_spec(SkeletonTopology::default_topology()),
               mocap::ValidationError);
  std::remove(path.c_str());
}

TEST(Config, DuplicateAndMalformedLinesRejected) {
  const std::string path = temp_path("dup.cfg");
  write_file(path, "ukf.alpha = 0.5\nukf.alpha = 0.6\n");
  EXPECT_THROW(ToolConfig::from_file(path), mocap::ValidationError);
  write_file(path, "just some text\n");
  EXPECT_THROW(ToolConfig::from_file(path), mocap::ValidationError);
  std::remove(path.c_str());
}
