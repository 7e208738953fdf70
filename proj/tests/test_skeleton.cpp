#include "mocap/skeleton.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "mocap/errors.hpp"

using mocap::JointId;
using mocap::SkeletonTopology;

TEST(Skeleton, DefaultTopologyShape) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  EXPECT_EQ(topo.num_joints(), 20);
  EXPECT_EQ(topo.num_segments(), 19);
  EXPECT_EQ(topo.evaluation_segments().size(), 14u);
  EXPECT_FALSE(topo.has_parent(JointId::ROOT));
  EXPECT_EQ(topo.segment_of_child(JointId::ROOT), -1);
}

TEST(Skeleton, DofAndParentAssignment) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();

  const struct {
    JointId joint;
    JointId parent;
    int dof;
  } expected[] = {
      {JointId::SPINE, JointId::ROOT, 3},  {JointId::NECK, JointId::SPINE, 3},
      {JointId::SHO_L, JointId::NECK, 3},  {JointId::SHO_R, JointId::NECK, 3},
      {JointId::HIP_L, JointId::ROOT, 3},  {JointId::HIP_R, JointId::ROOT, 3},
      {JointId::ELB_L, JointId::SHO_L, 1}, {JointId::ELB_R, JointId::SHO_R, 1},
      {JointId::KNE_L, JointId::HIP_L, 1}, {JointId::KNE_R, JointId::HIP_R, 1},
      {JointId::WRI_L, JointId::ELB_L, 2}, {JointId::WRI_R, JointId::ELB_R, 2},
      {JointId::ANK_L, JointId::KNE_L, 2}, {JointId::ANK_R, JointId::KNE_R, 2},
  };
  for (const auto& e : expected) {
    EXPECT_EQ(topo.parent(e.joint), e.parent) << joint_name(e.joint);
    EXPECT_EQ(topo.dof(e.joint), e.dof) << joint_name(e.joint);
  }
}

TEST(Skeleton, EvaluationSegmentNames) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  for (const char* name : {"ARM_UP_L", "ARM_LO_L", "HAND_L", "PELVIC_L", "LEG_UP_L",
                           "LEG_LO_L", "FOOT_L", "ARM_UP_R", "ARM_LO_R", "HAND_R",
                           "PELVIC_R", "LEG_UP_R", "LEG_LO_R", "FOOT_R"}) {
    const int s = topo.segment_by_name(name);
    ASSERT_GE(s, 0) << name;
    EXPECT_TRUE(topo.segment(s).evaluation) << name;
  }
  // Torso edges are not part of the evaluation set.
  EXPECT_FALSE(topo.segment(topo.segment_by_name("SPINE")).evaluation);
}

TEST(Skeleton, SegmentsAreParentBeforeChild) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  for (const mocap::Segment& seg : topo.segments()) {
    EXPECT_LT(joint_index(seg.parent), joint_index(seg.child));
  }
}

TEST(Skeleton, ReorderedTreeGetsTopologicalSegmentOrder) {
  // A valid tree where a child joint's canonical index precedes its
  // parent's: ELB_L hangs off WRI_L.
  const SkeletonTopology base = SkeletonTopology::default_topology();
  std::vector<std::tuple<JointId, JointId, int>> edges;
  for (const mocap::Segment& s : base.segments()) {
    if (s.child == JointId::ELB_L) {
      edges.emplace_back(JointId::ELB_L, JointId::WRI_L, 1);
    } else if (s.child == JointId::WRI_L) {
      edges.emplace_back(JointId::WRI_L, JointId::SHO_L, 2);
    } else {
      edges.emplace_back(s.child, s.parent, s.dof);
    }
  }
  const SkeletonTopology topo = SkeletonTopology::from_edges(edges);
  EXPECT_LT(topo.segment_of_child(JointId::WRI_L), topo.segment_of_child(JointId::ELB_L));

  std::array<bool, mocap::kNumJoints> placed{};
  placed[joint_index(JointId::ROOT)] = true;
  for (const mocap::Segment& s : topo.segments()) {
    EXPECT_TRUE(placed[joint_index(s.parent)]) << s.name;
    placed[joint_index(s.child)] = true;
  }
}

TEST(Skeleton, CycleRejected) {
  const SkeletonTopology base = SkeletonTopology::default_topology();
  std::vector<std::tuple<JointId, JointId, int>> edges;
  for (const mocap::Segment& s : base.segments()) {
    if (s.child == JointId::ELB_L) {
      edges.emplace_back(JointId::ELB_L, JointId::WRI_L, 1);  // ELB <-> WRI cycle
    } else {
      edges.emplace_back(s.child, s.parent, s.dof);
    }
  }
  try {
    SkeletonTopology::from_edges(edges);
    FAIL() << "expected ValidationError";
  } catch (const mocap::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos) << e.what();
  }
}

TEST(Skeleton, JointNameRoundTrip) {
  for (int i = 0; i < mocap::kNumJoints; ++i) {
    const JointId id = static_cast<JointId>(i);
    const auto parsed = mocap::parse_joint(mocap::joint_name(id));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, id);
  }
  EXPECT_FALSE(mocap::parse_joint("PELVIS").has_value());
}

TEST(Skeleton, RejectsDuplicateAndMissingEdges) {
  auto edges = [] {
    std::vector<std::tuple<JointId, JointId, int>> out;
    const SkeletonTopology topo = SkeletonTopology::default_topology();
    for (const mocap::Segment& s : topo.segments()) {
      out.emplace_back(s.child, s.parent, s.dof);
    }
    return out;
  }();

  auto too_few = edges;
  too_few.pop_back();
  EXPECT_THROW(SkeletonTopology::from_edges(too_few), mocap::ValidationError);

  auto duplicated = edges;
  duplicated.back() = duplicated.front();
  EXPECT_THROW(SkeletonTopology::from_edges(duplicated), mocap::ValidationError);

  auto root_child = edges;
  root_child[0] = {JointId::ROOT, JointId::SPINE, 3};
  EXPECT_THROW(SkeletonTopology::from_edges(root_child), mocap::ValidationError);

  auto bad_dof = edges;
  std::get<2>(bad_dof[0]) = 4;
  EXPECT_THROW(SkeletonTopology::from_edges(bad_dof), mocap::ValidationError);
}

TEST(Skeleton, TopologyFileRoundTripAndErrors) {
  const SkeletonTopology topo = SkeletonTopology::default_topology();
  const std::string path = testing::TempDir() + "topology_test.txt";
  {
    std::ofstream out(path);
    out << "# default skeleton\n";
    for (const mocap::Segment& s : topo.segments()) {
      out << joint_name(s.child) << ' ' << joint_name(s.parent) << ' ' << s.dof << "\n";
    }
  }
  const SkeletonTopology loaded = SkeletonTopology::from_file(path);
  EXPECT_TRUE(loaded == topo);

  {
    std::ofstream out(path);
    out << "SPINE ROOT 3\nNECK SPINE nope\n";
  }
  try {
    SkeletonTopology::from_file(path);
    FAIL() << "expected ValidationError";
  } catch (const mocap::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }

  std::remove(path.c_str());
  EXPECT_THROW(SkeletonTopology::from_file(path), mocap::ValidationError);
}
