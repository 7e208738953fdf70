#include "mocap/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "mocap/errors.hpp"

namespace mocap {

namespace {

constexpr const char* kJointNames[kNumJoints] = {
    "ROOT",  "SPINE", "NECK",  "HEAD",  "SHO_L", "SHO_R", "ELB_L",
    "ELB_R", "WRI_L", "WRI_R", "HAN_L", "HAN_R", "HIP_L", "HIP_R",
    "KNE_L", "KNE_R", "ANK_L", "ANK_R", "FOO_L", "FOO_R"};

struct EdgeSpec {
  JointId child;
  JointId parent;
  int dof;
  const char* segment_name;  // nullptr -> named after the child joint
};

// Default tree. The 14 named segments are the bone-length evaluation set;
// DoF labels follow the standard assignment (HEAD/HAN/FOO have none in that
// taxonomy and are carried as 3-DoF leaf segments).
const EdgeSpec kDefaultEdges[] = {
    {JointId::SPINE, JointId::ROOT, 3, nullptr},
    {JointId::NECK, JointId::SPINE, 3, nullptr},
    {JointId::HEAD, JointId::NECK, 3, nullptr},
    {JointId::SHO_L, JointId::NECK, 3, nullptr},
    {JointId::SHO_R, JointId::NECK, 3, nullptr},
    {JointId::ELB_L, JointId::SHO_L, 1, "ARM_UP_L"},
    {JointId::ELB_R, JointId::SHO_R, 1, "ARM_UP_R"},
    {JointId::WRI_L, JointId::ELB_L, 2, "ARM_LO_L"},
    {JointId::WRI_R, JointId::ELB_R, 2, "ARM_LO_R"},
    {JointId::HAN_L, JointId::WRI_L, 3, "HAND_L"},
    {JointId::HAN_R, JointId::WRI_R, 3, "HAND_R"},
    {JointId::HIP_L, JointId::ROOT, 3, "PELVIC_L"},
    {JointId::HIP_R, JointId::ROOT, 3, "PELVIC_R"},
    {JointId::KNE_L, JointId::HIP_L, 1, "LEG_UP_L"},
    {JointId::KNE_R, JointId::HIP_R, 1, "LEG_UP_R"},
    {JointId::ANK_L, JointId::KNE_L, 2, "LEG_LO_L"},
    {JointId::ANK_R, JointId::KNE_R, 2, "LEG_LO_R"},
    {JointId::FOO_L, JointId::ANK_L, 3, "FOOT_L"},
    {JointId::FOO_R, JointId::ANK_R, 3, "FOOT_R"},
};

std::string default_segment_name(JointId child, JointId parent) {
  for (const EdgeSpec& e : kDefaultEdges) {
    if (e.child == child && e.parent == parent && e.segment_name != nullptr) {
      return e.segment_name;
    }
  }
  // Torso edges keep the child joint's name; non-default edges get a
  // SEG_ prefix so segment and joint namespaces stay distinguishable.
  for (const EdgeSpec& e : kDefaultEdges) {
    if (e.child == child && e.parent == parent) return joint_name(child);
  }
  return std::string("SEG_") + joint_name(child);
}

bool is_evaluation_name(const std::string& name) {
  static const char* kEval[] = {"ARM_UP_L", "ARM_LO_L", "HAND_L", "PELVIC_L",
                                "LEG_UP_L", "LEG_LO_L", "FOOT_L", "ARM_UP_R",
                                "ARM_LO_R", "HAND_R",   "PELVIC_R", "LEG_UP_R",
                                "LEG_LO_R", "FOOT_R"};
  return std::any_of(std::begin(kEval), std::end(kEval),
                     [&](const char* n) { return name == n; });
}

}  // namespace

const char* joint_name(JointId id) { return kJointNames[joint_index(id)]; }

SkeletonTopology::SkeletonTopology() { *this = default_topology(); }

std::optional<JointId> parse_joint(std::string_view name) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (name == kJointNames[i]) return static_cast<JointId>(i);
  }
  return std::nullopt;
}

SkeletonTopology SkeletonTopology::default_topology() {
  std::vector<std::tuple<JointId, JointId, int>> edges;
  edges.reserve(std::size(kDefaultEdges));
  for (const EdgeSpec& e : kDefaultEdges) edges.emplace_back(e.child, e.parent, e.dof);
  return from_edges(edges);
}

SkeletonTopology SkeletonTopology::from_edges(
    const std::vector<std::tuple<JointId, JointId, int>>& edges) {
  if (edges.size() != kNumJoints - 1) {
    throw ValidationError("topology: expected " + std::to_string(kNumJoints - 1) +
                          " edges, got " + std::to_string(edges.size()));
  }

  std::array<int, kNumJoints> parent;
  std::array<int, kNumJoints> dof;
  parent.fill(-1);
  dof.fill(0);

  for (const auto& [child, par, d] : edges) {
    const int c = joint_index(child);
    if (child == JointId::ROOT) {
      throw ValidationError("topology: ROOT cannot have a parent");
    }
    if (parent[c] != -1) {
      throw ValidationError(std::string("topology: duplicate edge for joint ") +
                            joint_name(child));
    }
    if (d < 1 || d > 3) {
      throw ValidationError(std::string("topology: DoF of ") + joint_name(child) +
                            " must be 1, 2, or 3");
    }
    parent[c] = joint_index(par);
    dof[c] = d;
  }

  for (int i = 1; i < kNumJoints; ++i) {
    if (parent[i] == -1) {
      throw ValidationError(std::string("topology: joint ") +
                            kJointNames[i] + " has no parent edge");
    }
  }

  SkeletonTopology topo{Uninitialized{}};
  topo.parent_ = parent;
  topo.dof_ = dof;
  topo.segment_of_child_.fill(-1);

  // Segments in topological order (parents always placed first) so a single
  // forward sweep is a valid tree traversal. Joints are taken in canonical
  // order within each round, which makes the ordering deterministic and
  // leaves the default topology in plain child-index order. Anything left
  // unplaced cannot reach ROOT, i.e. the parent map contains a cycle.
  std::array<bool, kNumJoints> placed{};
  placed[0] = true;  // ROOT
  int remaining = kNumJoints - 1;
  while (remaining > 0) {
    bool progress = false;
    for (int c = 1; c < kNumJoints; ++c) {
      if (placed[c] || !placed[parent[c]]) continue;
      const JointId child = static_cast<JointId>(c);
      const JointId par = static_cast<JointId>(parent[c]);
      Segment seg;
      seg.child = child;
      seg.parent = par;
      seg.dof = dof[c];
      seg.name = default_segment_name(child, par);
      seg.evaluation = is_evaluation_name(seg.name);
      topo.segment_of_child_[c] = static_cast<int>(topo.segments_.size());
      topo.segments_.push_back(std::move(seg));
      placed[c] = true;
      --remaining;
      progress = true;
    }
    if (!progress) {
      for (int c = 1; c < kNumJoints; ++c) {
        if (!placed[c]) {
          throw ValidationError(std::string("topology: cycle involving joint ") +
                                kJointNames[c]);
        }
      }
    }
  }
  return topo;
}

SkeletonTopology SkeletonTopology::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("topology: cannot open " + path);
  }
  std::vector<std::tuple<JointId, JointId, int>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string child_s, parent_s;
    int d;
    if (!(ss >> child_s)) continue;  // blank line
    if (!(ss >> parent_s >> d)) {
      throw ValidationError("topology: line " + std::to_string(lineno) +
                            ": expected CHILD PARENT DOF");
    }
    std::string extra;
    if (ss >> extra) {
      throw ValidationError("topology: line " + std::to_string(lineno) +
                            ": trailing token '" + extra + "'");
    }
    const auto child = parse_joint(child_s);
    const auto parent = parse_joint(parent_s);
    if (!child || !parent) {
      throw ValidationError("topology: line " + std::to_string(lineno) +
                            ": unknown joint name");
    }
    edges.emplace_back(*child, *parent, d);
  }
  try {
    return from_edges(edges);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

JointId SkeletonTopology::parent(JointId id) const {
  if (id == JointId::ROOT) {
    throw ValidationError("topology: ROOT has no parent");
  }
  return static_cast<JointId>(parent_[joint_index(id)]);
}

int SkeletonTopology::dof(JointId id) const { return dof_[joint_index(id)]; }

int SkeletonTopology::segment_of_child(JointId child) const {
  return segment_of_child_[joint_index(child)];
}

int SkeletonTopology::segment_by_name(std::string_view name) const {
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> SkeletonTopology::evaluation_segments() const {
  std::vector<int> out;
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].evaluation) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool SkeletonTopology::operator==(const SkeletonTopology& other) const {
  return parent_ == other.parent_ && dof_ == other.dof_;
}

}  // namespace mocap
