#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mocap {

// The 20 tracked joints. The enum order is the canonical topology order used
// for CSV columns, state vector layout, and report rows.
enum class JointId : int {
  ROOT = 0,
  SPINE,
  NECK,
  HEAD,
  SHO_L,
  SHO_R,
  ELB_L,
  ELB_R,
  WRI_L,
  WRI_R,
  HAN_L,
  HAN_R,
  HIP_L,
  HIP_R,
  KNE_L,
  KNE_R,
  ANK_L,
  ANK_R,
  FOO_L,
  FOO_R,
};

inline constexpr int kNumJoints = 20;

const char* joint_name(JointId id);
std::optional<JointId> parse_joint(std::string_view name);
inline int joint_index(JointId id) { return static_cast<int>(id); }

// One edge of the kinematic tree: the segment from `parent` to `child`.
// Evaluation segments carry the bone names used in length reports
// (ARM_UP_L, LEG_LO_R, ...); the remaining edges are named after their
// child joint.
struct Segment {
  JointId child;
  JointId parent;
  std::string name;
  int dof;  // DoF label of the child joint, metadata for reporting
  bool evaluation;
};

// Joint tree with parent and DoF maps. Immutable after construction; all
// accessors are const.
class SkeletonTopology {
 public:
  // Defaults to the standard 20-joint topology.
  SkeletonTopology();

  // The 20-joint / 19-segment tree with the standard DoF labels: SPINE,
  // NECK, SHO_*, HIP_* are 3-DoF; ELB_*, KNE_* are 1-DoF; WRI_*, ANK_* are
  // 2-DoF; HEAD, HAN_*, FOO_* are modeled as 3-DoF leaf segments.
  static SkeletonTopology default_topology();

  // Line-oriented file, one `CHILD PARENT DOF` edge per line, `#` comments,
  // order irrelevant. Throws ValidationError with the offending line number.
  static SkeletonTopology from_file(const std::string& path);

  // Validates and builds from explicit edges (child, parent, dof). Every
  // non-root joint must appear exactly once as a child, the parent map must
  // form a single tree rooted at ROOT.
  static SkeletonTopology from_edges(
      const std::vector<std::tuple<JointId, JointId, int>>& edges);

  int num_joints() const { return kNumJoints; }
  int num_segments() const { return static_cast<int>(segments_.size()); }

  bool has_parent(JointId id) const { return id != JointId::ROOT; }
  JointId parent(JointId id) const;
  int dof(JointId id) const;

  // Segments in a fixed topological order (plain child-index order for the
  // default topology); a parent's segment always precedes its children's,
  // so a single forward sweep is a valid tree traversal.
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(int index) const { return segments_.at(index); }

  // Segment index of the edge ending at `child`, -1 for ROOT.
  int segment_of_child(JointId child) const;
  int segment_by_name(std::string_view name) const;

  // Indices of the 14 bone-length evaluation segments.
  std::vector<int> evaluation_segments() const;

  bool operator==(const SkeletonTopology& other) const;

 private:
  struct Uninitialized {};
  explicit SkeletonTopology(Uninitialized) {}

  std::vector<Segment> segments_;                 // ordered by child index
  std::array<int, kNumJoints> parent_{};          // -1 for ROOT
  std::array<int, kNumJoints> dof_{};             // 0 for ROOT
  std::array<int, kNumJoints> segment_of_child_{};// -1 for ROOT
};

}  // namespace mocap
