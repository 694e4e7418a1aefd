#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace de {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    double norm() const { return std::sqrt(x * x + y * y); }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Joint taxonomy. Root joints (torso + center) carry identity tags;
// adjacency joints are linked to them by displacement tracing, level 2
// through level 1; facial joints link straight to the center.
enum class JointGroup {
    Root,
    AdjacencyLevel1,
    AdjacencyLevel2,
    Facial,
    CenterPseudo,
};

const char* to_string(JointGroup g);
JointGroup joint_group_from_string(const std::string& s);

struct JointSpec {
    int id = -1;
    std::string name;
    JointGroup group = JointGroup::Root;
    double oks_k = 0.0;  // per-keypoint OKS falloff constant

    friend bool operator==(const JointSpec&, const JointSpec&) = default;
};

// Immutable after construction; safe to share across threads.
class SkeletonSpec {
public:
    SkeletonSpec(std::string name,
                 std::vector<JointSpec> joints,
                 std::vector<std::pair<int, int>> hierarchy_edges,
                 std::vector<int> facial_ids);

    const std::string& name() const { return name_; }
    int joint_count() const { return static_cast<int>(joints_.size()); }
    const JointSpec& joint(int id) const { return joints_[static_cast<std::size_t>(id)]; }
    const std::vector<JointSpec>& joints() const { return joints_; }
    const std::vector<std::pair<int, int>>& hierarchy_edges() const { return hierarchy_edges_; }
    const std::vector<int>& facial_ids() const { return facial_ids_; }

    int center_id() const { return center_id_; }
    JointGroup group(int id) const { return joints_[static_cast<std::size_t>(id)].group; }
    bool is_root_group(int id) const {
        const JointGroup g = group(id);
        return g == JointGroup::Root || g == JointGroup::CenterPseudo;
    }

    // U: number of identity-bearing joint categories (center included).
    int root_type_count() const { return root_type_count_; }
    // V: number of displacement-traced categories (adjacency + facial).
    int adjacency_type_count() const { return adjacency_type_count_; }

    std::optional<int> hierarchy_parent(int id) const;
    const std::vector<int>& hierarchy_children(int id) const;

    // Target joint a detection of `id` traces to: the hierarchy parent
    // for adjacency joints, the center for facial joints, nothing for
    // root-group joints.
    std::optional<int> trace_target(int id) const;

    // Root-group ids in clustering order: center first, then the torso
    // joints by ascending id.
    const std::vector<int>& cluster_order() const { return cluster_order_; }

    std::vector<int> ids_in_group(JointGroup g) const;

    friend bool operator==(const SkeletonSpec& a, const SkeletonSpec& b);

private:
    void validate() const;

    std::string name_;
    std::vector<JointSpec> joints_;
    std::vector<std::pair<int, int>> hierarchy_edges_;
    std::vector<int> facial_ids_;
    std::vector<std::optional<int>> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> cluster_order_;
    int center_id_ = -1;
    int root_type_count_ = 0;
    int adjacency_type_count_ = 0;
};

// 17-keypoint COCO skeleton plus the center pseudo-joint (18 ids).
SkeletonSpec default_coco_skeleton();
// 16-joint MPII skeleton plus center; head-top/neck act as the facial set.
SkeletonSpec default_mpii_skeleton();
// Resolves "coco17" / "mpii16"; nullopt for anything else.
std::optional<SkeletonSpec> builtin_skeleton(const std::string& name);

std::string skeleton_to_json(const SkeletonSpec& skeleton);
SkeletonSpec skeleton_from_json(const std::string& text);

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    bool visible = false;
    double confidence = 0.0;

    Vec2 pos() const { return {x, y}; }
    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct PersonPose {
    std::vector<Keypoint> joints;  // indexed by joint id, joint_count() entries
    int person_id = -1;
    double score = 0.0;

    friend bool operator==(const PersonPose&, const PersonPose&) = default;
};

PersonPose make_empty_pose(const SkeletonSpec& skeleton, int person_id = -1);

// Mean position of the visible annotated joints (center excluded).
// Throws NoVisibleJointsError when none are visible.
Vec2 compute_center(const PersonPose& pose, const SkeletonSpec& skeleton);

// Writes the computed center into the center slot (visible, confidence 1).
// No-op when no annotated joint is visible.
void fill_center(PersonPose& pose, const SkeletonSpec& skeleton);

// Mean confidence over visible annotated joints; 0 when none.
double mean_visible_confidence(const PersonPose& pose, const SkeletonSpec& skeleton);

}  // namespace de
