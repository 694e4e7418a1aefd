#include "de/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "de/errors.hpp"

namespace de {

const char* to_string(JointGroup g) {
    switch (g) {
        case JointGroup::Root: return "root";
        case JointGroup::AdjacencyLevel1: return "adjacency1";
        case JointGroup::AdjacencyLevel2: return "adjacency2";
        case JointGroup::Facial: return "facial";
        case JointGroup::CenterPseudo: return "center";
    }
    return "?";
}

JointGroup joint_group_from_string(const std::string& s) {
    if (s == "root") return JointGroup::Root;
    if (s == "adjacency1") return JointGroup::AdjacencyLevel1;
    if (s == "adjacency2") return JointGroup::AdjacencyLevel2;
    if (s == "facial") return JointGroup::Facial;
    if (s == "center") return JointGroup::CenterPseudo;
    throw FormatError("unknown joint group: " + s);
}

SkeletonSpec::SkeletonSpec(std::string name,
                           std::vector<JointSpec> joints,
                           std::vector<std::pair<int, int>> hierarchy_edges,
                           std::vector<int> facial_ids)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      hierarchy_edges_(std::move(hierarchy_edges)),
      facial_ids_(std::move(facial_ids)) {
    validate();

    const int n = joint_count();
    parent_.assign(n, std::nullopt);
    children_.assign(n, {});
    for (const auto& [child, parent] : hierarchy_edges_) {
        parent_[static_cast<std::size_t>(child)] = parent;
        children_[static_cast<std::size_t>(parent)].push_back(child);
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());

    for (const auto& j : joints_) {
        if (j.group == JointGroup::CenterPseudo) center_id_ = j.id;
        if (j.group == JointGroup::Root || j.group == JointGroup::CenterPseudo)
            ++root_type_count_;
        else
            ++adjacency_type_count_;
    }

    cluster_order_.push_back(center_id_);
    for (const auto& j : joints_)
        if (j.group == JointGroup::Root) cluster_order_.push_back(j.id);
}

void SkeletonSpec::validate() const {
    const int n = joint_count();
    if (n == 0) throw SkeletonError("skeleton has no joints");
    int centers = 0;
    std::set<std::string> names;
    for (int i = 0; i < n; ++i) {
        const JointSpec& j = joints_[static_cast<std::size_t>(i)];
        if (j.id != i) throw SkeletonError("joint ids must be 0..n-1 in order");
        if (j.name.empty()) throw SkeletonError("joint name must not be empty");
        if (!names.insert(j.name).second)
            throw SkeletonError("duplicate joint name: " + j.name);
        if (j.group == JointGroup::CenterPseudo) ++centers;
    }
    if (centers != 1) throw SkeletonError("skeleton needs exactly one center joint");

    std::set<int> with_parent;
    for (const auto& [child, parent] : hierarchy_edges_) {
        if (child < 0 || child >= n || parent < 0 || parent >= n)
            throw SkeletonError("hierarchy edge references unknown joint");
        if (!with_parent.insert(child).second)
            throw SkeletonError("joint has two hierarchy parents");
        const JointGroup cg = joints_[static_cast<std::size_t>(child)].group;
        const JointGroup pg = joints_[static_cast<std::size_t>(parent)].group;
        const bool level1 = cg == JointGroup::AdjacencyLevel1 && pg == JointGroup::Root;
        const bool level2 =
            cg == JointGroup::AdjacencyLevel2 && pg == JointGroup::AdjacencyLevel1;
        if (!level1 && !level2)
            throw SkeletonError("hierarchy edge must link level1->root or level2->level1");
    }
    for (const auto& j : joints_) {
        const bool adjacency = j.group == JointGroup::AdjacencyLevel1 ||
                               j.group == JointGroup::AdjacencyLevel2;
        if (adjacency && !with_parent.count(j.id))
            throw SkeletonError("adjacency joint lacks a hierarchy parent: " + j.name);
    }

    std::set<int> facial(facial_ids_.begin(), facial_ids_.end());
    if (facial.size() != facial_ids_.size())
        throw SkeletonError("duplicate facial id");
    for (int id : facial_ids_) {
        if (id < 0 || id >= n) throw SkeletonError("facial id out of range");
        if (joints_[static_cast<std::size_t>(id)].group != JointGroup::Facial)
            throw SkeletonError("facial list contains a non-facial joint");
    }
    for (const auto& j : joints_)
        if (j.group == JointGroup::Facial && !facial.count(j.id))
            throw SkeletonError("facial joint missing from facial list: " + j.name);
}

std::optional<int> SkeletonSpec::hierarchy_parent(int id) const {
    return parent_[static_cast<std::size_t>(id)];
}

const std::vector<int>& SkeletonSpec::hierarchy_children(int id) const {
    return children_[static_cast<std::size_t>(id)];
}

std::optional<int> SkeletonSpec::trace_target(int id) const {
    switch (group(id)) {
        case JointGroup::AdjacencyLevel1:
        case JointGroup::AdjacencyLevel2:
            return parent_[static_cast<std::size_t>(id)];
        case JointGroup::Facial:
            return center_id_;
        default:
            return std::nullopt;
    }
}

std::vector<int> SkeletonSpec::ids_in_group(JointGroup g) const {
    std::vector<int> out;
    for (const auto& j : joints_)
        if (j.group == g) out.push_back(j.id);
    return out;
}

bool operator==(const SkeletonSpec& a, const SkeletonSpec& b) {
    return a.name_ == b.name_ && a.joints_ == b.joints_ &&
           a.hierarchy_edges_ == b.hierarchy_edges_ && a.facial_ids_ == b.facial_ids_;
}

SkeletonSpec default_coco_skeleton() {
    std::vector<JointSpec> joints = {
        {0, "nose", JointGroup::Facial, 0.052},
        {1, "left_eye", JointGroup::Facial, 0.050},
        {2, "right_eye", JointGroup::Facial, 0.050},
        {3, "left_ear", JointGroup::Facial, 0.070},
        {4, "right_ear", JointGroup::Facial, 0.070},
        {5, "left_shoulder", JointGroup::Root, 0.158},
        {6, "right_shoulder", JointGroup::Root, 0.158},
        {7, "left_elbow", JointGroup::AdjacencyLevel1, 0.144},
        {8, "right_elbow", JointGroup::AdjacencyLevel1, 0.144},
        {9, "left_wrist", JointGroup::AdjacencyLevel2, 0.124},
        {10, "right_wrist", JointGroup::AdjacencyLevel2, 0.124},
        {11, "left_hip", JointGroup::Root, 0.214},
        {12, "right_hip", JointGroup::Root, 0.214},
        {13, "left_knee", JointGroup::AdjacencyLevel1, 0.174},
        {14, "right_knee", JointGroup::AdjacencyLevel1, 0.174},
        {15, "left_ankle", JointGroup::AdjacencyLevel2, 0.178},
        {16, "right_ankle", JointGroup::AdjacencyLevel2, 0.178},
        {17, "center", JointGroup::CenterPseudo, 0.0},
    };
    std::vector<std::pair<int, int>> edges = {
        {7, 5}, {8, 6}, {9, 7}, {10, 8}, {13, 11}, {14, 12}, {15, 13}, {16, 14},
    };
    return SkeletonSpec("coco17", std::move(joints), std::move(edges), {0, 1, 2, 3, 4});
}

SkeletonSpec default_mpii_skeleton() {
    std::vector<JointSpec> joints = {
        {0, "right_ankle", JointGroup::AdjacencyLevel2, 0.178},
        {1, "right_knee", JointGroup::AdjacencyLevel1, 0.174},
        {2, "right_hip", JointGroup::Root, 0.214},
        {3, "left_hip", JointGroup::Root, 0.214},
        {4, "left_knee", JointGroup::AdjacencyLevel1, 0.174},
        {5, "left_ankle", JointGroup::AdjacencyLevel2, 0.178},
        {6, "pelvis", JointGroup::Root, 0.214},
        {7, "thorax", JointGroup::Root, 0.158},
        {8, "upper_neck", JointGroup::Facial, 0.080},
        {9, "head_top", JointGroup::Facial, 0.060},
        {10, "right_wrist", JointGroup::AdjacencyLevel2, 0.124},
        {11, "right_elbow", JointGroup::AdjacencyLevel1, 0.144},
        {12, "right_shoulder", JointGroup::Root, 0.158},
        {13, "left_shoulder", JointGroup::Root, 0.158},
        {14, "left_elbow", JointGroup::AdjacencyLevel1, 0.144},
        {15, "left_wrist", JointGroup::AdjacencyLevel2, 0.124},
        {16, "center", JointGroup::CenterPseudo, 0.0},
    };
    std::vector<std::pair<int, int>> edges = {
        {1, 2}, {4, 3}, {0, 1}, {5, 4}, {11, 12}, {14, 13}, {10, 11}, {15, 14},
    };
    return SkeletonSpec("mpii16", std::move(joints), std::move(edges), {8, 9});
}

std::optional<SkeletonSpec> builtin_skeleton(const std::string& name) {
    if (name == "coco17") return default_coco_skeleton();
    if (name == "mpii16") return default_mpii_skeleton();
    return std::nullopt;
}

std::string skeleton_to_json(const SkeletonSpec& skeleton) {
    nlohmann::ordered_json j;
    j["name"] = skeleton.name();
    j["joints"] = nlohmann::ordered_json::array();
    for (const auto& joint : skeleton.joints()) {
        j["joints"].push_back({{"id", joint.id},
                               {"name", joint.name},
                               {"group", to_string(joint.group)},
                               {"oks_k", joint.oks_k}});
    }
    j["hierarchy"] = nlohmann::ordered_json::array();
    for (const auto& [child, parent] : skeleton.hierarchy_edges())
        j["hierarchy"].push_back({child, parent});
    j["facial"] = skeleton.facial_ids();
    return j.dump(2) + "\n";
}

SkeletonSpec skeleton_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("skeleton json: ") + e.what());
    }
    try {
        std::vector<JointSpec> joints;
        for (const auto& item : j.at("joints")) {
            JointSpec spec;
            spec.id = item.at("id").get<int>();
            spec.name = item.at("name").get<std::string>();
            spec.group = joint_group_from_string(item.at("group").get<std::string>());
            spec.oks_k = item.at("oks_k").get<double>();
            joints.push_back(std::move(spec));
        }
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("hierarchy"))
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        std::vector<int> facial = j.at("facial").get<std::vector<int>>();
        return SkeletonSpec(j.at("name").get<std::string>(), std::move(joints),
                            std::move(edges), std::move(facial));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("skeleton json: ") + e.what());
    }
}

PersonPose make_empty_pose(const SkeletonSpec& skeleton, int person_id) {
    PersonPose pose;
    pose.joints.resize(static_cast<std::size_t>(skeleton.joint_count()));
    pose.person_id = person_id;
    return pose;
}

Vec2 compute_center(const PersonPose& pose, const SkeletonSpec& skeleton) {
    Vec2 sum;
    int count = 0;
    for (const auto& joint : skeleton.joints()) {
        if (joint.group == JointGroup::CenterPseudo) continue;
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
        if (!kp.visible) continue;
        sum = sum + kp.pos();
        ++count;
    }
    if (count == 0) throw NoVisibleJointsError("pose has no visible joints");
    return sum * (1.0 / count);
}

void fill_center(PersonPose& pose, const SkeletonSpec& skeleton) {
    Vec2 c;
    try {
        c = compute_center(pose, skeleton);
    } catch (const NoVisibleJointsError&) {
        return;
    }
    Keypoint& center = pose.joints[static_cast<std::size_t>(skeleton.center_id())];
    center.x = c.x;
    center.y = c.y;
    center.visible = true;
    center.confidence = 1.0;
}

double mean_visible_confidence(const PersonPose& pose, const SkeletonSpec& skeleton) {
    double sum = 0.0;
    int count = 0;
    for (const auto& joint : skeleton.joints()) {
        if (joint.group == JointGroup::CenterPseudo) continue;
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
        if (!kp.visible) continue;
        sum += kp.confidence;
        ++count;
    }
    return count ? sum / count : 0.0;
}

}  // namespace de
