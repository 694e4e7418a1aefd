#include "de/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "de/errors.hpp"

namespace de {
namespace {

// Anthropometric template, all lengths as fractions of person height.
// Anchor joints sit at fixed offsets from the head-top origin; limb
// joints hang from their parent with a sampled swing angle (radians,
// zero = straight down, distal swing relative to the proximal segment).
struct Anchor {
    int joint;
    double dx, dy;
};
struct Limb {
    int joint;
    int parent;
    double length;
    double swing;
    bool relative;  // swing measured from the parent limb's angle
};

const std::vector<Anchor>& coco_anchors() {
    static const std::vector<Anchor> a = {
        {0, 0.00, 0.06},  {1, 0.03, 0.04},   {2, -0.03, 0.04},
        {3, 0.06, 0.05},  {4, -0.06, 0.05},  {5, 0.155, 0.20},
        {6, -0.155, 0.20}, {11, 0.095, 0.51}, {12, -0.095, 0.51},
    };
    return a;
}

const std::vector<Limb>& coco_limbs() {
    static const std::vector<Limb> l = {
        {7, 5, 0.17, 0.7, false},  {8, 6, 0.17, 0.7, false},
        {13, 11, 0.24, 0.3, false}, {14, 12, 0.24, 0.3, false},
        {9, 7, 0.16, 1.0, true},   {10, 8, 0.16, 1.0, true},
        {15, 13, 0.22, 0.5, true}, {16, 14, 0.22, 0.5, true},
    };
    return l;
}

const std::vector<Anchor>& mpii_anchors() {
    static const std::vector<Anchor> a = {
        {2, -0.095, 0.51}, {3, 0.095, 0.51}, {6, 0.00, 0.51},
        {7, 0.00, 0.20},   {8, 0.00, 0.12}, {9, 0.00, 0.00},
        {12, -0.155, 0.20}, {13, 0.155, 0.20},
    };
    return a;
}

const std::vector<Limb>& mpii_limbs() {
    static const std::vector<Limb> l = {
        {1, 2, 0.24, 0.3, false},  {4, 3, 0.24, 0.3, false},
        {11, 12, 0.17, 0.7, false}, {14, 13, 0.17, 0.7, false},
        {0, 1, 0.22, 0.5, true},   {5, 4, 0.22, 0.5, true},
        {10, 11, 0.16, 1.0, true}, {15, 14, 0.16, 1.0, true},
    };
    return l;
}

double facial_diag(const PersonPose& pose, const SkeletonSpec& skeleton) {
    double x0 = 1e30, y0 = 1e30, x1 = -1e30, y1 = -1e30;
    for (int id : skeleton.facial_ids()) {
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(id)];
        x0 = std::min(x0, kp.x);
        x1 = std::max(x1, kp.x);
        y0 = std::min(y0, kp.y);
        y1 = std::max(y1, kp.y);
    }
    const double w = x1 - x0, h = y1 - y0;
    return std::max(1.0, std::sqrt(w * w + h * h));
}

}  // namespace

Scene generate_scene(uint64_t seed, const SceneConfig& cfg,
                     const SkeletonSpec& skeleton) {
    const bool mpii = skeleton.name() == "mpii16";
    if (!mpii && skeleton.name() != "coco17")
        throw SkeletonError("no generator template for skeleton " + skeleton.name());
    const auto& anchors = mpii ? mpii_anchors() : coco_anchors();
    const auto& limbs = mpii ? mpii_limbs() : coco_limbs();

    SplitMix64 rng(seed);
    Scene scene;
    scene.width = cfg.width;
    scene.height = cfg.height;
    scene.skeleton_name = skeleton.name();

    constexpr double kMargin = 2.0;
    for (int person = 0; person < cfg.person_count; ++person) {
        bool placed = false;
        for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
            const double h = rng.uniform(cfg.min_scale, cfg.max_scale);
            const double reach = 0.30 * h;  // widest horizontal template extent
            const double x_lo = kMargin + reach, x_hi = cfg.width - 1 - kMargin - reach;
            const double y_lo = kMargin, y_hi = cfg.height - 1 - kMargin - h;
            const double cx = rng.uniform(std::min(x_lo, x_hi), std::max(x_lo, x_hi));
            const double top = rng.uniform(std::min(y_lo, y_hi), std::max(y_lo, y_hi));

            PersonPose pose = make_empty_pose(skeleton, person);
            const auto put = [&](int id, double x, double y) {
                Keypoint& kp = pose.joints[static_cast<std::size_t>(id)];
                kp.x = x;
                kp.y = y;
                kp.visible = true;
                kp.confidence = 1.0;
            };
            for (const Anchor& a : anchors)
                put(a.joint, cx + a.dx * h, top + a.dy * h);

            std::map<int, double> limb_angle;
            for (const Limb& limb : limbs) {
                const double base = limb.relative ? limb_angle[limb.parent] : 0.0;
                const double angle = base + rng.uniform(-limb.swing, limb.swing);
                limb_angle[limb.joint] = angle;
                const Keypoint& parent = pose.joints[static_cast<std::size_t>(limb.parent)];
                put(limb.joint, parent.x + limb.length * h * std::sin(angle),
                    parent.y + limb.length * h * std::cos(angle));
            }

            for (const auto& joint : skeleton.joints()) {
                if (joint.group == JointGroup::CenterPseudo) continue;
                Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
                kp.x += rng.uniform(-cfg.jitter, cfg.jitter);
                kp.y += rng.uniform(-cfg.jitter, cfg.jitter);
            }
            for (const auto& joint : skeleton.joints()) {
                if (joint.group == JointGroup::CenterPseudo) continue;
                const bool drop = rng.next_double() < cfg.drop_joint_prob;
                if (drop) pose.joints[static_cast<std::size_t>(joint.id)].visible = false;
            }

            const double diag = facial_diag(pose, skeleton);
            fill_center(pose, skeleton);

            // An all-invisible pose leaves the center unset; retry placement.
            bool ok = pose.joints[static_cast<std::size_t>(skeleton.center_id())].visible;
            for (const auto& joint : skeleton.joints()) {
                if (!ok) break;
                const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
                if (!kp.visible) continue;
                if (kp.x < kMargin || kp.x > cfg.width - 1 - kMargin ||
                    kp.y < kMargin || kp.y > cfg.height - 1 - kMargin)
                    ok = false;
            }
            for (const PersonPose& other : scene.persons) {
                if (!ok) break;
                for (const auto& joint : skeleton.joints()) {
                    const Keypoint& a = pose.joints[static_cast<std::size_t>(joint.id)];
                    const Keypoint& b = other.joints[static_cast<std::size_t>(joint.id)];
                    if (!a.visible || !b.visible) continue;
                    if (distance(a.pos(), b.pos()) < cfg.min_separation) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;

            scene.persons.push_back(std::move(pose));
            scene.scales.push_back(h);
            scene.head_diags.push_back(diag);
            placed = true;
        }
        if (!placed)
            throw PlacementFailureError(
                "could not place person " + std::to_string(person) + " after " +
                std::to_string(cfg.max_attempts) + " attempts");
    }
    return scene;
}

}  // namespace de
