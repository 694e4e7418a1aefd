#include "de/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace de {
namespace {

struct PixelRange {
    int x0, x1, y0, y1;  // inclusive
};

PixelRange disk_range(int cx, int cy, double tau, int w, int h) {
    const int r = static_cast<int>(std::ceil(tau));
    return {std::max(0, cx - r), std::min(w - 1, cx + r),
            std::max(0, cy - r), std::min(h - 1, cy + r)};
}

int round_px(double v) { return static_cast<int>(std::llround(v)); }

// Scene-level encoding works on precomputed per-person layouts so the
// noise models can move disks and retarget vectors independently.
struct JointSite {
    bool visible = false;
    int cx = 0, cy = 0;   // rounded disk center
    double amp = 1.0;     // confidence amplitude
    double tag = 0.0;
    // Rounded stored-vector endpoints; unset channels are skipped.
    std::optional<std::pair<int, int>> main_target;
    std::optional<std::pair<int, int>> basic_target;
};

void splat_confidence(Grid& grid, const JointSite& site, double sigma, double tau) {
    const auto [x0, x1, y0, y1] = disk_range(site.cx, site.cy, tau, grid.width(), grid.height());
    const double tau2 = tau * tau;
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d2 = static_cast<double>(x - site.cx) * (x - site.cx) +
                              static_cast<double>(y - site.cy) * (y - site.cy);
            if (d2 > tau2) continue;
            const float v = static_cast<float>(site.amp * std::exp(-d2 * inv_s2));
            float& cell = grid.at(x, y);
            if (v > cell) cell = v;
        }
    }
}

// Claims disk pixels for one person, nearest disk center winning ties in
// favor of the earlier claimant. Returns true when a pixel was already
// claimed (disk overlap).
bool claim_disk(Grid& owner_d2, const JointSite& site, double tau,
                const std::function<void(int, int)>& write) {
    bool overlap = false;
    const auto [x0, x1, y0, y1] =
        disk_range(site.cx, site.cy, tau, owner_d2.width(), owner_d2.height());
    const double tau2 = tau * tau;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d2 = static_cast<double>(x - site.cx) * (x - site.cx) +
                              static_cast<double>(y - site.cy) * (y - site.cy);
            if (d2 > tau2) continue;
            float& best = owner_d2.at(x, y);
            if (best != std::numeric_limits<float>::infinity()) overlap = true;
            if (d2 < best) {
                best = static_cast<float>(d2);
                write(x, y);
            }
        }
    }
    return overlap;
}

}  // namespace

Grid encode_confidence(std::span<const PersonPose> poses, int joint_id,
                       const EncoderConfig& cfg, int width, int height) {
    const int s = std::max(1, cfg.stride);
    const int ow = (width + s - 1) / s;
    const int oh = (height + s - 1) / s;
    Grid grid(ow, oh);
    for (const PersonPose& pose : poses) {
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint_id)];
        if (!kp.visible) continue;
        JointSite site;
        site.cx = round_px(kp.x / s);
        site.cy = round_px(kp.y / s);
        splat_confidence(grid, site, cfg.sigma, cfg.tau);
    }
    return grid;
}

TagEncodeResult encode_tags(std::span<const PersonPose> poses,
                            const SkeletonSpec& skeleton,
                            const EncoderConfig& cfg, int width, int height) {
    const int s = std::max(1, cfg.stride);
    const int ow = (width + s - 1) / s;
    const int oh = (height + s - 1) / s;
    TagEncodeResult result;
    result.tags.resize(static_cast<std::size_t>(skeleton.joint_count()));
    for (int id : skeleton.cluster_order()) {
        Grid& grid = result.tags[static_cast<std::size_t>(id)];
        grid = Grid(ow, oh);
        Grid owner_d2(ow, oh, std::numeric_limits<float>::infinity());
        for (std::size_t n = 0; n < poses.size(); ++n) {
            const Keypoint& kp = poses[n].joints[static_cast<std::size_t>(id)];
            if (!kp.visible) continue;
            JointSite site;
            site.cx = round_px(kp.x / s);
            site.cy = round_px(kp.y / s);
            site.tag = cfg.tag_assignment == TagAssignment::SequentialIntegers
                           ? static_cast<double>(n)
                           : static_cast<double>(poses[n].person_id);
            const float tag_value = static_cast<float>(site.tag);
            const bool clash = claim_disk(
                owner_d2, site, cfg.tau,
                [&](int x, int y) { grid.at(x, y) = tag_value; });
            result.overlap = result.overlap || clash;
        }
    }
    return result;
}

namespace {

// Shared core for displacement encoding; `sites` already resolved per
// person and joint (visibility, disk centers, rounded targets).
DisplacementEncodeResult rasterize_displacements(
    const std::vector<std::vector<JointSite>>& sites, const SkeletonSpec& skeleton,
    double tau, int ow, int oh) {
    DisplacementEncodeResult result;
    const std::size_t joint_count = static_cast<std::size_t>(skeleton.joint_count());
    result.disp_x.resize(joint_count);
    result.disp_y.resize(joint_count);
    result.basic_x.resize(joint_count);
    result.basic_y.resize(joint_count);
    const double z = std::sqrt(static_cast<double>(ow) * ow +
                               static_cast<double>(oh) * oh);

    for (const auto& joint : skeleton.joints()) {
        if (!skeleton.trace_target(joint.id)) continue;
        const auto id = static_cast<std::size_t>(joint.id);
        result.disp_x[id] = Grid(ow, oh);
        result.disp_y[id] = Grid(ow, oh);
        const bool wants_basic = joint.group == JointGroup::AdjacencyLevel1 ||
                                 joint.group == JointGroup::AdjacencyLevel2;
        if (wants_basic) {
            result.basic_x[id] = Grid(ow, oh);
            result.basic_y[id] = Grid(ow, oh);
        }

        Grid main_owner(ow, oh, std::numeric_limits<float>::infinity());
        Grid basic_owner(ow, oh, std::numeric_limits<float>::infinity());
        for (std::size_t n = 0; n < sites.size(); ++n) {
            const JointSite& site = sites[n][id];
            if (!site.visible) continue;
            if (site.main_target) {
                const auto [tx, ty] = *site.main_target;
                claim_disk(main_owner, site, tau, [&](int x, int y) {
                    result.disp_x[id].at(x, y) = static_cast<float>((tx - x) / z);
                    result.disp_y[id].at(x, y) = static_cast<float>((ty - y) / z);
                });
            }
            if (wants_basic && site.basic_target) {
                const auto [tx, ty] = *site.basic_target;
                claim_disk(basic_owner, site, tau, [&](int x, int y) {
                    result.basic_x[id].at(x, y) = static_cast<float>((tx - x) / z);
                    result.basic_y[id].at(x, y) = static_cast<float>((ty - y) / z);
                });
            }
            if (!site.main_target && !site.basic_target)
                result.untraceable.emplace_back(static_cast<int>(n), joint.id);
        }
    }
    return result;
}

std::vector<std::vector<JointSite>> resolve_sites(
    std::span<const PersonPose> poses, const SkeletonSpec& skeleton,
    const EncoderConfig& cfg, const PeakNoise* noise) {
    const int s = std::max(1, cfg.stride);
    const int center = skeleton.center_id();
    std::vector<std::vector<JointSite>> sites(poses.size());
    for (std::size_t n = 0; n < poses.size(); ++n) {
        sites[n].resize(static_cast<std::size_t>(skeleton.joint_count()));
        for (const auto& joint : skeleton.joints()) {
            const Keypoint& kp = poses[n].joints[static_cast<std::size_t>(joint.id)];
            JointSite& site = sites[n][static_cast<std::size_t>(joint.id)];
            site.visible = kp.visible;
            if (!kp.visible) continue;

            const Vec2 off = noise ? noise->offset(static_cast<int>(n), joint.id) : Vec2{};
            const Vec2 moved = kp.pos() + off;
            site.cx = round_px(moved.x / s);
            site.cy = round_px(moved.y / s);
            site.amp = std::exp(-(off.x * off.x + off.y * off.y) /
                                (cfg.sigma * cfg.sigma));

            // Stored vectors translate rigidly with MoveJoint noise: the
            // endpoint carries the same offset as the disk, so the vector
            // read at the displaced peak is still the true bone vector.
            const Vec2 stored_shift =
                (noise && noise->mode == PeakNoiseMode::MoveJoint) ? off : Vec2{};

            const auto target_of = [&](int target_id) -> std::optional<std::pair<int, int>> {
                const Keypoint& t = poses[n].joints[static_cast<std::size_t>(target_id)];
                if (!t.visible) return std::nullopt;
                const Vec2 endpoint = t.pos() + stored_shift;
                return std::make_pair(round_px(endpoint.x / s), round_px(endpoint.y / s));
            };

            if (const auto main_id = skeleton.trace_target(joint.id)) {
                site.main_target = target_of(*main_id);
                if (!site.main_target && *main_id != center)
                    site.main_target = target_of(center);
                if (joint.group == JointGroup::AdjacencyLevel1 ||
                    joint.group == JointGroup::AdjacencyLevel2)
                    site.basic_target = target_of(center);
            }
        }
    }
    return sites;
}

}  // namespace

DisplacementEncodeResult encode_displacements(std::span<const PersonPose> poses,
                                              const SkeletonSpec& skeleton,
                                              const EncoderConfig& cfg,
                                              int width, int height) {
    const int s = std::max(1, cfg.stride);
    const int ow = (width + s - 1) / s;
    const int oh = (height + s - 1) / s;
    return rasterize_displacements(resolve_sites(poses, skeleton, cfg, nullptr),
                                   skeleton, cfg.tau, ow, oh);
}

EncodeResult encode_scene(std::span<const PersonPose> poses,
                          const SkeletonSpec& skeleton,
                          const EncoderConfig& cfg, int width, int height,
                          const PeakNoise* noise) {
    const int s = std::max(1, cfg.stride);
    const int ow = (width + s - 1) / s;
    const int oh = (height + s - 1) / s;

    std::vector<PersonPose> persons(poses.begin(), poses.end());
    for (PersonPose& p : persons) fill_center(p, skeleton);

    // MoveJoint noise carries the whole measurement: tags and vectors
    // follow the displaced disks. MoveConfidenceOnly displaces (and
    // damps) just the confidence peaks.
    std::vector<PersonPose> moved = persons;
    if (noise) {
        for (std::size_t n = 0; n < moved.size(); ++n)
            for (auto& joint : skeleton.joints()) {
                Keypoint& kp = moved[n].joints[static_cast<std::size_t>(joint.id)];
                if (!kp.visible) continue;
                const Vec2 off = noise->offset(static_cast<int>(n), joint.id);
                kp.x += off.x;
                kp.y += off.y;
            }
    }

    EncodeResult result;
    result.stack.width = ow;
    result.stack.height = oh;
    result.stack.resize_joints(skeleton.joint_count());

    auto sites = resolve_sites(persons, skeleton, cfg, noise);
    for (const auto& joint : skeleton.joints()) {
        const auto id = static_cast<std::size_t>(joint.id);
        Grid grid(ow, oh);
        for (const auto& person_sites : sites) {
            const JointSite& site = person_sites[id];
            if (site.visible) splat_confidence(grid, site, cfg.sigma, cfg.tau);
        }
        result.stack.conf[id] = std::move(grid);
    }

    const std::vector<PersonPose>& tag_poses =
        (noise && noise->mode == PeakNoiseMode::MoveJoint) ? moved : persons;
    TagEncodeResult tags = encode_tags(tag_poses, skeleton, cfg, width, height);
    result.stack.tag = std::move(tags.tags);
    result.tag_overlap = tags.overlap;

    const bool disp_follows_noise =
        noise && noise->mode == PeakNoiseMode::MoveJoint;
    const auto disp_sites = disp_follows_noise
                                ? std::move(sites)
                                : resolve_sites(persons, skeleton, cfg, nullptr);
    DisplacementEncodeResult disp =
        rasterize_displacements(disp_sites, skeleton, cfg.tau, ow, oh);
    result.stack.disp_x = std::move(disp.disp_x);
    result.stack.disp_y = std::move(disp.disp_y);
    result.stack.basic_x = std::move(disp.basic_x);
    result.stack.basic_y = std::move(disp.basic_y);
    result.untraceable = std::move(disp.untraceable);
    return result;
}

}  // namespace de
