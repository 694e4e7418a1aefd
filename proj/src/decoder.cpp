#include "de/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "de/errors.hpp"
#include "de/refiner.hpp"

namespace de {

std::vector<Detection> detect_peaks(const Grid& conf, int joint_id,
                                    const DecoderConfig& cfg) {
    std::vector<Detection> out;
    if (conf.empty()) return out;
    const int half = std::max(1, cfg.nms_window / 2);
    for (int y = 0; y < conf.height(); ++y) {
        for (int x = 0; x < conf.width(); ++x) {
            const float v = conf.at(x, y);
            if (v < cfg.peak_threshold) continue;
            // Maximum of its window; on plateaus only the row-major-first
            // pixel survives (earlier neighbors must be strictly smaller).
            bool is_peak = true;
            for (int dy = -half; dy <= half && is_peak; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const float n = conf.at_or_zero(x + dx, y + dy);
                    const bool preceding = dy < 0 || (dy == 0 && dx < 0);
                    if (preceding ? n >= v : n > v) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) out.push_back({joint_id, x, y, v, 0.0, -1});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return a.confidence > b.confidence;
    });
    return out;
}

std::vector<PersonCluster> cluster_rjg(
    const std::vector<std::vector<Detection>>& detections_by_joint,
    const SkeletonSpec& skeleton, const DecoderConfig& cfg) {
    std::vector<PersonCluster> clusters;
    const auto joint_count = static_cast<std::size_t>(skeleton.joint_count());
    for (int id : skeleton.cluster_order()) {
        if (static_cast<std::size_t>(id) >= detections_by_joint.size()) continue;
        auto dets = detections_by_joint[static_cast<std::size_t>(id)];
        std::stable_sort(dets.begin(), dets.end(),
                         [](const Detection& a, const Detection& b) {
                             return a.confidence > b.confidence;
                         });
        for (Detection det : dets) {
            int best = -1;
            double best_delta = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                if (clusters[i].members[static_cast<std::size_t>(id)]) continue;
                const double delta = std::abs(clusters[i].mean_tag() - det.tag);
                if (delta < best_delta) {
                    best_delta = delta;
                    best = static_cast<int>(i);
                }
            }
            PersonCluster* home = nullptr;
            if (best >= 0 && best_delta < cfg.tag_cluster_threshold) {
                home = &clusters[static_cast<std::size_t>(best)];
            } else if (static_cast<int>(clusters.size()) < cfg.max_persons) {
                clusters.emplace_back();
                home = &clusters.back();
                home->person_id = static_cast<int>(clusters.size()) - 1;
                home->members.resize(joint_count);
            }
            if (!home) continue;  // over capacity, detection discarded
            det.person_id = home->person_id;
            home->members[static_cast<std::size_t>(id)] = det;
            home->tag_sum += det.tag;
            home->tag_count += 1;
        }
    }
    return clusters;
}

std::optional<std::size_t> trace_joint(const Detection& det, const Grid& disp_x,
                                       const Grid& disp_y,
                                       std::span<const Detection> target_peaks,
                                       double diag, double match_radius) {
    double ex = static_cast<double>(det.x);
    double ey = static_cast<double>(det.y);
    if (!disp_x.empty() && !disp_y.empty()) {
        ex += diag * disp_x.at_or_zero(det.x, det.y);
        ey += diag * disp_y.at_or_zero(det.x, det.y);
        if (ex < 0.0 || ex > disp_x.width() - 1 || ey < 0.0 || ey > disp_x.height() - 1)
            return std::nullopt;
    }
    std::optional<std::size_t> best;
    double best_d2 = match_radius * match_radius;
    for (std::size_t i = 0; i < target_peaks.size(); ++i) {
        const double dx = target_peaks[i].x - ex;
        const double dy = target_peaks[i].y - ey;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2 || (d2 == best_d2 && !best)) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

std::vector<PersonPose> assemble_poses(const FieldStack& stack,
                                       const SkeletonSpec& skeleton,
                                       const DecoderConfig& cfg) {
    if (stack.joint_count() == 0) return {};
    if (stack.joint_count() != skeleton.joint_count())
        throw DimensionMismatchError("stack has " + std::to_string(stack.joint_count()) +
                                     " joint channels, skeleton wants " +
                                     std::to_string(skeleton.joint_count()));
    const int center = skeleton.center_id();
    const double diag = stack.diag();

    std::vector<std::vector<Detection>> peaks(
        static_cast<std::size_t>(skeleton.joint_count()));
    for (const auto& joint : skeleton.joints()) {
        const auto id = static_cast<std::size_t>(joint.id);
        peaks[id] = detect_peaks(stack.conf[id], joint.id, cfg);
        if (skeleton.is_root_group(joint.id) && !stack.tag[id].empty())
            for (Detection& det : peaks[id]) det.tag = stack.tag[id].at(det.x, det.y);
    }

    auto clusters = cluster_rjg(peaks, skeleton, cfg);

    // Mirror cluster identities onto the peak lists so tracing can read them.
    for (const PersonCluster& cluster : clusters)
        for (int id : skeleton.cluster_order()) {
            const auto& member = cluster.members[static_cast<std::size_t>(id)];
            if (!member) continue;
            for (Detection& det : peaks[static_cast<std::size_t>(id)])
                if (det.x == member->x && det.y == member->y)
                    det.person_id = cluster.person_id;
        }

    std::vector<PersonPose> poses;
    poses.reserve(clusters.size());
    for (const PersonCluster& cluster : clusters)
        poses.push_back(make_empty_pose(skeleton, cluster.person_id));

    const auto claim = [&](int person, const Detection& det) {
        Keypoint& kp = poses[static_cast<std::size_t>(person)]
                           .joints[static_cast<std::size_t>(det.joint_id)];
        if (kp.visible) return;  // an earlier, higher-confidence detection holds the slot
        kp.x = det.x;
        kp.y = det.y;
        kp.visible = true;
        kp.confidence = det.confidence;
    };
    for (const PersonCluster& cluster : clusters)
        for (int id : skeleton.cluster_order()) {
            const auto& member = cluster.members[static_cast<std::size_t>(id)];
            if (member) claim(cluster.person_id, *member);
        }

    const auto center_fallback = [&](Detection& det) {
        const auto id = static_cast<std::size_t>(det.joint_id);
        const auto idx =
            trace_joint(det, stack.basic_x[id], stack.basic_y[id],
                        peaks[static_cast<std::size_t>(center)], diag, cfg.match_radius);
        if (!idx) return;
        const int pid = peaks[static_cast<std::size_t>(center)][*idx].person_id;
        if (pid < 0) return;
        det.person_id = pid;
        claim(pid, det);
    };

    const auto trace_level = [&](int id) {
        const auto target = skeleton.trace_target(id);
        const auto uid = static_cast<std::size_t>(id);
        // A hierarchical field targets the parent joint when that joint exists
        // and the person's center otherwise, so both types are valid endpoints;
        // on equal distance the parent wins (it comes first in the list).
        std::vector<Detection> targets(peaks[static_cast<std::size_t>(*target)]);
        if (cfg.center_fallback && *target != center)
            targets.insert(targets.end(), peaks[static_cast<std::size_t>(center)].begin(),
                           peaks[static_cast<std::size_t>(center)].end());
        for (Detection& det : peaks[uid]) {
            if (cfg.tracing == TracingMode::BasicOnly &&
                skeleton.group(id) != JointGroup::Facial) {
                center_fallback(det);
                continue;
            }
            const auto idx = trace_joint(det, stack.disp_x[uid], stack.disp_y[uid],
                                         targets, diag, cfg.match_radius);
            const int pid = idx ? targets[*idx].person_id : -1;
            if (pid >= 0) {
                det.person_id = pid;
                claim(pid, det);
            } else if (cfg.center_fallback && skeleton.group(id) != JointGroup::Facial) {
                // Parent missing or unidentified: long-range rescue.
                center_fallback(det);
            }
        }
    };

    for (JointGroup g : {JointGroup::AdjacencyLevel1, JointGroup::AdjacencyLevel2,
                         JointGroup::Facial})
        for (int id : skeleton.ids_in_group(g)) trace_level(id);

    std::vector<PersonPose> result;
    for (PersonPose& pose : poses) {
        pose.joints[static_cast<std::size_t>(center)].visible = false;
        pose.score = mean_visible_confidence(pose, skeleton);
        const bool any_visible =
            std::any_of(skeleton.joints().begin(), skeleton.joints().end(),
                        [&](const JointSpec& j) {
                            return j.group != JointGroup::CenterPseudo &&
                                   pose.joints[static_cast<std::size_t>(j.id)].visible;
                        });
        if (any_visible) result.push_back(std::move(pose));
    }
    return result;
}

std::vector<PersonPose> decode_stack(const FieldStack& stack,
                                     const SkeletonSpec& skeleton,
                                     const DecoderConfig& cfg) {
    std::vector<PersonPose> poses = assemble_poses(stack, skeleton, cfg);
    if (cfg.refine)
        for (PersonPose& pose : poses)
            pose = refine_pose(pose, stack, skeleton, cfg.refine_conf_threshold);
    return poses;
}

}  // namespace de
