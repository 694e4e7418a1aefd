#include "de/losses.hpp"

#include <cmath>
#include <cstddef>

#include "de/decoder.hpp"
#include "de/errors.hpp"

namespace de {
namespace {

void require_same_shape(const Grid& a, const Grid& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatchError(std::string(what) + ": grid shapes differ");
}

double smooth_l1(double e) {
    const double a = std::abs(e);
    return a < 1.0 ? 0.5 * e * e : a - 0.5;
}

double tag_at(const std::vector<Grid>& tag_grids, const LabeledJoint& label) {
    const auto id = static_cast<std::size_t>(label.joint_id);
    if (id >= tag_grids.size()) return 0.0;
    return tag_grids[id].at_or_zero(label.x, label.y);
}

}  // namespace

double loss_confidence(const Grid& pred, const Grid& gt) {
    require_same_shape(pred, gt, "loss_confidence");
    double sum = 0.0;
    const auto& p = pred.data();
    const auto& g = gt.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double e = static_cast<double>(p[i]) - static_cast<double>(g[i]);
        sum += e * e;
    }
    return p.empty() ? 0.0 : sum / static_cast<double>(p.size());
}

double loss_displacement(const Grid& pred_x, const Grid& pred_y,
                         const Grid& gt_x, const Grid& gt_y,
                         const Grid& mask) {
    require_same_shape(pred_x, gt_x, "loss_displacement");
    require_same_shape(pred_y, gt_y, "loss_displacement");
    require_same_shape(pred_x, pred_y, "loss_displacement");
    require_same_shape(pred_x, mask, "loss_displacement");
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) <= 0.0f) continue;
            ++count;
            sum += smooth_l1(static_cast<double>(pred_x.at(x, y)) - gt_x.at(x, y)) +
                   smooth_l1(static_cast<double>(pred_y.at(x, y)) - gt_y.at(x, y));
        }
    return count ? sum / static_cast<double>(count) : 0.0;
}

TagLoss loss_tags(const std::vector<Grid>& tag_grids,
                  const std::vector<PersonLabels>& labels,
                  const TagLossConfig& cfg) {
    std::vector<double> refs;
    std::vector<const PersonLabels*> used;
    for (const PersonLabels& person : labels) {
        if (person.empty()) continue;
        double sum = 0.0;
        for (const LabeledJoint& label : person) sum += tag_at(tag_grids, label);
        refs.push_back(sum / static_cast<double>(person.size()));
        used.push_back(&person);
    }
    if (refs.empty())
        throw NoLabeledJointsError("tag loss needs at least one labeled joint");

    const auto n = refs.size();
    TagLoss out;
    for (std::size_t i = 0; i < n; ++i) {
        double person_sum = 0.0;
        for (const LabeledJoint& label : *used[i]) {
            const double e = refs[i] - tag_at(tag_grids, label);
            person_sum += e * e;
        }
        out.pull += person_sum / static_cast<double>(used[i]->size());
    }
    out.pull /= static_cast<double>(n);

    const double inv_2s2 = 1.0 / (2.0 * cfg.sigma_tag * cfg.sigma_tag);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j && !cfg.include_self_pairs) continue;
            const double d = refs[i] - refs[j];
            out.push += std::exp(-d * d * inv_2s2);
        }
    out.push /= static_cast<double>(n) * static_cast<double>(n);
    out.total = out.pull + out.push;
    return out;
}

LossBreakdown loss_total(const FieldStack& pred, const FieldStack& gt,
                         const SkeletonSpec& skeleton,
                         const std::vector<PersonLabels>& labels,
                         const LossConfig& cfg) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw DimensionMismatchError("loss_total: stack shapes differ");
    if (gt.joint_count() != skeleton.joint_count())
        throw DimensionMismatchError("loss_total: stack does not match skeleton");

    const auto present_or_zero = [](const Grid& g, const Grid& like) -> Grid {
        return g.empty() ? Grid(like.width(), like.height()) : g;
    };

    LossBreakdown out;
    for (const auto& joint : skeleton.joints()) {
        const auto id = static_cast<std::size_t>(joint.id);
        const Grid& gt_conf = gt.conf[id];
        if (gt_conf.empty()) continue;
        const Grid pred_conf =
            id < pred.conf.size() ? present_or_zero(pred.conf[id], gt_conf)
                                  : Grid(gt_conf.width(), gt_conf.height());
        out.confidence += loss_confidence(pred_conf, gt_conf);

        if (!skeleton.trace_target(joint.id)) continue;
        const Grid& gx = gt.disp_x[id];
        const Grid& gy = gt.disp_y[id];
        if (gx.empty() || gy.empty()) continue;
        const Grid px = id < pred.disp_x.size() ? present_or_zero(pred.disp_x[id], gx)
                                                : Grid(gx.width(), gx.height());
        const Grid py = id < pred.disp_y.size() ? present_or_zero(pred.disp_y[id], gy)
                                                : Grid(gy.width(), gy.height());
        const Grid mask = cfg.mask_displacement
                              ? gt_conf
                              : Grid(gt_conf.width(), gt_conf.height(), 1.0f);
        out.displacement += loss_displacement(px, py, gx, gy, mask);
    }

    TagLossConfig cross = cfg.tags;
    cross.include_self_pairs = false;
    const TagLoss tags_cross = loss_tags(pred.tag, labels, cross);
    TagLossConfig with_self = cfg.tags;
    with_self.include_self_pairs = true;
    const TagLoss tags_self = loss_tags(pred.tag, labels, with_self);

    out.pull = tags_cross.pull;
    out.push = tags_cross.push;
    out.push_with_self = tags_self.push;
    out.tag_total = cfg.tags.include_self_pairs ? tags_self.total : tags_cross.total;

    // The composite repeats the pooled tag loss once per identity-bearing
    // joint type, matching the written objective term for term.
    out.total = out.confidence + cfg.alpha * out.displacement +
                cfg.beta * skeleton.root_type_count() * out.tag_total;
    return out;
}

std::vector<PersonLabels> derive_labels(const FieldStack& gt,
                                        const SkeletonSpec& skeleton) {
    DecoderConfig cfg;
    std::vector<std::vector<Detection>> peaks(
        static_cast<std::size_t>(skeleton.joint_count()));
    for (int id : skeleton.cluster_order()) {
        const auto uid = static_cast<std::size_t>(id);
        if (uid >= gt.conf.size()) continue;
        peaks[uid] = detect_peaks(gt.conf[uid], id, cfg);
        if (uid < gt.tag.size() && !gt.tag[uid].empty())
            for (Detection& det : peaks[uid]) det.tag = gt.tag[uid].at(det.x, det.y);
    }
    std::vector<PersonLabels> labels;
    for (const PersonCluster& cluster : cluster_rjg(peaks, skeleton, cfg)) {
        PersonLabels person;
        for (int id : skeleton.cluster_order()) {
            const auto& member = cluster.members[static_cast<std::size_t>(id)];
            if (member) person.push_back({id, member->x, member->y});
        }
        labels.push_back(std::move(person));
    }
    return labels;
}

std::vector<PersonLabels> labels_from_poses(const std::vector<PersonPose>& poses,
                                            const SkeletonSpec& skeleton,
                                            int width, int height) {
    std::vector<PersonLabels> labels;
    for (PersonPose pose : poses) {
        fill_center(pose, skeleton);
        PersonLabels person;
        for (int id : skeleton.cluster_order()) {
            const Keypoint& kp = pose.joints[static_cast<std::size_t>(id)];
            if (!kp.visible) continue;
            const int x = static_cast<int>(std::llround(kp.x));
            const int y = static_cast<int>(std::llround(kp.y));
            if (x < 0 || x >= width || y < 0 || y >= height) continue;
            person.push_back({id, x, y});
        }
        labels.push_back(std::move(person));
    }
    return labels;
}

}  // namespace de
