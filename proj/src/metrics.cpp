#include "de/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "de/errors.hpp"

namespace de {
namespace {

constexpr double kAreaMediumLo = 32.0 * 32.0;
constexpr double kAreaMediumHi = 96.0 * 96.0;

std::vector<double> oks_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
    return t;
}

bool has_visible(const PersonPose& pose, const SkeletonSpec& skeleton) {
    for (const auto& joint : skeleton.joints())
        if (joint.group != JointGroup::CenterPseudo &&
            pose.joints[static_cast<std::size_t>(joint.id)].visible)
            return true;
    return false;
}

// Per-image detection context shared by all thresholds.
struct ImageContext {
    std::vector<std::size_t> pred_order;          // by descending score
    std::vector<std::vector<double>> oks_matrix;  // [pred][gt]
    std::vector<bool> gt_valid;
    std::vector<double> gt_area;
};

ImageContext build_context(const EvalImage& image, const SkeletonSpec& skeleton) {
    ImageContext ctx;
    const std::size_t np = image.preds.size();
    const std::size_t ng = image.gts.size();
    ctx.pred_order.resize(np);
    for (std::size_t i = 0; i < np; ++i) ctx.pred_order[i] = i;
    std::stable_sort(ctx.pred_order.begin(), ctx.pred_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return image.preds[a].score > image.preds[b].score;
                     });
    ctx.gt_valid.resize(ng);
    ctx.gt_area.resize(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        ctx.gt_valid[g] = has_visible(image.gts[g], skeleton);
        const double s = g < image.gt_scales.size() && image.gt_scales[g] > 0.0
                             ? image.gt_scales[g]
                             : keypoint_bbox_scale(image.gts[g], skeleton);
        ctx.gt_area[g] = s * s;
    }
    ctx.oks_matrix.assign(np, std::vector<double>(ng, 0.0));
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t g = 0; g < ng; ++g) {
            if (!ctx.gt_valid[g]) continue;
            const double s = std::sqrt(ctx.gt_area[g]);
            ctx.oks_matrix[p][g] =
                oks(image.preds[p], image.gts[g], skeleton, s).value_or(0.0);
        }
    return ctx;
}

struct ScoredFlag {
    double score;
    bool tp;
};

// One threshold, one area band: greedy COCO matching with out-of-band
// ground truths acting as ignore regions.
struct BandEval {
    std::vector<ScoredFlag> flags;  // non-ignored predictions only
    int considered_gts = 0;
    int matched_gts = 0;
};

BandEval evaluate_band(const std::vector<EvalImage>& images,
                       const std::vector<ImageContext>& contexts, double threshold,
                       double area_lo, double area_hi) {
    BandEval out;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const EvalImage& image = images[i];
        const ImageContext& ctx = contexts[i];
        const std::size_t ng = image.gts.size();
        std::vector<bool> considered(ng);
        for (std::size_t g = 0; g < ng; ++g)
            considered[g] = ctx.gt_valid[g] && ctx.gt_area[g] > area_lo &&
                            ctx.gt_area[g] <= area_hi;
        out.considered_gts +=
            static_cast<int>(std::count(considered.begin(), considered.end(), true));

        std::vector<bool> taken(ng, false);
        for (std::size_t p : ctx.pred_order) {
            int best = -1;
            double best_oks = -1.0;
            for (std::size_t g = 0; g < ng; ++g) {
                if (taken[g] || !considered[g]) continue;
                const double v = ctx.oks_matrix[p][g];
                if (v >= threshold && v > best_oks) {
                    best_oks = v;
                    best = static_cast<int>(g);
                }
            }
            if (best >= 0) {
                taken[static_cast<std::size_t>(best)] = true;
                out.flags.push_back({image.preds[p].score, true});
                ++out.matched_gts;
                continue;
            }
            // No in-band match: an out-of-band gt may absorb the
            // prediction, removing it from precision entirely.
            int ignore = -1;
            double ignore_oks = -1.0;
            for (std::size_t g = 0; g < ng; ++g) {
                if (taken[g] || considered[g]) continue;
                const double v = ctx.oks_matrix[p][g];
                if (v >= threshold && v > ignore_oks) {
                    ignore_oks = v;
                    ignore = static_cast<int>(g);
                }
            }
            if (ignore >= 0) {
                taken[static_cast<std::size_t>(ignore)] = true;
                continue;
            }
            out.flags.push_back({image.preds[p].score, false});
        }
    }
    return out;
}

double average_precision(BandEval eval) {
    if (eval.considered_gts == 0) return 0.0;
    std::stable_sort(eval.flags.begin(), eval.flags.end(),
                     [](const ScoredFlag& a, const ScoredFlag& b) {
                         return a.score > b.score;
                     });
    const std::size_t n = eval.flags.size();
    std::vector<double> precision(n), recall(n);
    int tp = 0, fp = 0;
    for (std::size_t k = 0; k < n; ++k) {
        eval.flags[k].tp ? ++tp : ++fp;
        precision[k] = static_cast<double>(tp) / (tp + fp);
        recall[k] = static_cast<double>(tp) / eval.considered_gts;
    }
    for (std::size_t k = n; k-- > 1;)
        precision[k - 1] = std::max(precision[k - 1], precision[k]);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!eval.flags[k].tp) continue;
        ap += (recall[k] - prev_recall) * precision[k];
        prev_recall = recall[k];
    }
    return ap;
}

}  // namespace

std::optional<double> oks(const PersonPose& pred, const PersonPose& gt,
                          const SkeletonSpec& skeleton, double scale) {
    double sum = 0.0;
    int count = 0;
    for (const auto& joint : skeleton.joints()) {
        if (joint.group == JointGroup::CenterPseudo) continue;
        const Keypoint& g = gt.joints[static_cast<std::size_t>(joint.id)];
        if (!g.visible) continue;
        ++count;
        const Keypoint& p = pred.joints[static_cast<std::size_t>(joint.id)];
        const double dx = p.x - g.x;
        const double dy = p.y - g.y;
        const double d2 = dx * dx + dy * dy;
        const double k = joint.oks_k;
        if (k <= 0.0) {
            sum += d2 == 0.0 ? 1.0 : 0.0;
            continue;
        }
        sum += std::exp(-d2 / (2.0 * scale * scale * k * k));
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

double keypoint_bbox_scale(const PersonPose& pose, const SkeletonSpec& skeleton) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    bool any = false;
    for (const auto& joint : skeleton.joints()) {
        if (joint.group == JointGroup::CenterPseudo) continue;
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
        if (!kp.visible) continue;
        any = true;
        x0 = std::min(x0, kp.x);
        x1 = std::max(x1, kp.x);
        y0 = std::min(y0, kp.y);
        y1 = std::max(y1, kp.y);
    }
    if (!any) return 1.0;
    return std::max(1.0, std::sqrt((x1 - x0) * (y1 - y0)));
}

double facial_head_diag(const PersonPose& pose, const SkeletonSpec& skeleton) {
    if (skeleton.facial_ids().empty())
        throw MissingHeadBoxError("skeleton has no facial joints");
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    bool any = false;
    for (int id : skeleton.facial_ids()) {
        const Keypoint& kp = pose.joints[static_cast<std::size_t>(id)];
        if (!kp.visible) continue;
        any = true;
        x0 = std::min(x0, kp.x);
        x1 = std::max(x1, kp.x);
        y0 = std::min(y0, kp.y);
        y1 = std::max(y1, kp.y);
    }
    if (!any) throw MissingHeadBoxError("pose has no visible facial joints");
    const double w = x1 - x0, h = y1 - y0;
    return std::max(1.0, std::sqrt(w * w + h * h));
}

ApResult evaluate_ap(const std::vector<EvalImage>& images,
                     const SkeletonSpec& skeleton) {
    std::vector<ImageContext> contexts;
    contexts.reserve(images.size());
    for (const EvalImage& image : images) contexts.push_back(build_context(image, skeleton));

    const double inf = std::numeric_limits<double>::infinity();
    ApResult out;
    double recall_sum = 0.0;
    const auto thresholds = oks_thresholds();
    for (double t : thresholds) {
        BandEval full = evaluate_band(images, contexts, t, 0.0, inf);
        const double recall = full.considered_gts
                                  ? static_cast<double>(full.matched_gts) / full.considered_gts
                                  : 0.0;
        recall_sum += recall;
        const double ap = average_precision(std::move(full));
        out.ap += ap;
        if (t == 0.50) out.ap50 = ap;
        if (t == 0.75) out.ap75 = ap;
        out.ap_medium += average_precision(
            evaluate_band(images, contexts, t, kAreaMediumLo, kAreaMediumHi));
        out.ap_large += average_precision(
            evaluate_band(images, contexts, t, kAreaMediumHi, inf));
    }
    const double n = static_cast<double>(thresholds.size());
    out.ap /= n;
    out.ap_medium /= n;
    out.ap_large /= n;
    out.ar = recall_sum / n;
    return out;
}

PckhResult evaluate_pckh(const std::vector<EvalImage>& images,
                         const SkeletonSpec& skeleton, double alpha) {
    const auto joint_count = static_cast<std::size_t>(skeleton.joint_count());
    std::vector<int> total(joint_count, 0), correct(joint_count, 0);

    for (const EvalImage& image : images) {
        const std::size_t ng = image.gts.size();
        std::vector<double> diag(ng);
        for (std::size_t g = 0; g < ng; ++g)
            diag[g] = g < image.gt_head_diags.size() && image.gt_head_diags[g] > 0.0
                          ? image.gt_head_diags[g]
                          : facial_head_diag(image.gts[g], skeleton);

        // Predictions claim the nearest unmatched ground truth by mean
        // joint distance, most confident prediction first.
        std::vector<std::size_t> order(image.preds.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return image.preds[a].score > image.preds[b].score;
        });
        std::vector<int> match_of_gt(ng, -1);
        for (std::size_t p : order) {
            int best = -1;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < ng; ++g) {
                if (match_of_gt[g] >= 0) continue;
                double sum = 0.0;
                int cnt = 0;
                for (const auto& joint : skeleton.joints()) {
                    if (joint.group == JointGroup::CenterPseudo) continue;
                    const auto id = static_cast<std::size_t>(joint.id);
                    if (!image.gts[g].joints[id].visible) continue;
                    sum += distance(image.preds[p].joints[id].pos(),
                                    image.gts[g].joints[id].pos());
                    ++cnt;
                }
                if (!cnt) continue;
                const double mean = sum / cnt;
                if (mean < best_dist) {
                    best_dist = mean;
                    best = static_cast<int>(g);
                }
            }
            if (best >= 0) match_of_gt[static_cast<std::size_t>(best)] = static_cast<int>(p);
        }

        for (std::size_t g = 0; g < ng; ++g) {
            const double limit = alpha * 0.6 * diag[g];
            for (const auto& joint : skeleton.joints()) {
                if (joint.group == JointGroup::CenterPseudo) continue;
                const auto id = static_cast<std::size_t>(joint.id);
                if (!image.gts[g].joints[id].visible) continue;
                ++total[id];
                if (match_of_gt[g] < 0) continue;
                const auto& pred = image.preds[static_cast<std::size_t>(match_of_gt[g])];
                if (distance(pred.joints[id].pos(), image.gts[g].joints[id].pos()) <= limit)
                    ++correct[id];
            }
        }
    }

    PckhResult out;
    out.per_joint.assign(joint_count, -1.0);
    for (std::size_t id = 0; id < joint_count; ++id) {
        out.total_keypoints += total[id];
        out.correct_keypoints += correct[id];
        if (total[id]) out.per_joint[id] = static_cast<double>(correct[id]) / total[id];
    }
    out.overall = out.total_keypoints
                      ? static_cast<double>(out.correct_keypoints) / out.total_keypoints
                      : 0.0;
    return out;
}

}  // namespace de
