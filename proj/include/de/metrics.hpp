#pragma once

#include <optional>
#include <vector>

#include "de/skeleton.hpp"

namespace de {

// One evaluation image: ground truth and predictions over the same skeleton.
struct EvalImage {
    std::vector<PersonPose> gts;
    std::vector<PersonPose> preds;
    std::vector<double> gt_scales;      // per gt person, object scale s
    std::vector<double> gt_head_diags;  // per gt person, head bbox diagonal
};

// Object keypoint similarity between a prediction and a ground truth of
// scale s. Only gt-visible annotated joints participate; returns empty
// when none are visible.
std::optional<double> oks(const PersonPose& pred, const PersonPose& gt,
                          const SkeletonSpec& skeleton, double scale);

// sqrt of the visible-keypoint bounding-box area, floored at 1.
double keypoint_bbox_scale(const PersonPose& pose, const SkeletonSpec& skeleton);

// Diagonal of the facial-group bounding box, the head size proxy for PCKh.
// Throws MissingHeadBoxError when the skeleton has no facial joints or the
// pose has none of them visible.
double facial_head_diag(const PersonPose& pose, const SkeletonSpec& skeleton);

struct ApResult {
    double ap = 0.0;        // mean over thresholds .50:.05:.95
    double ap50 = 0.0;
    double ap75 = 0.0;
    double ap_medium = 0.0;  // 32^2 < area <= 96^2
    double ap_large = 0.0;   // area > 96^2
    double ar = 0.0;         // mean recall over the same thresholds
};

ApResult evaluate_ap(const std::vector<EvalImage>& images,
                     const SkeletonSpec& skeleton);

struct PckhResult {
    double overall = 0.0;                  // fraction of correct keypoints
    std::vector<double> per_joint;         // indexed by joint id, -1 when unseen
    int total_keypoints = 0;
    int correct_keypoints = 0;
};

PckhResult evaluate_pckh(const std::vector<EvalImage>& images,
                         const SkeletonSpec& skeleton, double alpha = 0.5);

}  // namespace de
