#pragma once

#include <vector>

#include "de/fieldstack.hpp"
#include "de/skeleton.hpp"

namespace de {

// Pixel location of one labeled root-group joint, for tag-loss lookups.
struct LabeledJoint {
    int joint_id = -1;
    int x = 0;
    int y = 0;
};
using PersonLabels = std::vector<LabeledJoint>;

struct TagLossConfig {
    double sigma_tag = 1.0;         // push kernel width
    bool include_self_pairs = false;  // keep the n == n' diagonal of the push sum
};

struct TagLoss {
    double pull = 0.0;
    double push = 0.0;
    double total = 0.0;  // pull + push with the configured push variant
};

struct LossConfig {
    double alpha = 0.01;  // displacement weight
    double beta = 0.01;   // tag weight
    bool mask_displacement = true;  // evaluate L^D on ground-truth support only
    TagLossConfig tags;
};

struct LossBreakdown {
    double confidence = 0.0;    // sum of per-type MSE terms
    double displacement = 0.0;  // sum of per-type smooth-L1 terms
    double pull = 0.0;
    double push = 0.0;
    double push_with_self = 0.0;  // push including the n == n' diagonal
    double tag_total = 0.0;
    double total = 0.0;
};

// Mean squared error over all pixels. Throws DimensionMismatchError.
double loss_confidence(const Grid& pred, const Grid& gt);

// Smooth L1 (quadratic below 1, linear above), summed over the two
// channels and averaged over pixels where mask is nonzero. An empty mask
// yields 0 by convention.
double loss_displacement(const Grid& pred_x, const Grid& pred_y,
                         const Grid& gt_x, const Grid& gt_y,
                         const Grid& mask);

// Pull/push tag losses. Tag grids are indexed by joint id; `labels`
// holds each person's labeled root joints (persons with none are
// skipped). Throws NoLabeledJointsError when nobody has a labeled joint.
TagLoss loss_tags(const std::vector<Grid>& tag_grids,
                  const std::vector<PersonLabels>& labels,
                  const TagLossConfig& cfg);

// Composite objective over two aligned stacks. The tag term reads the
// predicted tag grids at the given ground-truth locations; displacement
// masks are the ground-truth confidence supports.
LossBreakdown loss_total(const FieldStack& pred, const FieldStack& gt,
                         const SkeletonSpec& skeleton,
                         const std::vector<PersonLabels>& labels,
                         const LossConfig& cfg);

// Recovers per-person labeled root-joint locations from a ground-truth
// stack (peak detection + tag clustering), for loss evaluation when only
// the stack is available.
std::vector<PersonLabels> derive_labels(const FieldStack& gt,
                                        const SkeletonSpec& skeleton);

// Labels straight from ground-truth poses (centers filled on the fly).
std::vector<PersonLabels> labels_from_poses(const std::vector<PersonPose>& poses,
                                            const SkeletonSpec& skeleton,
                                            int width, int height);

}  // namespace de
