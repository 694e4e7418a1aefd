#pragma once

#include "de/fieldstack.hpp"
#include "de/skeleton.hpp"

namespace de {

// Mutual refine pass: a joint whose confidence is below that of a
// high-confidence neighbor (> conf_threshold) is moved to the
// confidence-weighted average of its own location and the neighbor
// locations propagated along the displacement edges. Confidences are
// left untouched. One pass, fixed order root -> level 1 -> level 2 ->
// facial; neighbors are the hierarchy-edge partners plus the
// facial/center pairs, the only edges with encoded displacements.
PersonPose refine_pose(const PersonPose& pose, const FieldStack& stack,
                       const SkeletonSpec& skeleton,
                       double conf_threshold = 0.75);

}  // namespace de
