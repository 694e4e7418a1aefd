#pragma once

#include <span>
#include <utility>
#include <vector>

#include "de/fieldstack.hpp"
#include "de/skeleton.hpp"

namespace de {

enum class TagAssignment {
    SequentialIntegers,  // person index in input order, spaced 1.0 apart
    ProvidedPerPerson,   // person_id field used as the tag value
};

struct EncoderConfig {
    double sigma = 7.0;  // Gaussian spread of confidence peaks
    double tau = 7.0;    // regression disk radius
    int stride = 1;      // output = input resolution divided by stride
    TagAssignment tag_assignment = TagAssignment::SequentialIntegers;
};

// Synthetic peak-noise models for ablation harnesses.
enum class PeakNoiseMode {
    // The joint measurement itself moves: confidence and displacement
    // disks follow the noisy location, outgoing displacement targets
    // shift with it, and the confidence peak is damped by the falloff
    // the true map would report at the displaced position. Mimics a
    // mislocalized heatmap over a smooth regression head.
    MoveJoint,
    // Only the confidence disk moves (damped); displacement fields stay
    // anchored at the true joints, so a displaced peak can fall outside
    // its regression disk.
    MoveConfidenceOnly,
};

struct PeakNoise {
    PeakNoiseMode mode = PeakNoiseMode::MoveJoint;
    // offsets[person][joint id]; missing entries mean no noise.
    std::vector<std::vector<Vec2>> offsets;

    Vec2 offset(int person, int joint_id) const {
        if (person < 0 || person >= static_cast<int>(offsets.size())) return {};
        const auto& row = offsets[static_cast<std::size_t>(person)];
        if (joint_id < 0 || joint_id >= static_cast<int>(row.size())) return {};
        return row[static_cast<std::size_t>(joint_id)];
    }
};

struct EncodeResult {
    FieldStack stack;
    // Two persons' same-type root disks intersected; tags near the overlap
    // belong to the nearer joint, peaks themselves stay correct.
    bool tag_overlap = false;
    // (person index, joint id) pairs with no reachable displacement target.
    std::vector<std::pair<int, int>> untraceable;
};

// Confidence map for one joint type: truncated Gaussians of spread sigma
// inside radius-tau disks, per-pixel max where disks overlap. Poses must
// already carry their center joint (fill_center).
Grid encode_confidence(std::span<const PersonPose> poses, int joint_id,
                       const EncoderConfig& cfg, int width, int height);

struct TagEncodeResult {
    std::vector<Grid> tags;  // indexed by joint id; empty for non-root ids
    bool overlap = false;
};

// Identity tag grids for the root-group joint types.
TagEncodeResult encode_tags(std::span<const PersonPose> poses,
                            const SkeletonSpec& skeleton,
                            const EncoderConfig& cfg, int width, int height);

struct DisplacementEncodeResult {
    std::vector<Grid> disp_x, disp_y;    // child -> hierarchy parent (facial -> center)
    std::vector<Grid> basic_x, basic_y;  // adjacency joint -> center, tracing fallback
    std::vector<std::pair<int, int>> untraceable;
};

// Normalized displacement grids: each pixel p of a child disk stores
// (target - p) / Z so that p + Z * disp(p) lands on the target exactly.
DisplacementEncodeResult encode_displacements(std::span<const PersonPose> poses,
                                              const SkeletonSpec& skeleton,
                                              const EncoderConfig& cfg,
                                              int width, int height);

// Full ground-truth stack for a scene. Centers are computed (or
// recomputed) from the visible annotated joints before encoding.
EncodeResult encode_scene(std::span<const PersonPose> poses,
                          const SkeletonSpec& skeleton,
                          const EncoderConfig& cfg, int width, int height,
                          const PeakNoise* noise = nullptr);

}  // namespace de
