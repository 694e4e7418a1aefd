#pragma once

#include <optional>
#include <span>
#include <vector>

#include "de/fieldstack.hpp"
#include "de/skeleton.hpp"

namespace de {

struct Detection {
    int joint_id = -1;
    int x = 0;
    int y = 0;
    double confidence = 0.0;
    double tag = 0.0;     // filled for root-group joints
    int person_id = -1;   // -1 until identified

    Vec2 pos() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

enum class TracingMode {
    Hierarchical,  // short hops child -> parent, long-range center fallback
    BasicOnly,     // every adjacency joint traces straight to the center
};

struct DecoderConfig {
    double peak_threshold = 0.1;
    int nms_window = 3;               // odd, >= 3
    double tag_cluster_threshold = 0.5;
    double match_radius = 7.0;        // traced endpoints must land this close to a peak
    int max_persons = 30;
    TracingMode tracing = TracingMode::Hierarchical;
    bool center_fallback = true;      // long-range rescue when a hop fails
    bool refine = false;              // run the mutual refine pass after assembly
    double refine_conf_threshold = 0.75;
};

// Local maxima of an nms_window x nms_window neighborhood, value >=
// peak_threshold, sorted by descending confidence (ties in row-major
// pixel order). On an exact plateau the row-major-first pixel wins.
std::vector<Detection> detect_peaks(const Grid& conf, int joint_id,
                                    const DecoderConfig& cfg);

struct PersonCluster {
    int person_id = -1;
    // Indexed by joint id; the chosen detection per root joint type.
    std::vector<std::optional<Detection>> members;
    double tag_sum = 0.0;
    int tag_count = 0;

    double mean_tag() const { return tag_count ? tag_sum / tag_count : 0.0; }
};

// Greedy identity clustering of root-group detections by tag value.
// detections_by_joint is indexed by joint id and must cover the skeleton.
std::vector<PersonCluster> cluster_rjg(
    const std::vector<std::vector<Detection>>& detections_by_joint,
    const SkeletonSpec& skeleton, const DecoderConfig& cfg);

// Follows det's displacement vector and returns the index of the
// target-type peak nearest the endpoint, if any lies within
// match_radius. nullopt = no match (endpoint off-grid or no peak close
// enough) and the caller should fall back.
std::optional<std::size_t> trace_joint(const Detection& det, const Grid& disp_x,
                                       const Grid& disp_y,
                                       std::span<const Detection> target_peaks,
                                       double diag, double match_radius);

// Full decode of one stack: peaks, tag clustering, hierarchical tracing
// with center fallback, conflict resolution, center stripped and scores
// filled. Deterministic for a given stack + config.
std::vector<PersonPose> assemble_poses(const FieldStack& stack,
                                       const SkeletonSpec& skeleton,
                                       const DecoderConfig& cfg);

// assemble_poses plus the optional mutual refine pass (cfg.refine).
std::vector<PersonPose> decode_stack(const FieldStack& stack,
                                     const SkeletonSpec& skeleton,
                                     const DecoderConfig& cfg);

}  // namespace de
