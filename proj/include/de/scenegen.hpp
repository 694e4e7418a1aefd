#pragma once

#include <cstdint>
#include <vector>

#include "de/rng.hpp"
#include "de/skeleton.hpp"

namespace de {

struct SceneConfig {
    int width = 256;
    int height = 256;
    int person_count = 3;
    double min_scale = 40.0;   // person height range, pixels
    double max_scale = 90.0;
    double min_separation = 10.0;  // between same-type joints of different people
    double jitter = 2.0;           // uniform per-joint offset amplitude
    double drop_joint_prob = 0.0;  // chance a non-center joint goes invisible
    int max_attempts = 200;        // per-person placement retries
};

struct Scene {
    int width = 0;
    int height = 0;
    std::string skeleton_name;
    std::vector<PersonPose> persons;
    std::vector<double> scales;      // per person, generated height
    std::vector<double> head_diags;  // per person, facial bbox diagonal
};

// Deterministic articulated-figure sampler. Same seed, same scene.
// Throws PlacementFailureError when a person cannot be placed within
// cfg.max_attempts tries.
Scene generate_scene(uint64_t seed, const SceneConfig& cfg,
                     const SkeletonSpec& skeleton);

}  // namespace de
