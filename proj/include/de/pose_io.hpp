#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "de/scenegen.hpp"
#include "de/skeleton.hpp"

namespace de {

// Scene JSON ("de-scene" format). Parsing throws FormatError on anything
// malformed: wrong magic, bad version, missing fields, joint count
// mismatching the skeleton.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
Scene scene_from_stream(std::istream& in);
void scene_to_stream(const Scene& scene, std::ostream& out);

// Detection results as a flat keypoint-annotation array (image_id,
// category_id, keypoints triplets, score). The center pseudo-joint is
// not emitted.
std::string results_to_json(const std::vector<PersonPose>& poses,
                            const SkeletonSpec& skeleton, int image_id = 0);
std::vector<PersonPose> results_from_json(const std::string& text,
                                          const SkeletonSpec& skeleton);

// Multi-image containers for eval: either a single scene object or
// {"images": [scene, ...]} / [results-array, ...].
std::vector<Scene> scenes_from_json(const std::string& text);
std::vector<std::vector<PersonPose>> results_batch_from_json(
    const std::string& text, const SkeletonSpec& skeleton);

}  // namespace de
