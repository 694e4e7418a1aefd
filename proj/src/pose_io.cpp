#include "de/pose_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "de/errors.hpp"

namespace de {
namespace {

using ordered_json = nlohmann::ordered_json;

nlohmann::json parse_or_throw(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

Scene scene_from_object(const nlohmann::json& j) {
    try {
        if (!j.is_object() || j.value("format", "") != "de-scene")
            throw FormatError("scene json: missing de-scene format marker");
        if (j.at("version").get<int>() != 1)
            throw FormatError("scene json: unsupported version");
        Scene scene;
        scene.skeleton_name = j.at("skeleton").get<std::string>();
        scene.width = j.at("width").get<int>();
        scene.height = j.at("height").get<int>();
        if (scene.width < 1 || scene.height < 1)
            throw FormatError("scene json: bad dimensions");
        std::size_t joint_count = 0;
        for (const auto& pj : j.at("persons")) {
            PersonPose pose;
            pose.person_id = pj.value("id", static_cast<int>(scene.persons.size()));
            pose.score = pj.value("score", 0.0);
            for (const auto& kj : pj.at("joints")) {
                Keypoint kp;
                kp.x = kj.at("x").get<double>();
                kp.y = kj.at("y").get<double>();
                kp.visible = kj.at("visible").get<bool>();
                kp.confidence = kj.value("confidence", kp.visible ? 1.0 : 0.0);
                pose.joints.push_back(kp);
            }
            if (joint_count == 0) joint_count = pose.joints.size();
            if (pose.joints.empty() || pose.joints.size() != joint_count)
                throw FormatError("scene json: inconsistent joint counts");
            scene.persons.push_back(std::move(pose));
            scene.scales.push_back(pj.value("scale", 0.0));
            scene.head_diags.push_back(pj.value("head_diag", 0.0));
        }
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("scene json: ") + e.what());
    }
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
    ordered_json j;
    j["format"] = "de-scene";
    j["version"] = 1;
    j["skeleton"] = scene.skeleton_name;
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["persons"] = ordered_json::array();
    for (std::size_t n = 0; n < scene.persons.size(); ++n) {
        const PersonPose& pose = scene.persons[n];
        ordered_json pj;
        pj["id"] = pose.person_id;
        pj["score"] = pose.score;
        pj["scale"] = n < scene.scales.size() ? scene.scales[n] : 0.0;
        pj["head_diag"] = n < scene.head_diags.size() ? scene.head_diags[n] : 0.0;
        pj["joints"] = ordered_json::array();
        for (const Keypoint& kp : pose.joints)
            pj["joints"].push_back({{"x", kp.x},
                                    {"y", kp.y},
                                    {"visible", kp.visible},
                                    {"confidence", kp.confidence}});
        j["persons"].push_back(std::move(pj));
    }
    return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
    return scene_from_object(parse_or_throw(text, "scene json"));
}

Scene scene_from_stream(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return scene_from_json(buf.str());
}

void scene_to_stream(const Scene& scene, std::ostream& out) {
    out << scene_to_json(scene);
}

std::string results_to_json(const std::vector<PersonPose>& poses,
                            const SkeletonSpec& skeleton, int image_id) {
    ordered_json arr = ordered_json::array();
    for (const PersonPose& pose : poses) {
        ordered_json item;
        item["image_id"] = image_id;
        item["category_id"] = 1;
        ordered_json kps = ordered_json::array();
        for (const auto& joint : skeleton.joints()) {
            if (joint.group == JointGroup::CenterPseudo) continue;
            const Keypoint& kp = pose.joints[static_cast<std::size_t>(joint.id)];
            if (kp.visible) {
                kps.push_back(kp.x);
                kps.push_back(kp.y);
                kps.push_back(2);
            } else {
                kps.push_back(0);
                kps.push_back(0);
                kps.push_back(0);
            }
        }
        item["keypoints"] = std::move(kps);
        item["score"] = pose.score;
        arr.push_back(std::move(item));
    }
    return arr.dump(2) + "\n";
}

namespace {

std::vector<PersonPose> results_from_array(const nlohmann::json& arr,
                                           const SkeletonSpec& skeleton) {
    std::vector<int> annotated;
    for (const auto& joint : skeleton.joints())
        if (joint.group != JointGroup::CenterPseudo) annotated.push_back(joint.id);

    std::vector<PersonPose> poses;
    try {
        for (const auto& item : arr) {
            const auto& kps = item.at("keypoints");
            if (!kps.is_array() || kps.size() != annotated.size() * 3)
                throw FormatError("results json: keypoints length does not fit skeleton");
            PersonPose pose = make_empty_pose(skeleton, static_cast<int>(poses.size()));
            pose.score = item.value("score", 0.0);
            for (std::size_t i = 0; i < annotated.size(); ++i) {
                Keypoint& kp = pose.joints[static_cast<std::size_t>(annotated[i])];
                kp.x = kps.at(3 * i).get<double>();
                kp.y = kps.at(3 * i + 1).get<double>();
                kp.visible = kps.at(3 * i + 2).get<double>() > 0.0;
                kp.confidence = kp.visible ? 1.0 : 0.0;
            }
            poses.push_back(std::move(pose));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("results json: ") + e.what());
    }
    return poses;
}

}  // namespace

std::vector<PersonPose> results_from_json(const std::string& text,
                                          const SkeletonSpec& skeleton) {
    const auto j = parse_or_throw(text, "results json");
    if (!j.is_array()) throw FormatError("results json: expected an array");
    return results_from_array(j, skeleton);
}

std::vector<Scene> scenes_from_json(const std::string& text) {
    const auto j = parse_or_throw(text, "scene json");
    if (j.is_object() && j.contains("images")) {
        std::vector<Scene> scenes;
        for (const auto& item : j.at("images")) scenes.push_back(scene_from_object(item));
        return scenes;
    }
    return {scene_from_object(j)};
}

std::vector<std::vector<PersonPose>> results_batch_from_json(
    const std::string& text, const SkeletonSpec& skeleton) {
    const auto j = parse_or_throw(text, "results json");
    if (j.is_object() && j.contains("images")) {
        std::vector<std::vector<PersonPose>> images;
        for (const auto& item : j.at("images"))
            images.push_back(results_from_array(item, skeleton));
        return images;
    }
    if (!j.is_array()) throw FormatError("results json: expected an array");
    if (!j.empty() && j.front().is_array()) {
        std::vector<std::vector<PersonPose>> images;
        for (const auto& item : j) images.push_back(results_from_array(item, skeleton));
        return images;
    }
    return {results_from_array(j, skeleton)};
}

}  // namespace de
