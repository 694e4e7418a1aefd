#include <sstream>
#include <string>

#include "doctest.h"

#include "de/errors.hpp"
#include "de/pose_io.hpp"
#include "de/scenegen.hpp"
#include "de/skeleton.hpp"

using namespace de;

namespace {

Scene sample_scene() {
    SceneConfig cfg;
    cfg.person_count = 2;
    cfg.drop_joint_prob = 0.3;
    return generate_scene(417, cfg, default_coco_skeleton());
}

}  // namespace

TEST_CASE("scene json round trips every field exactly") {
    Scene scene = sample_scene();
    scene.persons[0].score = 0.6875;
    scene.persons[0].joints[5].confidence = 0.37201;
    scene.persons[1].score = 0.25;

    const Scene back = scene_from_json(scene_to_json(scene));
    CHECK(back.width == scene.width);
    CHECK(back.height == scene.height);
    CHECK(back.skeleton_name == scene.skeleton_name);
    CHECK(back.persons == scene.persons);
    CHECK(back.scales == scene.scales);
    CHECK(back.head_diags == scene.head_diags);
}

TEST_CASE("scene streams mirror the string api") {
    const Scene scene = sample_scene();
    std::stringstream buf;
    scene_to_stream(scene, buf);
    CHECK(buf.str() == scene_to_json(scene));
    const Scene back = scene_from_stream(buf);
    CHECK(back.persons == scene.persons);
}

TEST_CASE("scene parsing applies defaults for optional fields") {
    const std::string text = R"({
        "format": "de-scene", "version": 1, "skeleton": "coco17",
        "width": 64, "height": 48,
        "persons": [
          {"joints": [{"x": 1.5, "y": 2.0, "visible": true},
                      {"x": 0.0, "y": 0.0, "visible": false}]},
          {"joints": [{"x": 9.0, "y": 8.0, "visible": true},
                      {"x": 7.0, "y": 6.0, "visible": true}]}
        ]})";
    const Scene scene = scene_from_json(text);
    REQUIRE(scene.persons.size() == 2);
    CHECK(scene.persons[0].person_id == 0);
    CHECK(scene.persons[1].person_id == 1);
    CHECK(scene.persons[0].score == 0.0);
    CHECK(scene.persons[0].joints[0].confidence == 1.0);
    CHECK(scene.persons[0].joints[1].confidence == 0.0);
    CHECK(scene.scales == std::vector<double>{0.0, 0.0});
    CHECK(scene.head_diags == std::vector<double>{0.0, 0.0});
}

TEST_CASE("malformed scene json is rejected") {
    const Scene scene = sample_scene();
    const std::string good = scene_to_json(scene);

    SUBCASE("not json") { CHECK_THROWS_AS(scene_from_json("{nope"), FormatError); }
    SUBCASE("missing format marker") {
        CHECK_THROWS_AS(scene_from_json("{\"width\": 4}"), FormatError);
    }
    SUBCASE("wrong format marker") {
        std::string bad = good;
        const auto at = bad.find("de-scene");
        REQUIRE(at != std::string::npos);
        bad.replace(at, 8, "de-other");
        CHECK_THROWS_AS(scene_from_json(bad), FormatError);
    }
    SUBCASE("unsupported version") {
        std::string bad = good;
        const auto at = bad.find("\"version\": 1");
        REQUIRE(at != std::string::npos);
        bad.replace(at, 12, "\"version\": 2");
        CHECK_THROWS_AS(scene_from_json(bad), FormatError);
    }
    SUBCASE("top level array") {
        CHECK_THROWS_AS(scene_from_json("[1, 2]"), FormatError);
    }
    SUBCASE("zero width") {
        const std::string bad = R"({"format": "de-scene", "version": 1,
            "skeleton": "coco17", "width": 0, "height": 48, "persons": []})";
        CHECK_THROWS_AS(scene_from_json(bad), FormatError);
    }
    SUBCASE("inconsistent joint counts") {
        const std::string bad = R"({"format": "de-scene", "version": 1,
            "skeleton": "coco17", "width": 64, "height": 48,
            "persons": [
              {"joints": [{"x": 1, "y": 2, "visible": true}]},
              {"joints": [{"x": 1, "y": 2, "visible": true},
                          {"x": 3, "y": 4, "visible": true}]}
            ]})";
        CHECK_THROWS_AS(scene_from_json(bad), FormatError);
    }
    SUBCASE("joint missing a coordinate") {
        const std::string bad = R"({"format": "de-scene", "version": 1,
            "skeleton": "coco17", "width": 64, "height": 48,
            "persons": [{"joints": [{"y": 2, "visible": true}]}]})";
        CHECK_THROWS_AS(scene_from_json(bad), FormatError);
    }
}

TEST_CASE("results round trip keeps coordinates and visibility") {
    const SkeletonSpec skeleton = default_coco_skeleton();
    const Scene scene = sample_scene();
    std::vector<PersonPose> poses = scene.persons;
    poses[0].score = 0.875;
    poses[1].score = 0.5;
    poses[0].joints[5].confidence = 0.6;  // collapses to 1.0 on the way back

    const std::string text = results_to_json(poses, skeleton, 7);
    CHECK(text.find("\"image_id\": 7") != std::string::npos);
    CHECK(text.find("\"category_id\": 1") != std::string::npos);

    const auto back = results_from_json(text, skeleton);
    REQUIRE(back.size() == 2);
    for (std::size_t p = 0; p < back.size(); ++p) {
        CHECK(back[p].score == poses[p].score);
        REQUIRE(back[p].joints.size() == 18);
        for (const auto& joint : skeleton.joints()) {
            if (joint.group == JointGroup::CenterPseudo) continue;
            const Keypoint& in = poses[p].joints[static_cast<std::size_t>(joint.id)];
            const Keypoint& out = back[p].joints[static_cast<std::size_t>(joint.id)];
            CHECK(out.visible == in.visible);
            if (in.visible) {
                CHECK(out.x == in.x);
                CHECK(out.y == in.y);
                CHECK(out.confidence == 1.0);
            } else {
                CHECK(out.confidence == 0.0);
            }
        }
        CHECK_FALSE(back[p].joints[static_cast<std::size_t>(skeleton.center_id())].visible);
    }
}

TEST_CASE("results parsing validates the keypoint triplet count") {
    const SkeletonSpec skeleton = default_coco_skeleton();
    std::string fifty = "[{\"keypoints\": [";
    for (int i = 0; i < 50; ++i) fifty += i ? ",0" : "0";
    fifty += "], \"score\": 1.0}]";
    CHECK_THROWS_AS(results_from_json(fifty, skeleton), FormatError);
    CHECK_THROWS_AS(results_from_json("{\"a\": 1}", skeleton), FormatError);
    CHECK_THROWS_AS(results_from_json("[{\"keypoints\": \"x\"}]", skeleton), FormatError);
    CHECK_THROWS_AS(results_from_json("[{\"score\": 1.0}]", skeleton), FormatError);
    CHECK(results_from_json("[]", skeleton).empty());
}

TEST_CASE("scene batches accept single objects and image lists") {
    SceneConfig cfg;
    cfg.person_count = 1;
    const Scene a = generate_scene(1, cfg, default_coco_skeleton());
    const Scene b = generate_scene(2, cfg, default_coco_skeleton());

    const auto single = scenes_from_json(scene_to_json(a));
    REQUIRE(single.size() == 1);
    CHECK(single[0].persons == a.persons);

    const std::string batch =
        "{\"images\": [" + scene_to_json(a) + "," + scene_to_json(b) + "]}";
    const auto both = scenes_from_json(batch);
    REQUIRE(both.size() == 2);
    CHECK(both[0].persons == a.persons);
    CHECK(both[1].persons == b.persons);
}

TEST_CASE("result batches accept flat, nested, and object forms") {
    const SkeletonSpec skeleton = default_coco_skeleton();
    const Scene scene = sample_scene();
    const std::string one = results_to_json(scene.persons, skeleton);

    const auto flat = results_batch_from_json(one, skeleton);
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].size() == 2);

    const std::string nested = "[[]," + one + "]";
    const auto two = results_batch_from_json(nested, skeleton);
    REQUIRE(two.size() == 2);
    CHECK(two[0].empty());
    CHECK(two[1].size() == 2);

    const std::string object = "{\"images\": [" + one + "," + one + "]}";
    const auto obj = results_batch_from_json(object, skeleton);
    REQUIRE(obj.size() == 2);
    CHECK(obj[0].size() == 2);
    CHECK(obj[1].size() == 2);

    const auto empty = results_batch_from_json("[]", skeleton);
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].empty());
    CHECK_THROWS_AS(results_batch_from_json("7", skeleton), FormatError);
}
