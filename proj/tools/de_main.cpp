#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "de/decoder.hpp"
#include "de/encoder.hpp"
#include "de/errors.hpp"
#include "de/fieldstack.hpp"
#include "de/losses.hpp"
#include "de/metrics.hpp"
#include "de/pose_io.hpp"
#include "de/refiner.hpp"
#include "de/render.hpp"
#include "de/rng.hpp"
#include "de/scenegen.hpp"
#include "de/skeleton.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_all(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Empty path or "-" means the standard stream, so subcommands pipe.
std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") return read_all(std::cin);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw de::FormatError("cannot open " + path);
    return read_all(f);
}

void write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw de::FormatError("cannot open " + path + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
}

de::SkeletonSpec resolve_skeleton(const std::string& name_or_path) {
    if (auto builtin = de::builtin_skeleton(name_or_path)) return *builtin;
    std::ifstream f(name_or_path);
    if (!f) throw de::FormatError("unknown skeleton (not builtin, not a file): " +
                                  name_or_path);
    return de::skeleton_from_json(read_all(f));
}

de::FieldStack stack_from_bytes(const std::string& bytes) {
    std::istringstream in(bytes);
    return de::read_defs(in);
}

std::string stack_to_bytes(const de::FieldStack& stack) {
    std::ostringstream out;
    de::write_defs(stack, out);
    return out.str();
}

bool onoff(const std::string& v) { return v == "on"; }

// Flag defaults may come from a JSON config file; explicit flags win.
class ConfigLayer {
public:
    ConfigLayer(const std::string& path, const std::string& subcommand) {
        if (path.empty()) return;
        std::ifstream f(path);
        if (!f) throw de::FormatError("cannot open config " + path);
        nlohmann::json root;
        try {
            root = nlohmann::json::parse(read_all(f));
        } catch (const nlohmann::json::exception& e) {
            throw de::FormatError(std::string("config: ") + e.what());
        }
        if (!root.is_object()) throw de::FormatError("config: expected a JSON object");
        for (const auto& [k, v] : root.items())
            if (!v.is_object()) merged_[k] = v;
        if (auto it = root.find(subcommand); it != root.end() && it->is_object())
            for (const auto& [k, v] : it->items()) merged_[k] = v;
    }

    template <typename T>
    void apply(const CLI::App& app, const std::string& flag, T& var) const {
        if (flag_given(app, flag)) return;
        const auto it = merged_.find(flag);
        if (it == merged_.end()) return;
        try {
            if constexpr (std::is_same_v<T, std::string>) {
                if (it->is_boolean()) {
                    var = it->get<bool>() ? "on" : "off";
                    return;
                }
            }
            var = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw de::FormatError("config: bad value for \"" + flag + "\"");
        }
    }

    bool flag_given(const CLI::App& app, const std::string& flag) const {
        const CLI::Option* opt = app.get_option_no_throw("--" + flag);
        return opt && opt->count() > 0;
    }

private:
    nlohmann::json merged_ = nlohmann::json::object();
};

void parallel_for(int jobs, int n, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double ms(std::chrono::steady_clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
}

int run(int argc, char** argv) {
    CLI::App app{"double-embedding pose pipeline: encode, decode, and evaluate "
                 "confidence/tag/displacement field stacks"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with flag defaults")
        ->configurable(false);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a synthetic scene as JSON");
    struct {
        std::uint64_t seed = 1;
        int n = 3;
        de::SceneConfig scene;
        std::string skeleton = "coco17";
        std::string out;
    } g;
    gen->add_option("--seed", g.seed, "PRNG seed");
    gen->add_option("--n", g.n, "number of persons")->check(CLI::NonNegativeNumber);
    gen->add_option("--width", g.scene.width)->check(CLI::PositiveNumber);
    gen->add_option("--height", g.scene.height)->check(CLI::PositiveNumber);
    gen->add_option("--min-scale", g.scene.min_scale)->check(CLI::PositiveNumber);
    gen->add_option("--max-scale", g.scene.max_scale)->check(CLI::PositiveNumber);
    gen->add_option("--min-separation", g.scene.min_separation)
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--jitter", g.scene.jitter)->check(CLI::NonNegativeNumber);
    gen->add_option("--drop-prob", g.scene.drop_joint_prob)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--max-attempts", g.scene.max_attempts)->check(CLI::PositiveNumber);
    gen->add_option("--skeleton", g.skeleton, "builtin name or skeleton JSON path");
    gen->add_option("--out", g.out, "output path (default stdout)");
    gen->callback([&] {
        const ConfigLayer cfg(config_path, "gen");
        cfg.apply(*gen, "seed", g.seed);
        cfg.apply(*gen, "n", g.n);
        cfg.apply(*gen, "width", g.scene.width);
        cfg.apply(*gen, "height", g.scene.height);
        cfg.apply(*gen, "min-scale", g.scene.min_scale);
        cfg.apply(*gen, "max-scale", g.scene.max_scale);
        cfg.apply(*gen, "min-separation", g.scene.min_separation);
        cfg.apply(*gen, "jitter", g.scene.jitter);
        cfg.apply(*gen, "drop-prob", g.scene.drop_joint_prob);
        cfg.apply(*gen, "skeleton", g.skeleton);
        g.scene.person_count = g.n;
        if (g.scene.max_scale < g.scene.min_scale)
            throw CLI::ValidationError("--max-scale must be >= --min-scale");
        const de::SkeletonSpec skeleton = resolve_skeleton(g.skeleton);
        const de::Scene scene = de::generate_scene(g.seed, g.scene, skeleton);
        write_output(g.out, de::scene_to_json(scene));
    });

    // ---- encode ----
    auto* enc = app.add_subcommand("encode", "encode a scene JSON into a DEFS stack");
    struct {
        std::string input;
        std::string out;
        de::EncoderConfig ecfg;
        std::string tag_assignment = "sequential";
        std::string skeleton;
        double noise_l2 = 0.0;
        std::uint64_t noise_seed = 7;
        std::string noise_mode = "movejoint";
    } e;
    enc->add_option("input", e.input, "scene JSON (default stdin)");
    enc->add_option("--out", e.out, "output DEFS path (default stdout)");
    enc->add_option("--sigma", e.ecfg.sigma)->check(CLI::PositiveNumber);
    enc->add_option("--tau", e.ecfg.tau)->check(CLI::Range(1.0, 1e9));
    enc->add_option("--stride", e.ecfg.stride)->check(CLI::PositiveNumber);
    enc->add_option("--tag-assignment", e.tag_assignment)
        ->check(CLI::IsMember({"sequential", "provided"}));
    enc->add_option("--skeleton", e.skeleton, "override the scene's skeleton");
    enc->add_option("--noise-l2", e.noise_l2,
                    "sigma of Gaussian peak noise injected into level-2 joints")
        ->check(CLI::NonNegativeNumber);
    enc->add_option("--noise-seed", e.noise_seed);
    enc->add_option("--noise-mode", e.noise_mode)
        ->check(CLI::IsMember({"movejoint", "confonly"}));
    enc->callback([&] {
        const ConfigLayer cfg(config_path, "encode");
        cfg.apply(*enc, "sigma", e.ecfg.sigma);
        cfg.apply(*enc, "tau", e.ecfg.tau);
        cfg.apply(*enc, "stride", e.ecfg.stride);
        cfg.apply(*enc, "tag-assignment", e.tag_assignment);
        cfg.apply(*enc, "skeleton", e.skeleton);
        cfg.apply(*enc, "noise-l2", e.noise_l2);
        cfg.apply(*enc, "noise-seed", e.noise_seed);
        cfg.apply(*enc, "noise-mode", e.noise_mode);
        e.ecfg.tag_assignment = e.tag_assignment == "provided"
                                    ? de::TagAssignment::ProvidedPerPerson
                                    : de::TagAssignment::SequentialIntegers;
        const de::Scene scene = de::scene_from_json(read_input(e.input));
        const de::SkeletonSpec skeleton =
            resolve_skeleton(e.skeleton.empty() ? scene.skeleton_name : e.skeleton);
        if (!scene.persons.empty() &&
            static_cast<int>(scene.persons.front().joints.size()) !=
                skeleton.joint_count())
            throw de::DimensionMismatchError("scene joints do not fit skeleton " +
                                             skeleton.name());

        de::PeakNoise noise;
        const de::PeakNoise* noise_ptr = nullptr;
        if (e.noise_l2 > 0.0) {
            noise.mode = e.noise_mode == "confonly"
                             ? de::PeakNoiseMode::MoveConfidenceOnly
                             : de::PeakNoiseMode::MoveJoint;
            de::SplitMix64 rng(e.noise_seed);
            noise.offsets.resize(scene.persons.size());
            const auto level2 = skeleton.ids_in_group(de::JointGroup::AdjacencyLevel2);
            for (auto& row : noise.offsets) {
                row.resize(static_cast<std::size_t>(skeleton.joint_count()));
                for (int id : level2)
                    row[static_cast<std::size_t>(id)] = {rng.gaussian() * e.noise_l2,
                                                         rng.gaussian() * e.noise_l2};
            }
            noise_ptr = &noise;
        }
        const de::EncodeResult encoded = de::encode_scene(
            scene.persons, skeleton, e.ecfg, scene.width, scene.height, noise_ptr);
        write_output(e.out, stack_to_bytes(encoded.stack));
    });

    // ---- decode ----
    auto* dec = app.add_subcommand("decode", "decode DEFS stack(s) into poses JSON");
    struct {
        std::vector<std::string> inputs;
        std::string out;
        std::string skeleton = "coco17";
        de::DecoderConfig dcfg;
        std::string mrm = "off";
        std::string fallback = "on";
        std::string tracing = "hierarchical";
        double tau = 7.0;
        double sigma = 7.0;
        int image_id = 0;
        int jobs = 1;
    } d;
    dec->add_option("inputs", d.inputs, "DEFS file(s) (default stdin)");
    dec->add_option("--out", d.out, "output JSON path (default stdout)");
    dec->add_option("--skeleton", d.skeleton);
    dec->add_option("--mrm", d.mrm, "mutual refine pass")
        ->check(CLI::IsMember({"on", "off"}));
    dec->add_option("--peak-threshold", d.dcfg.peak_threshold)
        ->check(CLI::Range(0.0, 1.0));
    dec->add_option("--nms-window", d.dcfg.nms_window)->check(CLI::Range(3, 99));
    dec->add_option("--tag-threshold", d.dcfg.tag_cluster_threshold)
        ->check(CLI::PositiveNumber);
    auto* match_radius_opt =
        dec->add_option("--match-radius", d.dcfg.match_radius)->check(CLI::PositiveNumber);
    dec->add_option("--max-persons", d.dcfg.max_persons)->check(CLI::PositiveNumber);
    dec->add_option("--fallback", d.fallback, "long-range center rescue")
        ->check(CLI::IsMember({"on", "off"}));
    dec->add_option("--tracing", d.tracing)
        ->check(CLI::IsMember({"hierarchical", "basic"}));
    dec->add_option("--tau", d.tau, "regression radius; default for --match-radius")
        ->check(CLI::PositiveNumber);
    dec->add_option("--sigma", d.sigma, "accepted for config symmetry; decoding does not use it");
    dec->add_option("--refine-threshold", d.dcfg.refine_conf_threshold)
        ->check(CLI::Range(0.0, 1.0));
    dec->add_option("--image-id", d.image_id);
    dec->add_option("--jobs", d.jobs)->check(CLI::PositiveNumber);
    dec->callback([&] {
        const ConfigLayer cfg(config_path, "decode");
        cfg.apply(*dec, "skeleton", d.skeleton);
        cfg.apply(*dec, "mrm", d.mrm);
        cfg.apply(*dec, "peak-threshold", d.dcfg.peak_threshold);
        cfg.apply(*dec, "nms-window", d.dcfg.nms_window);
        cfg.apply(*dec, "tag-threshold", d.dcfg.tag_cluster_threshold);
        cfg.apply(*dec, "match-radius", d.dcfg.match_radius);
        cfg.apply(*dec, "max-persons", d.dcfg.max_persons);
        cfg.apply(*dec, "fallback", d.fallback);
        cfg.apply(*dec, "tracing", d.tracing);
        cfg.apply(*dec, "tau", d.tau);
        cfg.apply(*dec, "refine-threshold", d.dcfg.refine_conf_threshold);
        cfg.apply(*dec, "jobs", d.jobs);
        if (match_radius_opt->count() == 0 && !cfg.flag_given(*dec, "match-radius"))
            d.dcfg.match_radius = d.tau;
        d.dcfg.refine = onoff(d.mrm);
        d.dcfg.center_fallback = onoff(d.fallback);
        d.dcfg.tracing = d.tracing == "basic" ? de::TracingMode::BasicOnly
                                              : de::TracingMode::Hierarchical;
        const de::SkeletonSpec skeleton = resolve_skeleton(d.skeleton);

        if (d.inputs.empty()) d.inputs.push_back("-");
        const int n = static_cast<int>(d.inputs.size());
        std::vector<std::string> outputs(static_cast<std::size_t>(n));
        parallel_for(d.jobs, n, [&](int i) {
            const de::FieldStack stack =
                stack_from_bytes(read_input(d.inputs[static_cast<std::size_t>(i)]));
            const auto poses = de::decode_stack(stack, skeleton, d.dcfg);
            outputs[static_cast<std::size_t>(i)] = de::results_to_json(
                poses, skeleton, n == 1 ? d.image_id : i);
        });
        if (n == 1) {
            write_output(d.out, outputs.front());
        } else {
            std::string joined = "[\n";
            for (int i = 0; i < n; ++i) {
                std::string item = outputs[static_cast<std::size_t>(i)];
                while (!item.empty() && (item.back() == '\n' || item.back() == ' '))
                    item.pop_back();
                joined += item;
                joined += i + 1 < n ? ",\n" : "\n";
            }
            joined += "]\n";
            write_output(d.out, joined);
        }
    });

    // ---- loss ----
    auto* loss = app.add_subcommand("loss", "evaluate objectives on a (pred, gt) pair");
    struct {
        std::string pred_path;
        std::string gt_path;
        std::string out;
        std::string skeleton = "coco17";
        de::LossConfig lcfg;
        std::string ld_mask = "on";
        std::string push_self = "off";
    } l;
    loss->add_option("pred", l.pred_path, "predicted DEFS")->required();
    loss->add_option("gt", l.gt_path, "ground-truth DEFS")->required();
    loss->add_option("--out", l.out);
    loss->add_option("--skeleton", l.skeleton);
    loss->add_option("--alpha", l.lcfg.alpha);
    loss->add_option("--beta", l.lcfg.beta);
    loss->add_option("--sigma-tag", l.lcfg.tags.sigma_tag)->check(CLI::PositiveNumber);
    loss->add_option("--ld-mask", l.ld_mask,
                     "evaluate displacement loss on ground-truth support only")
        ->check(CLI::IsMember({"on", "off"}));
    loss->add_option("--push-self", l.push_self,
                     "include the self-pair diagonal in the push loss")
        ->check(CLI::IsMember({"on", "off"}));
    loss->callback([&] {
        const ConfigLayer cfg(config_path, "loss");
        cfg.apply(*loss, "skeleton", l.skeleton);
        cfg.apply(*loss, "alpha", l.lcfg.alpha);
        cfg.apply(*loss, "beta", l.lcfg.beta);
        cfg.apply(*loss, "sigma-tag", l.lcfg.tags.sigma_tag);
        cfg.apply(*loss, "ld-mask", l.ld_mask);
        cfg.apply(*loss, "push-self", l.push_self);
        l.lcfg.mask_displacement = onoff(l.ld_mask);
        l.lcfg.tags.include_self_pairs = onoff(l.push_self);
        const de::SkeletonSpec skeleton = resolve_skeleton(l.skeleton);
        const de::FieldStack pred = stack_from_bytes(read_input(l.pred_path));
        const de::FieldStack gt = stack_from_bytes(read_input(l.gt_path));
        const auto labels = de::derive_labels(gt, skeleton);
        const de::LossBreakdown b = de::loss_total(pred, gt, skeleton, labels, l.lcfg);
        ordered_json j;
        j["lh"] = b.confidence;
        j["ld"] = b.displacement;
        j["pull"] = b.pull;
        j["push"] = b.push;
        j["push_with_self"] = b.push_with_self;
        j["lg"] = b.tag_total;
        j["alpha"] = l.lcfg.alpha;
        j["beta"] = l.lcfg.beta;
        j["total"] = b.total;
        write_output(l.out, j.dump(2) + "\n");
    });

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    struct {
        std::string preds_path;
        std::string gts_path;
        std::string out;
        std::string metric = "oks";
        std::string skeleton;
        double alpha = 0.5;
    } v;
    eval->add_option("preds", v.preds_path, "results JSON")->required();
    eval->add_option("gts", v.gts_path, "scene JSON (single or {\"images\":[...]})")
        ->required();
    eval->add_option("--out", v.out);
    eval->add_option("--metric", v.metric)->check(CLI::IsMember({"oks", "pckh"}));
    eval->add_option("--alpha", v.alpha, "PCKh threshold factor")
        ->check(CLI::PositiveNumber);
    eval->add_option("--skeleton", v.skeleton, "override the scenes' skeleton");
    eval->callback([&] {
        const ConfigLayer cfg(config_path, "eval");
        cfg.apply(*eval, "metric", v.metric);
        cfg.apply(*eval, "alpha", v.alpha);
        cfg.apply(*eval, "skeleton", v.skeleton);
        const auto scenes = de::scenes_from_json(read_input(v.gts_path));
        if (scenes.empty()) throw de::FormatError("eval: no ground-truth scenes");
        const de::SkeletonSpec skeleton = resolve_skeleton(
            v.skeleton.empty() ? scenes.front().skeleton_name : v.skeleton);
        const auto preds =
            de::results_batch_from_json(read_input(v.preds_path), skeleton);
        if (preds.size() != scenes.size())
            throw de::FormatError("eval: " + std::to_string(preds.size()) +
                                  " prediction images vs " +
                                  std::to_string(scenes.size()) + " scenes");
        std::vector<de::EvalImage> images;
        for (std::size_t i = 0; i < scenes.size(); ++i) {
            de::EvalImage image;
            image.gts = scenes[i].persons;
            image.gt_scales = scenes[i].scales;
            image.gt_head_diags = scenes[i].head_diags;
            image.preds = preds[i];
            images.push_back(std::move(image));
        }
        ordered_json j;
        if (v.metric == "oks") {
            const de::ApResult r = de::evaluate_ap(images, skeleton);
            j["ap"] = r.ap;
            j["ap50"] = r.ap50;
            j["ap75"] = r.ap75;
            j["ap_medium"] = r.ap_medium;
            j["ap_large"] = r.ap_large;
            j["ar"] = r.ar;
        } else {
            const de::PckhResult r = de::evaluate_pckh(images, skeleton, v.alpha);
            j["overall"] = r.overall;
            j["correct"] = r.correct_keypoints;
            j["total"] = r.total_keypoints;
            ordered_json per = ordered_json::object();
            for (const auto& joint : skeleton.joints()) {
                if (joint.group == de::JointGroup::CenterPseudo) continue;
                const double value = r.per_joint[static_cast<std::size_t>(joint.id)];
                if (value < 0.0)
                    per[joint.name] = nullptr;
                else
                    per[joint.name] = value;
            }
            j["per_joint"] = std::move(per);
        }
        write_output(v.out, j.dump(2) + "\n");
    });

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "decode throughput measurement");
    struct {
        std::vector<std::string> inputs;
        std::string out;
        std::string skeleton = "coco17";
        std::string mrm = "off";
        int repeat = 10;
        int jobs = 1;
    } b;
    bench->add_option("inputs", b.inputs, "DEFS file(s) (default stdin)");
    bench->add_option("--out", b.out);
    bench->add_option("--skeleton", b.skeleton);
    bench->add_option("--mrm", b.mrm)->check(CLI::IsMember({"on", "off"}));
    bench->add_option("--repeat", b.repeat)->check(CLI::PositiveNumber);
    bench->add_option("--jobs", b.jobs)->check(CLI::PositiveNumber);
    bench->callback([&] {
        const ConfigLayer cfg(config_path, "bench");
        cfg.apply(*bench, "skeleton", b.skeleton);
        cfg.apply(*bench, "mrm", b.mrm);
        cfg.apply(*bench, "repeat", b.repeat);
        cfg.apply(*bench, "jobs", b.jobs);
        const de::SkeletonSpec skeleton = resolve_skeleton(b.skeleton);
        if (b.inputs.empty()) b.inputs.push_back("-");
        std::vector<de::FieldStack> stacks;
        stacks.reserve(b.inputs.size());
        for (const auto& path : b.inputs)
            stacks.push_back(stack_from_bytes(read_input(path)));

        de::DecoderConfig dcfg;
        const bool refine = onoff(b.mrm);
        std::atomic<std::int64_t> peak_ns{0}, assembly_ns{0}, refine_ns{0};
        using clock = std::chrono::steady_clock;
        const auto wall_start = clock::now();
        const int tasks = static_cast<int>(stacks.size()) * b.repeat;
        parallel_for(b.jobs, tasks, [&](int task) {
            const de::FieldStack& stack =
                stacks[static_cast<std::size_t>(task) % stacks.size()];
            auto t0 = clock::now();
            for (int id = 0; id < stack.joint_count(); ++id)
                de::detect_peaks(stack.conf[static_cast<std::size_t>(id)], id, dcfg);
            auto t1 = clock::now();
            auto poses = de::assemble_poses(stack, skeleton, dcfg);
            auto t2 = clock::now();
            if (refine)
                for (auto& pose : poses)
                    pose = de::refine_pose(pose, stack, skeleton,
                                           dcfg.refine_conf_threshold);
            auto t3 = clock::now();
            peak_ns += (t1 - t0).count();
            assembly_ns += (t2 - t1).count();
            refine_ns += (t3 - t2).count();
        });
        const auto wall = clock::now() - wall_start;
        ordered_json j;
        j["images"] = stacks.size();
        j["repeat"] = b.repeat;
        j["jobs"] = b.jobs;
        j["images_per_s"] =
            tasks / std::max(1e-9, std::chrono::duration<double>(wall).count());
        j["peak_detection_ms"] = peak_ns.load() / 1e6;
        j["assembly_ms"] = assembly_ns.load() / 1e6;
        j["refine_ms"] = refine_ns.load() / 1e6;
        j["total_ms"] = ms(wall);
        write_output(b.out, j.dump(2) + "\n");
    });

    // ---- render ----
    auto* render = app.add_subcommand("render", "draw poses as a PPM overlay");
    struct {
        std::string input;
        std::string out;
        std::string skeleton = "coco17";
        int width = 0;
        int height = 0;
    } r;
    render->add_option("input", r.input, "scene JSON or results JSON (default stdin)");
    render->add_option("--out", r.out, "output PPM path (default stdout)");
    render->add_option("--skeleton", r.skeleton);
    render->add_option("--width", r.width, "canvas width (required for results input)");
    render->add_option("--height", r.height, "canvas height (required for results input)");
    render->callback([&] {
        const ConfigLayer cfg(config_path, "render");
        cfg.apply(*render, "skeleton", r.skeleton);
        cfg.apply(*render, "width", r.width);
        cfg.apply(*render, "height", r.height);
        const std::string text = read_input(r.input);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw de::FormatError(std::string("render input: ") + e.what());
        }
        std::vector<de::PersonPose> poses;
        int width = r.width, height = r.height;
        std::string skeleton_name = r.skeleton;
        const bool scene_input = j.is_object() && j.value("format", "") == "de-scene";
        de::Scene scene;
        if (scene_input) {
            scene = de::scene_from_json(text);
            if (!cfg.flag_given(*render, "skeleton"))
                skeleton_name = scene.skeleton_name;
            if (width <= 0) width = scene.width;
            if (height <= 0) height = scene.height;
        }
        const de::SkeletonSpec skeleton = resolve_skeleton(skeleton_name);
        if (scene_input) {
            poses = scene.persons;
        } else {
            poses = de::results_from_json(text, skeleton);
            if (width <= 0 || height <= 0)
                throw CLI::ValidationError(
                    "--width/--height are required for results input");
        }
        const de::Image img = de::render_poses(poses, skeleton, width, height);
        std::ostringstream out;
        img.write_ppm(out);
        write_output(r.out, out.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const de::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const de::DimensionMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const de::SkeletonError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const de::NoVisibleJointsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const de::NoLabeledJointsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const de::MissingHeadBoxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
