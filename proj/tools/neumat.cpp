// Copyright (c) 2026 The neumat Authors.
// SPDX-License-Identifier: Apache-2.0

// neumat: command line driver for the multi-resolution neural material
// pipeline. Subcommands cover the full loop: generate reference datasets
// from heightfield microgeometry, train materials, render and compare
// against ground truth, evaluate error tables, and inspect material files.
//
// Exit codes: 0 on success, 2 for user and input errors (bad flags, bad
// files, mismatched inputs), 3 for internal failures.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neumat/dataset.h"
#include "neumat/evaluate.h"
#include "neumat/heightfield.h"
#include "neumat/image.h"
#include "neumat/keyvalue.h"
#include "neumat/material.h"
#include "neumat/offset.h"
#include "neumat/oracle.h"
#include "neumat/render.h"
#include "neumat/scene.h"
#include "neumat/trainer.h"

using namespace neumat;

namespace {

// Heightfield source shared by generate, render --reference, and eval.
struct FieldArgs {
    std::string preset;
    int res = 256;
    std::string height_png;
    std::string albedo_png;
    Float height_scale = 0.1;

    void add(CLI::App *cmd) {
        cmd->add_option("--preset", preset,
                        "heightfield preset: flat, step, ramp, checker, bumps");
        cmd->add_option("--res", res, "preset heightfield resolution")
            ->default_val(256);
        cmd->add_option("--height-png", height_png, "16-bit grayscale height map");
        cmd->add_option("--albedo-png", albedo_png, "8-bit sRGB albedo map");
        cmd->add_option("--height-scale", height_scale,
                        "height map amplitude in tile lengths")
            ->default_val(0.1);
    }

    bool given() const { return !preset.empty() || !height_png.empty(); }

    Heightfield build() const {
        if (!preset.empty() && !height_png.empty())
            throw std::invalid_argument("give either --preset or --height-png, not both");
        if (!preset.empty()) return heightfield_preset(preset, res);
        if (!height_png.empty()) {
            if (albedo_png.empty())
                throw std::invalid_argument("--height-png requires --albedo-png");
            return hf_from_images(height_png, height_scale, albedo_png);
        }
        throw std::invalid_argument("a heightfield is required: --preset or --height-png");
    }
};

struct OracleArgs {
    int samples = 64;
    Float jitter = 5;
    bool indirect = false;

    void add(CLI::App *cmd) {
        cmd->add_option("--samples", samples, "positions averaged per filtered query")
            ->default_val(64);
        cmd->add_option("--jitter", jitter, "light cone half-angle, degrees")
            ->default_val(5.0);
        cmd->add_flag("--indirect", indirect, "add one indirect bounce to the reference");
    }

    OracleOptions options() const {
        OracleOptions opt;
        opt.samples = samples;
        opt.jitter_deg = jitter;
        opt.indirect = indirect;
        return opt;
    }
};

void write_image(const std::string &path, const Image &img) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pfm") == 0)
        write_pfm(img, path);
    else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0)
        write_png_srgb(img, path);
    else
        throw std::invalid_argument("unsupported image extension (want .pfm or .png): " + path);
}

std::string path_stem(const std::string &path) {
    size_t dot = path.find_last_of('.');
    size_t slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path;
    return path.substr(0, dot);
}

std::string path_ext(const std::string &path) {
    std::string stem = path_stem(path);
    return path.substr(stem.size());
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    FieldArgs field;
    OracleArgs oracle;
    int k = 4;
    int per_texel = 256;
    uint64_t seed = 1;
    int threads = 0;
    bool force = false;
    bool deterministic = false;
    std::string output;
    std::string config;
};

int cmd_generate(const GenerateArgs &a) {
    if (!a.force && (a.per_texel < 200 || a.per_texel > 400))
        std::fprintf(stderr,
                     "warning: --per-texel %d is outside the recommended range "
                     "200-400; pass --force to silence\n",
                     a.per_texel);
    Heightfield hf = a.field.build();
    QueryDataset ds = sample_queries(hf, a.k, a.per_texel, a.seed,
                                     a.oracle.options(), a.threads);
    dataset_write(ds, a.output);
    std::printf("wrote %zu queries (k=%d) to %s\n", ds.records.size(), ds.k,
                a.output.c_str());
    return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
    std::string dataset;
    std::string output;
    TrainConfig cfg;
    std::string checkpoint_prefix;
    std::string config;
};

int cmd_train(TrainArgs &a) {
    QueryDataset ds = dataset_read(a.dataset);
    if (a.cfg.loss_log_path.empty()) a.cfg.loss_log_path = a.output + ".log";
    if (a.cfg.checkpoint_interval > 0)
        a.cfg.checkpoint_prefix =
            a.checkpoint_prefix.empty() ? path_stem(a.output) : a.checkpoint_prefix;
    TrainResult r = train(ds, a.cfg);
    save_material(r.material, a.output);
    std::printf("trained %lld iterations (%s)\n", (long long)a.cfg.iterations,
                a.cfg.baseline_only ? "baseline" : "full model");
    std::printf("final batch loss: %.9g\n", r.final_batch_loss);
    std::printf("final dataset mse: %.9g\n", r.final_dataset_mse);
    std::printf("wrote %s\n", a.output.c_str());
    return 0;
}

// ------------------------------------------------------------------ render

struct RenderArgs {
    std::string material;
    std::string scene_path;
    std::string output;
    FieldArgs field;
    OracleArgs oracle;
    bool reference = false;
    int lod_sweep = 0;
    int spp = -1;
    int64_t seed = -1;
    int batch = 4096;
    bool baseline = false;
    bool deterministic = false;
    int threads = 0;
    std::string config;
};

int cmd_render(const RenderArgs &a) {
    MbtfMaterial mat = load_material(a.material);
    Scene scene = a.scene_path.empty() ? Scene{} : load_scene(a.scene_path);
    if (a.scene_path.empty()) scene.material = a.material;
    if (a.spp >= 1) scene.spp = a.spp;
    if (a.seed >= 0) scene.seed = (uint64_t)a.seed;

    RenderOptions opt;
    opt.threads = a.threads;
    opt.deterministic = a.deterministic;
    opt.baseline = a.baseline;
    opt.batch_size = a.batch;

    Heightfield hf;
    if (a.reference) hf = a.field.build();

    int count = std::max(1, a.lod_sweep);
    Vec3 base_pos = scene.camera_position;
    for (int i = 0; i < count; ++i) {
        Scene view = scene;
        view.camera_position =
            scene.camera_lookat + std::exp2(Float(i)) * (base_pos - scene.camera_lookat);
        validate_scene(view);

        std::string out = a.output;
        if (a.lod_sweep > 0)
            out = path_stem(a.output) + "_d" + std::to_string(i) + path_ext(a.output);
        Image img = render(view, mat, opt);
        write_image(out, img);

        Float sigma = pixel_footprint_sigma(view, view.width / 2, view.height / 2, mat.k());
        std::printf("%s: center sigma %.6g\n", out.c_str(), sigma);

        if (a.reference) {
            Image ref = render_reference(view, hf, mat.k(), a.oracle.options(), opt);
            std::string ref_out = path_stem(out) + "_ref" + path_ext(out);
            write_image(ref_out, ref);
            std::printf("%s: image mse %.9g\n", ref_out.c_str(), image_mse(img, ref));
        }
    }
    return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string material;
    std::string dataset;
    FieldArgs field;
    OracleArgs oracle;
    std::string csv;
    int per_level = 256;
    uint64_t seed = 7;
    bool baseline = false;
    bool deterministic = false;
    int threads = 0;
    std::string config;
};

int cmd_eval(const EvalArgs &a) {
    MbtfMaterial mat = load_material(a.material);

    if (!a.dataset.empty()) {
        QueryDataset ds = dataset_read(a.dataset);
        if (ds.k != mat.k())
            throw std::invalid_argument(
                "eval: dataset pyramid depth k=" + std::to_string(ds.k) +
                " does not match material k=" + std::to_string(mat.k()));
        Float mse = dataset_mse(mat, ds, a.baseline, a.threads);
        std::printf("dataset mse: %.9g over %zu queries\n", mse, ds.records.size());
    }

    if (a.field.given()) {
        Heightfield hf = a.field.build();
        std::vector<LodBucket> table = lod_sweep(mat, hf, a.oracle.options(),
                                                 a.per_level, a.seed, a.baseline,
                                                 a.threads);
        std::printf("%-6s %-10s %-13s %-13s\n", "level", "sigma", "mse", "debiased");
        for (const LodBucket &b : table)
            std::printf("%-6d %-10.6g %-13.6g %-13.6g\n", b.level, b.sigma, b.mse,
                        b.debiased_mse);
        if (!a.csv.empty()) {
            FILE *f = std::fopen(a.csv.c_str(), "w");
            if (!f)
                throw FileFormatError(FormatErrorKind::Io, "cannot open " + a.csv);
            std::fprintf(f, "level,sigma,mse\n");
            for (const LodBucket &b : table)
                std::fprintf(f, "%d,%.9g,%.9g\n", b.level, b.sigma, b.mse);
            std::fclose(f);
        }
    } else if (a.dataset.empty()) {
        throw std::invalid_argument("eval: nothing to do; give --dataset or a heightfield");
    }
    return 0;
}

// ----------------------------------------------------------------- inspect

struct InspectArgs {
    std::string material;
    std::string offset_vis;
    std::string vis_output;
    std::string config;
};

void texture_stats(const FeatureTexture &t, Float *mn, Float *mean, Float *mx,
                   Float *rms) {
    *mn = t.data.empty() ? 0 : t.data[0];
    *mx = *mn;
    Float sum = 0, sum2 = 0;
    for (Float v : t.data) {
        *mn = std::min(*mn, v);
        *mx = std::max(*mx, v);
        sum += v;
        sum2 += v * v;
    }
    Float n = Float(std::max<size_t>(t.data.size(), 1));
    *mean = sum / n;
    *rms = std::sqrt(sum2 / n);
}

int cmd_inspect(const InspectArgs &a) {
    MbtfMaterial mat = load_material(a.material);
    std::printf("material: %s\n", a.material.c_str());
    std::printf("pyramid depth k: %d (%d levels, finest %dx%d)\n", mat.k(),
                mat.k() + 1, 1 << mat.k(), 1 << mat.k());
    std::printf("feature channels: %d\n", mat.channels());
    if (mat.has_offset)
        std::printf("neural offset: yes (channels %d)\n", mat.offset_channels());
    else
        std::printf("neural offset: no\n");
    std::printf("trained iterations: %" PRIu64 "\n", mat.meta.iterations);
    std::printf("dataset hash: %016" PRIx64 "\n", mat.meta.dataset_hash);

    int64_t pyramid_params = 0;
    for (const FeatureTexture &t : mat.pyramid.levels)
        pyramid_params += (int64_t)t.data.size();
    int64_t offset_tex_params = mat.has_offset ? (int64_t)mat.offset.texture.data.size() : 0;
    int64_t offset_mlp_params = mat.has_offset ? param_count(mat.offset.mlp) : 0;
    std::printf("params: decoder=%lld offset=%lld pyramid=%lld offset-texture=%lld total=%lld\n",
                (long long)param_count(mat.decoder), (long long)offset_mlp_params,
                (long long)pyramid_params, (long long)offset_tex_params,
                (long long)material_param_count(mat));

    std::printf("%-6s %-6s %-11s %-11s %-11s %-11s\n", "level", "res", "min", "mean",
                "max", "rms");
    for (int s = 0; s <= mat.k(); ++s) {
        Float mn, mean, mx, rms;
        texture_stats(mat.pyramid.levels[s], &mn, &mean, &mx, &rms);
        std::printf("%-6d %-6d %-11.4g %-11.4g %-11.4g %-11.4g\n", s,
                    mat.pyramid.levels[s].resolution, mn, mean, mx, rms);
    }

    if (!a.offset_vis.empty()) {
        if (!mat.has_offset)
            throw std::invalid_argument("inspect: material has no offset module");
        Float wx = 0, wy = 0;
        if (std::sscanf(a.offset_vis.c_str(), "%lf,%lf", &wx, &wy) != 2)
            throw std::invalid_argument("inspect: --offset-vis wants \"wo_x,wo_y\"");
        Direction wo{wx, wy};
        if (!wo.valid())
            throw std::invalid_argument("inspect: --offset-vis direction is outside the hemisphere");
        int res = mat.offset.texture.resolution;
        Image img(res, res);
        MlpCache cache;
        for (int y = 0; y < res; ++y) {
            for (int x = 0; x < res; ++x) {
                Vec2 uv{(x + 0.5) / res, (y + 0.5) / res};
                Vec2 d = offset_from_depth(ray_depth(mat.offset, uv, wo, cache), wo);
                img.at(x, y) = Rgb{0.5 + d.x, 0.5 + d.y, 0.5};
            }
        }
        std::string out = a.vis_output.empty()
                              ? path_stem(a.material) + "_offset.png"
                              : a.vis_output;
        write_image(out, img);
        std::printf("wrote offset visualization %s\n", out.c_str());
    }
    return 0;
}

void add_common(CLI::App *cmd, int *threads, bool *deterministic, std::string *config) {
    cmd->add_option("--config", *config,
                    "flat key-value config file; command line flags take precedence");
    if (threads)
        cmd->add_option("--threads", *threads, "worker threads (0 = hardware)")
            ->default_val(0);
    if (deterministic)
        cmd->add_flag("--deterministic", *deterministic,
                      "force ordered reductions (results are thread-invariant "
                      "here regardless)");
}

// Applies `key = value` pairs from a config file to any flag of the parsed
// subcommand not already given on the command line. Keys are long option
// names without the leading dashes; unknown keys are an error.
void apply_config(CLI::App *cmd, const std::string &path) {
    KeyValues kv = KeyValues::from_file(path);
    for (const auto &[key, value] : kv.pairs()) {
        CLI::Option *opt = cmd->get_option_no_throw("--" + key);
        if (!opt || key == "config")
            throw std::invalid_argument(path + ": unknown config key \"" + key + "\"");
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error &) {
            throw std::invalid_argument(path + ": bad value \"" + value +
                                        "\" for config key \"" + key + "\"");
        }
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"multi-resolution neural material pipeline"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App *cg = app.add_subcommand("generate",
                                      "sample reference reflectance queries "
                                      "from heightfield microgeometry");
    gen.field.add(cg);
    gen.oracle.add(cg);
    cg->add_option("--k", gen.k, "pyramid depth; finest level is 2^k")->default_val(4);
    cg->add_option("--per-texel", gen.per_texel, "queries per finest-level texel")
        ->default_val(256);
    cg->add_option("--seed", gen.seed, "sampling seed")->default_val(1);
    cg->add_flag("--force", gen.force, "allow --per-texel outside 200-400");
    cg->add_option("-o,--output", gen.output, "output .mbtfq dataset")->required();
    add_common(cg, &gen.threads, &gen.deterministic, &gen.config);

    TrainArgs tr;
    CLI::App *ct = app.add_subcommand("train", "optimize a material on a dataset");
    ct->add_option("dataset", tr.dataset, "input .mbtfq dataset")->required();
    ct->add_option("-o,--output", tr.output, "output .neumat material")->required();
    ct->add_option("--iters", tr.cfg.iterations, "optimization steps")
        ->default_val(30000);
    ct->add_option("--batch", tr.cfg.batch_size, "queries per step")
        ->default_val(int64_t{1} << 14);
    ct->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")
        ->default_val(1e-3);
    ct->add_option("--channels", tr.cfg.channels, "pyramid feature channels")
        ->default_val(7);
    ct->add_option("--offset-channels", tr.cfg.offset_channels,
                   "offset texture channels")
        ->default_val(7);
    ct->add_option("--blur-sigma", tr.cfg.blur_sigma_init,
                   "initial annealing blur in texels")
        ->default_val(8.0);
    ct->add_option("--blur-half-life", tr.cfg.blur_half_life,
                   "iterations per halving of the blur")
        ->default_val(3333.0);
    ct->add_option("--seed", tr.cfg.seed, "initialization and batch seed")
        ->default_val(0);
    ct->add_flag("--baseline", tr.cfg.baseline_only,
                 "train without the neural offset");
    ct->add_option("--checkpoint-interval", tr.cfg.checkpoint_interval,
                   "iterations between checkpoints (0 = none)")
        ->default_val(0);
    ct->add_option("--checkpoint-prefix", tr.checkpoint_prefix,
                   "checkpoint path prefix (default: output stem)");
    ct->add_option("--loss-log", tr.cfg.loss_log_path,
                   "per-iteration loss log (default: <output>.log)");
    add_common(ct, &tr.cfg.threads, nullptr, &tr.config);

    RenderArgs rd;
    CLI::App *cr = app.add_subcommand("render", "render a plane with a material");
    cr->add_option("--material", rd.material, "trained .neumat material")->required();
    cr->add_option("--scene", rd.scene_path, "scene description file");
    cr->add_option("-o,--output", rd.output, "output image (.pfm or .png)")->required();
    cr->add_option("--spp", rd.spp, "override scene samples per pixel");
    cr->add_option("--seed", rd.seed, "override scene seed");
    cr->add_option("--batch", rd.batch, "query buffer size (0 = inline eval)")
        ->default_val(4096);
    cr->add_flag("--baseline", rd.baseline, "render without the neural offset");
    cr->add_flag("--reference", rd.reference,
                 "also render the microgeometry ground truth and print MSE");
    cr->add_option("--lod-sweep", rd.lod_sweep,
                   "render N images at doubling camera distances");
    rd.field.add(cr);
    rd.oracle.add(cr);
    add_common(cr, &rd.threads, &rd.deterministic, &rd.config);

    EvalArgs ev;
    CLI::App *ce = app.add_subcommand("eval", "measure material error");
    ce->add_option("--material", ev.material, "trained .neumat material")->required();
    ce->add_option("--dataset", ev.dataset, "held-out .mbtfq dataset");
    ce->add_option("--per-level", ev.per_level, "fresh queries per pyramid level")
        ->default_val(256);
    ce->add_option("--seed", ev.seed, "sweep sampling seed")->default_val(7);
    ce->add_option("--csv", ev.csv, "write the per-level table as CSV");
    ce->add_flag("--baseline", ev.baseline, "evaluate without the neural offset");
    ev.field.add(ce);
    ev.oracle.add(ce);
    add_common(ce, &ev.threads, &ev.deterministic, &ev.config);

    InspectArgs in;
    CLI::App *ci = app.add_subcommand("inspect", "print material file details");
    ci->add_option("material", in.material, "material file")->required();
    ci->add_option("--offset-vis", in.offset_vis,
                   "render the uv offset field for a view direction \"x,y\"");
    ci->add_option("-o,--output", in.vis_output,
                   "offset visualization path (default: <material>_offset.png)");
    add_common(ci, nullptr, nullptr, &in.config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cg->parsed()) {
            if (!gen.config.empty()) apply_config(cg, gen.config);
            return cmd_generate(gen);
        }
        if (ct->parsed()) {
            if (!tr.config.empty()) apply_config(ct, tr.config);
            return cmd_train(tr);
        }
        if (cr->parsed()) {
            if (!rd.config.empty()) apply_config(cr, rd.config);
            return cmd_render(rd);
        }
        if (ce->parsed()) {
            if (!ev.config.empty()) apply_config(ce, ev.config);
            return cmd_eval(ev);
        }
        if (ci->parsed()) {
            if (!in.config.empty()) apply_config(ci, in.config);
            return cmd_inspect(in);
        }
        return 2;
    } catch (const FileFormatError &e) {
        std::fprintf(stderr, "error (%s): %s\n", format_error_name(e.kind()), e.what());
        return 2;
    } catch (const std::invalid_argument &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
