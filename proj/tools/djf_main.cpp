// Copyright 2026 The djf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Everything below talks to the library through the
// public C interface in djf/djf.h.

#include <cstdio>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "djf/djf.h"

namespace {

// Library failure carrying the already-formatted message; mapped to exit 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

void check(djf_status status) {
    if (status != DJF_OK) throw DataError(djf_last_error());
}

struct TensorHandle {
    djf_tensor* t = nullptr;
    ~TensorHandle() { djf_tensor_destroy(t); }
};

struct ModelHandle {
    djf_model* m = nullptr;
    ~ModelHandle() { djf_model_destroy(m); }
};

struct TaskFlags {
    std::string kind = "upsample";
    int scale = 8;
    double noise_var = 1e-3;
    std::uint64_t seed = 0;

    std::string json() const {
        std::ostringstream out;
        out << "{\"kind\":\"" << kind << "\",\"scale\":" << scale
            << ",\"noise_variance\":" << noise_var << ",\"seed\":" << seed << "}";
        return out.str();
    }
};

void add_task_flags(CLI::App* cmd, TaskFlags& task) {
    cmd->add_option("--task", task.kind, "Degradation task: upsample or denoise")
        ->check(CLI::IsMember({"upsample", "denoise"}));
    cmd->add_option("--scale", task.scale, "Upsampling factor (typically 4, 8, or 16)");
    cmd->add_option("--noise-var", task.noise_var,
                    "Gaussian noise variance on the [0,1] scale (denoise task)");
}

std::string filter_json(const std::string& filter, const std::string& model_path,
                        double sigma_spatial, double sigma_range, int window_radius,
                        int gf_radius, double gf_epsilon) {
    std::ostringstream out;
    if (filter == "model") {
        out << "{\"kind\":\"model\",\"path\":\"" << model_path << "\"}";
    } else if (filter == "jbu") {
        out << "{\"kind\":\"jbu\"";
        if (sigma_spatial > 0) out << ",\"sigma_spatial\":" << sigma_spatial;
        if (sigma_range > 0) out << ",\"sigma_range\":" << sigma_range;
        if (window_radius > 0) out << ",\"window_radius\":" << window_radius;
        out << "}";
    } else if (filter == "gf") {
        out << "{\"kind\":\"gf\"";
        if (gf_radius > 0) out << ",\"radius\":" << gf_radius;
        if (gf_epsilon > 0) out << ",\"epsilon\":" << gf_epsilon;
        out << "}";
    } else {
        out << "{\"kind\":\"" << filter << "\"}";
    }
    return out.str();
}

void progress_printer(long iteration, double loss, double seconds, void* user) {
    const long every = *static_cast<long*>(user);
    if (every > 0 && iteration % every == 0) {
        std::printf("iter=%ld loss=%.6g elapsed=%.1fs\n", iteration, loss, seconds);
        std::fflush(stdout);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"djf: joint image filtering with a three-branch convolutional model"};
    app.require_subcommand(1);
    app.fallthrough();  // --threads may follow the subcommand
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware default)")
        ->capture_default_str();

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train a model on a manifest of image pairs");
    std::string manifest, out_path, loss_csv, net_config;
    TaskFlags task;
    struct {
        int patch_size = 32;
        long patches = 160000;
        int batch = 128;
        double lr = 1e-3;
        double momentum = 0.9;
        double weight_decay = 1e-4;
        int epochs = 1;
        std::uint64_t seed = 0;
        long log_every = 50;
    } tr;
    train->add_option("--manifest", manifest, "JSON-Lines manifest")->required();
    add_task_flags(train, task);
    train->add_option("--out", out_path, "Checkpoint output path")->required();
    train->add_option("--loss-csv", loss_csv, "Loss curve CSV output");
    train->add_option("--config", net_config, "NetworkConfig overrides as JSON");
    train->add_option("--patch-size", tr.patch_size, "Training patch size");
    train->add_option("--patches", tr.patches, "Total training patches");
    train->add_option("--batch", tr.batch, "Mini-batch size");
    train->add_option("--lr", tr.lr, "Learning rate");
    train->add_option("--momentum", tr.momentum, "SGD momentum");
    train->add_option("--weight-decay", tr.weight_decay, "L2 weight decay");
    train->add_option("--epochs", tr.epochs, "Training epochs");
    train->add_option("--seed", tr.seed, "Seed for init, sampling, and degradation");
    train->add_option("--log-every", tr.log_every, "Progress print period (0 silences)");
    train->callback([&] {
        task.seed = tr.seed;
        std::ostringstream tc;
        tc << "{\"patch_size\":" << tr.patch_size << ",\"patches_total\":" << tr.patches
           << ",\"batch_size\":" << tr.batch << ",\"learning_rate\":" << tr.lr
           << ",\"momentum\":" << tr.momentum << ",\"weight_decay\":" << tr.weight_decay
           << ",\"epochs\":" << tr.epochs << ",\"seed\":" << tr.seed << "}";
        std::string cfg = net_config;
        if (!cfg.empty()) {
            // keep the model's own seed aligned with --seed unless overridden
            if (cfg.find("\"seed\"") == std::string::npos) {
                cfg.insert(cfg.rfind('}'), ",\"seed\":" + std::to_string(tr.seed));
            }
        } else {
            cfg = "{\"seed\":" + std::to_string(tr.seed) + "}";
        }
        check(djf_train(manifest.c_str(), task.json().c_str(), cfg.c_str(), tc.str().c_str(),
                        threads, progress_printer, &tr.log_every, out_path.c_str(),
                        loss_csv.empty() ? nullptr : loss_csv.c_str()));
        std::printf("checkpoint written to %s\n", out_path.c_str());
    });

    // ---- apply ----
    auto* apply = app.add_subcommand("apply", "Run a trained model on an image pair");
    apply->require_subcommand(1);
    std::string model_path, target_path, guidance_path, apply_out;
    int apply_scale = 8;

    auto add_apply_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "Checkpoint path")->required();
        cmd->add_option("--target", target_path, "Target image (PGM/PPM)")->required();
        cmd->add_option("--guidance", guidance_path, "Guidance image (PGM/PPM)")->required();
        cmd->add_option("--out", apply_out, "Output image path")->required();
    };
    auto* up = apply->add_subcommand("upsample", "Joint upsampling of a low-res target");
    add_apply_common(up);
    up->add_option("--scale", apply_scale, "Upsampling factor")->required();
    up->callback([&] {
        ModelHandle model;
        check(djf_model_load(model_path.c_str(), &model.m));
        TensorHandle target, guidance, out;
        int maxval = 255;
        check(djf_read_image(target_path.c_str(), &target.t, &maxval));
        check(djf_read_image(guidance_path.c_str(), &guidance.t, nullptr));
        check(djf_upsample(model.m, target.t, guidance.t, apply_scale, threads, &out.t));
        check(djf_write_image(apply_out.c_str(), out.t, maxval));
    });
    auto* dn = apply->add_subcommand("denoise", "Guided denoising of a full-res target");
    add_apply_common(dn);
    dn->callback([&] {
        ModelHandle model;
        check(djf_model_load(model_path.c_str(), &model.m));
        TensorHandle target, guidance, out;
        int maxval = 255;
        check(djf_read_image(target_path.c_str(), &target.t, &maxval));
        check(djf_read_image(guidance_path.c_str(), &guidance.t, nullptr));
        check(djf_denoise(model.m, target.t, guidance.t, threads, &out.t));
        check(djf_write_image(apply_out.c_str(), out.t, maxval));
    });

    // ---- separate ----
    auto* sep = app.add_subcommand("separate", "Rolling self-guided texture removal");
    std::string sep_image, sep_out, guidance_mode = "fixed";
    int iterations = 3;
    sep->add_option("--model", model_path, "Checkpoint path")->required();
    sep->add_option("--image", sep_image, "Input image")->required();
    sep->add_option("--iterations", iterations, "Filter iterations");
    sep->add_option("--guidance-mode", guidance_mode, "fixed or rolling guidance")
        ->check(CLI::IsMember({"fixed", "rolling"}));
    sep->add_option("--out", sep_out, "Output image path")->required();
    sep->callback([&] {
        ModelHandle model;
        check(djf_model_load(model_path.c_str(), &model.m));
        TensorHandle image, out;
        int maxval = 255;
        check(djf_read_image(sep_image.c_str(), &image.t, &maxval));
        check(djf_texture_separate(model.m, image.t, iterations,
                                   guidance_mode == "rolling" ? 1 : 0, threads, &out.t));
        check(djf_write_image(sep_out.c_str(), out.t, maxval));
    });

    // ---- features ----
    auto* feat = app.add_subcommand("features", "Dump per-layer feature maps as images");
    std::string subnet = "guidance", out_prefix = "feature";
    int layer = 1;
    feat->add_option("--model", model_path, "Checkpoint path")->required();
    feat->add_option("--target", target_path, "Target image")->required();
    feat->add_option("--guidance", guidance_path, "Guidance image")->required();
    feat->add_option("--subnet", subnet, "Sub-network: target, guidance, or fusion")
        ->check(CLI::IsMember({"target", "guidance", "fusion"}));
    feat->add_option("--layer", layer, "1-based layer index");
    feat->add_option("--out-prefix", out_prefix, "Output path prefix");
    feat->callback([&] {
        ModelHandle model;
        check(djf_model_load(model_path.c_str(), &model.m));
        TensorHandle target, guidance;
        check(djf_read_image(target_path.c_str(), &target.t, nullptr));
        check(djf_read_image(guidance_path.c_str(), &guidance.t, nullptr));
        djf_tensor** maps = nullptr;
        size_t count = 0;
        check(djf_dump_features(model.m, target.t, guidance.t, subnet.c_str(), layer, threads,
                                &maps, &count));
        for (size_t i = 0; i < count; ++i) {
            char name[512];
            std::snprintf(name, sizeof(name), "%s_%s_l%d_%03zu.pgm", out_prefix.c_str(),
                          subnet.c_str(), layer, i);
            const djf_status st = djf_write_image(name, maps[i], 255);
            if (st != DJF_OK) {
                djf_tensor_list_destroy(maps, count);
                throw DataError(djf_last_error());
            }
        }
        djf_tensor_list_destroy(maps, count);
        std::printf("wrote %zu feature maps\n", count);
    });

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "Score a filter on a manifest (RMSE)");
    std::string filter = "model", report_json, report_csv;
    double unit_scale = 1.0;
    bool mask_missing = false;
    std::uint64_t eval_seed = 0;
    double jbu_ss = 0, jbu_sr = 0;
    int jbu_r = 0, gf_r = 0;
    double gf_eps = 0;
    ev->add_option("--manifest", manifest, "JSON-Lines manifest")->required();
    add_task_flags(ev, task);
    ev->add_option("--filter", filter, "model, bicubic, jbu, or gf")
        ->check(CLI::IsMember({"model", "bicubic", "jbu", "gf"}));
    ev->add_option("--model", model_path, "Checkpoint path (filter=model)");
    ev->add_option("--unit-scale", unit_scale, "Multiplier from [0,1] to reported units");
    ev->add_flag("--mask-missing", mask_missing, "Ignore pixels equal to the missing sentinel");
    ev->add_option("--seed", eval_seed, "Degradation seed");
    ev->add_option("--report-json", report_json, "Write the full report as JSON");
    ev->add_option("--report-csv", report_csv, "Write per-image rows as CSV");
    ev->add_option("--jbu-sigma-spatial", jbu_ss, "JBU spatial sigma (low-res px)");
    ev->add_option("--jbu-sigma-range", jbu_sr, "JBU range sigma");
    ev->add_option("--jbu-radius", jbu_r, "JBU window radius");
    ev->add_option("--gf-radius", gf_r, "Guided filter radius");
    ev->add_option("--gf-epsilon", gf_eps, "Guided filter epsilon");
    ev->callback([&] {
        task.seed = eval_seed;
        if (filter == "model" && model_path.empty()) {
            throw CLI::ValidationError("--model is required when --filter model");
        }
        double mean = 0, stddev = 0;
        check(djf_eval(manifest.c_str(),
                       filter_json(filter, model_path, jbu_ss, jbu_sr, jbu_r, gf_r, gf_eps)
                           .c_str(),
                       task.json().c_str(), unit_scale, mask_missing ? 1 : 0, threads,
                       report_json.empty() ? nullptr : report_json.c_str(),
                       report_csv.empty() ? nullptr : report_csv.c_str(), &mean, &stddev));
        std::printf("filter=%s mean_rmse=%.6g stddev=%.6g\n", filter.c_str(), mean, stddev);
    });

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Median filter runtime on a synthetic scene");
    std::size_t height = 480, width = 640;
    int reps = 5;
    bench->add_option("--filter", filter, "model, bicubic, jbu, or gf")
        ->check(CLI::IsMember({"model", "bicubic", "jbu", "gf"}));
    bench->add_option("--model", model_path, "Checkpoint path (filter=model)");
    add_task_flags(bench, task);
    bench->add_option("--height", height, "Scene height")->capture_default_str();
    bench->add_option("--width", width, "Scene width")->capture_default_str();
    bench->add_option("--reps", reps, "Timed repetitions (median)")->capture_default_str();
    bench->callback([&] {
        if (filter == "model" && model_path.empty()) {
            throw CLI::ValidationError("--model is required when --filter model");
        }
        double seconds = 0;
        check(djf_benchmark(filter_json(filter, model_path, 0, 0, 0, 0, 0).c_str(),
                            task.json().c_str(), height, width, threads, reps, &seconds));
        std::printf("filter=%s size=%zux%zu threads=%d median_seconds=%.4f\n", filter.c_str(),
                    width, height, threads, seconds);
    });

    // ---- baseline ----
    auto* base = app.add_subcommand("baseline", "Run a classical filter directly");
    base->require_subcommand(1);
    std::string base_out;
    auto* bc = base->add_subcommand("bicubic", "Bicubic resize");
    std::size_t out_h = 0, out_w = 0;
    int bc_scale = 0;
    bc->add_option("--target", target_path, "Input image")->required();
    bc->add_option("--out", base_out, "Output image")->required();
    bc->add_option("--scale", bc_scale, "Integer upscaling factor");
    bc->add_option("--out-height", out_h, "Explicit output height");
    bc->add_option("--out-width", out_w, "Explicit output width");
    bc->callback([&] {
        TensorHandle img, out;
        int maxval = 255;
        check(djf_read_image(target_path.c_str(), &img.t, &maxval));
        std::size_t h = out_h, w = out_w;
        if (bc_scale > 0) {
            h = djf_tensor_height(img.t) * static_cast<std::size_t>(bc_scale);
            w = djf_tensor_width(img.t) * static_cast<std::size_t>(bc_scale);
        }
        if (h == 0 || w == 0) {
            throw CLI::ValidationError("bicubic needs --scale or --out-height/--out-width");
        }
        check(djf_bicubic_resize(img.t, h, w, &out.t));
        check(djf_write_image(base_out.c_str(), out.t, maxval));
    });
    auto* jb = base->add_subcommand("jbu", "Joint bilateral upsampling");
    double ss = 4.0, sr = 0.1;
    int wr = 2;
    jb->add_option("--target", target_path, "Low-res target")->required();
    jb->add_option("--guidance", guidance_path, "High-res guidance")->required();
    jb->add_option("--out", base_out, "Output image")->required();
    jb->add_option("--sigma-spatial", ss, "Spatial sigma in low-res pixels")
        ->capture_default_str();
    jb->add_option("--sigma-range", sr, "Range sigma on [0,1]")->capture_default_str();
    jb->add_option("--radius", wr, "Window radius in low-res pixels")->capture_default_str();
    jb->callback([&] {
        TensorHandle low, guidance, out;
        int maxval = 255;
        check(djf_read_image(target_path.c_str(), &low.t, &maxval));
        check(djf_read_image(guidance_path.c_str(), &guidance.t, nullptr));
        check(djf_joint_bilateral_upsample(low.t, guidance.t, ss, sr, wr, &out.t));
        check(djf_write_image(base_out.c_str(), out.t, maxval));
    });
    auto* gf = base->add_subcommand("gf", "Guided filter");
    int gfr = 4;
    double gfe = 1e-4;
    gf->add_option("--target", target_path, "Target image (single channel)")->required();
    gf->add_option("--guidance", guidance_path, "Guidance image (single channel)")->required();
    gf->add_option("--out", base_out, "Output image")->required();
    gf->add_option("--radius", gfr, "Box window radius")->capture_default_str();
    gf->add_option("--epsilon", gfe, "Variance regularizer")->capture_default_str();
    gf->callback([&] {
        TensorHandle target, guidance, out;
        int maxval = 255;
        check(djf_read_image(target_path.c_str(), &target.t, &maxval));
        check(djf_read_image(guidance_path.c_str(), &guidance.t, nullptr));
        check(djf_guided_filter(target.t, guidance.t, gfr, gfe, &out.t));
        check(djf_write_image(base_out.c_str(), out.t, maxval));
    });

    // ---- inspect-checkpoint ----
    auto* inspect = app.add_subcommand("inspect-checkpoint", "Print checkpoint metadata");
    inspect->add_option("--model", model_path, "Checkpoint path")->required();
    inspect->callback([&] {
        char* info = djf_checkpoint_info_json(model_path.c_str());
        if (!info) throw DataError(djf_last_error());
        std::printf("%s\n", info);
        djf_string_free(info);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        std::fputs(app.help().c_str(), stderr);
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
