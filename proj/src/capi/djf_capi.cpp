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

#include "djf/djf.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/apply.hpp"
#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/filters.hpp"
#include "core/image_io.hpp"
#include "core/manifest.hpp"
#include "core/net.hpp"
#include "core/synthetic.hpp"
#include "core/train.hpp"

struct djf_tensor {
    djf::Tensor t;
};

struct djf_model {
    djf::Model m;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
djf_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return DJF_OK;
    } catch (const djf::ShapeError& e) {
        set_error(e.what());
        return DJF_ERR_SHAPE_MISMATCH;
    } catch (const djf::ConfigError& e) {
        set_error(e.what());
        return DJF_ERR_INVALID_ARGUMENT;
    } catch (const djf::IoError& e) {
        set_error(e.what());
        return DJF_ERR_IO;
    } catch (const djf::FormatError& e) {
        set_error(e.what());
        return DJF_ERR_FORMAT;
    } catch (const djf::NumericError& e) {
        set_error(e.what());
        return DJF_ERR_NUMERIC;
    } catch (const nlohmann::json::exception& e) {
        set_error(e.what());
        return DJF_ERR_FORMAT;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return DJF_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return DJF_ERR_INTERNAL;
    }
}

void require(bool ok, const char* msg) {
    if (!ok) throw djf::ConfigError(msg);
}

djf::TaskSpec parse_task(const char* task_json) {
    require(task_json != nullptr, "task_json is null");
    const nlohmann::json j = nlohmann::json::parse(task_json);
    djf::TaskSpec task;
    const std::string kind = j.value("kind", "upsample");
    if (kind == "upsample") {
        task.kind = djf::TaskSpec::Kind::upsample;
    } else if (kind == "denoise") {
        task.kind = djf::TaskSpec::Kind::denoise;
    } else {
        throw djf::ConfigError("task: unknown kind '" + kind + "'");
    }
    task.scale = j.value("scale", 8);
    task.noise_variance = j.value("noise_variance", 1e-3);
    task.seed = j.value("seed", std::uint64_t{0});
    djf::validate(task);
    return task;
}

djf::TrainConfig parse_train_config(const char* train_json) {
    djf::TrainConfig cfg;
    if (!train_json || std::string(train_json).empty()) return cfg;
    const nlohmann::json j = nlohmann::json::parse(train_json);
    cfg.patch_size = j.value("patch_size", cfg.patch_size);
    cfg.patches_total = j.value("patches_total", cfg.patches_total);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.lr_decay_factor = j.value("lr_decay_factor", cfg.lr_decay_factor);
    cfg.lr_decay_point = j.value("lr_decay_point", cfg.lr_decay_point);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

djf::NetworkConfig parse_net_config(const char* config_json) {
    djf::NetworkConfig cfg;
    if (!config_json || std::string(config_json).empty()) return cfg;
    return djf::config_from_json(nlohmann::json::parse(config_json));
}

// Builds the filter under evaluation from its JSON spec. The returned
// closure owns any loaded model.
djf::FilterFn make_filter(const char* filter_json, const djf::TaskSpec& task, int threads) {
    require(filter_json != nullptr, "filter_json is null");
    const nlohmann::json j = nlohmann::json::parse(filter_json);
    const std::string kind = j.value("kind", "model");

    if (kind == "model") {
        if (!j.contains("path")) throw djf::ConfigError("filter: model spec needs \"path\"");
        auto model = std::make_shared<djf::Model>(
            djf::load_model(j["path"].get<std::string>()));
        return [model, threads](const djf::Tensor& target, const djf::Tensor& guidance,
                                const djf::TaskSpec& t) {
            if (t.kind == djf::TaskSpec::Kind::upsample) {
                return djf::upsample(*model, target, guidance, t.scale, threads);
            }
            return djf::denoise(*model, target, guidance, threads);
        };
    }
    if (kind == "bicubic") {
        return [](const djf::Tensor& target, const djf::Tensor& guidance,
                  const djf::TaskSpec& t) {
            if (t.kind == djf::TaskSpec::Kind::upsample) {
                return djf::bicubic_resize(target, guidance.height(), guidance.width());
            }
            return target;  // no-op restoration: the noisy input itself
        };
    }
    if (kind == "jbu") {
        djf::JBUParams p;
        const int scale = task.kind == djf::TaskSpec::Kind::upsample ? task.scale : 1;
        p.sigma_spatial = j.value("sigma_spatial", 0.5 * scale);
        p.sigma_range = j.value("sigma_range", 0.1);
        p.window_radius = j.value("window_radius", 2);
        return [p](const djf::Tensor& target, const djf::Tensor& guidance,
                   const djf::TaskSpec&) {
            return djf::joint_bilateral_upsample(target, guidance, p);
        };
    }
    if (kind == "gf") {
        djf::GFParams p;
        p.radius = j.value("radius", task.kind == djf::TaskSpec::Kind::upsample ? task.scale : 1);
        p.epsilon = j.value("epsilon", 1e-4);
        return [p](const djf::Tensor& target, const djf::Tensor& guidance,
                   const djf::TaskSpec& t) {
            djf::Tensor full = t.kind == djf::TaskSpec::Kind::upsample
                                   ? djf::bicubic_resize(target, guidance.height(),
                                                         guidance.width())
                                   : target;
            const djf::Tensor guide = djf::luminance(guidance);
            djf::Tensor out(full.channels(), full.height(), full.width());
            for (std::size_t c = 0; c < full.channels(); ++c) {
                const djf::Tensor filtered =
                    djf::guided_filter(djf::extract_channel(full, c), guide, p);
                std::copy(filtered.data(), filtered.data() + filtered.pixels(),
                          out.channel(c));
            }
            return out;
        };
    }
    throw djf::ConfigError("filter: unknown kind '" + kind + "'");
}

}  // namespace

extern "C" {

const char* djf_version(void) { return "1.0.0"; }

const char* djf_last_error(void) { return g_last_error.c_str(); }

djf_status djf_tensor_create(size_t channels, size_t height, size_t width, const float* data,
                             djf_tensor** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::Tensor(channels, height, width);
        if (data) std::copy(data, data + t->t.size(), t->t.data());
        *out = t.release();
    });
}

void djf_tensor_destroy(djf_tensor* t) { delete t; }

size_t djf_tensor_channels(const djf_tensor* t) { return t ? t->t.channels() : 0; }
size_t djf_tensor_height(const djf_tensor* t) { return t ? t->t.height() : 0; }
size_t djf_tensor_width(const djf_tensor* t) { return t ? t->t.width() : 0; }
const float* djf_tensor_data(const djf_tensor* t) { return t ? t->t.data() : nullptr; }

djf_status djf_read_image(const char* path, djf_tensor** out, int* maxval) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path/out is null");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::read_image(path, maxval);
        *out = t.release();
    });
}

djf_status djf_write_image(const char* path, const djf_tensor* img, int maxval) {
    return guarded([&] {
        require(path != nullptr && img != nullptr, "path/img is null");
        djf::write_image(path, img->t, maxval);
    });
}

djf_status djf_model_create(const char* config_json, djf_model** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        auto m = std::make_unique<djf_model>();
        m->m = djf::build_network<float>(parse_net_config(config_json));
        *out = m.release();
    });
}

djf_status djf_model_load(const char* path, djf_model** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path/out is null");
        auto m = std::make_unique<djf_model>();
        m->m = djf::load_model(path);
        *out = m.release();
    });
}

djf_status djf_model_save(const djf_model* model, const char* path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "model/path is null");
        djf::save_model(model->m, path);
    });
}

void djf_model_destroy(djf_model* model) { delete model; }

size_t djf_model_param_count(const djf_model* model) {
    return model ? djf::model_param_count(model->m) : 0;
}

char* djf_model_config_json(const djf_model* model) {
    if (!model) return nullptr;
    try {
        return dup_string(djf::config_to_json(model->m.config).dump());
    } catch (...) {
        return nullptr;
    }
}

char* djf_checkpoint_info_json(const char* path) {
    if (!path) return nullptr;
    try {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw djf::IoError(std::string("cannot open '") + path + "'");
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        const djf::Model model = djf::deserialize(bytes);
        const std::size_t params = djf::model_param_count(model);
        const std::string config = djf::config_to_json(model.config).dump();
        nlohmann::json j;
        j["config"] = nlohmann::json::parse(config);
        j["param_count"] = params;
        j["payload_bytes"] = params * 4;
        j["file_bytes"] = bytes.size();
        return dup_string(j.dump(2));
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void djf_string_free(char* s) { std::free(s); }

djf_status djf_joint_filter(const djf_model* model, const djf_tensor* target,
                            const djf_tensor* guidance, int threads, djf_tensor** out) {
    return guarded([&] {
        require(model && target && guidance && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::joint_filter(model->m, target->t, guidance->t, threads);
        *out = t.release();
    });
}

djf_status djf_upsample(const djf_model* model, const djf_tensor* low_target,
                        const djf_tensor* guidance, int scale, int threads, djf_tensor** out) {
    return guarded([&] {
        require(model && low_target && guidance && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::upsample(model->m, low_target->t, guidance->t, scale, threads);
        *out = t.release();
    });
}

djf_status djf_denoise(const djf_model* model, const djf_tensor* noisy,
                       const djf_tensor* guidance, int threads, djf_tensor** out) {
    return guarded([&] {
        require(model && noisy && guidance && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::denoise(model->m, noisy->t, guidance->t, threads);
        *out = t.release();
    });
}

djf_status djf_texture_separate(const djf_model* model, const djf_tensor* image, int iterations,
                                int rolling_guidance, int threads, djf_tensor** out) {
    return guarded([&] {
        require(model && image && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::texture_separate(model->m, image->t, iterations,
                                     rolling_guidance ? djf::GuidanceMode::rolling
                                                      : djf::GuidanceMode::fixed,
                                     threads);
        *out = t.release();
    });
}

djf_status djf_dump_features(const djf_model* model, const djf_tensor* target,
                             const djf_tensor* guidance, const char* subnet, int layer,
                             int threads, djf_tensor*** maps, size_t* count) {
    return guarded([&] {
        require(model && target && guidance && subnet && maps && count, "null argument");
        djf::Subnet which;
        const std::string name = subnet;
        if (name == "target") {
            which = djf::Subnet::target;
        } else if (name == "guidance") {
            which = djf::Subnet::guidance;
        } else if (name == "fusion") {
            which = djf::Subnet::fusion;
        } else {
            throw djf::ConfigError("dump_features: unknown sub-network '" + name + "'");
        }
        std::vector<djf::Tensor> features =
            djf::dump_features(model->m, target->t, guidance->t, which, layer, threads);
        djf_tensor** list = static_cast<djf_tensor**>(
            std::malloc(sizeof(djf_tensor*) * std::max<std::size_t>(1, features.size())));
        require(list != nullptr, "out of memory");
        for (std::size_t i = 0; i < features.size(); ++i) {
            list[i] = new djf_tensor{std::move(features[i])};
        }
        *maps = list;
        *count = features.size();
    });
}

void djf_tensor_list_destroy(djf_tensor** maps, size_t count) {
    if (!maps) return;
    for (size_t i = 0; i < count; ++i) delete maps[i];
    std::free(maps);
}

djf_status djf_nearest_downsample(const djf_tensor* img, int scale, djf_tensor** out) {
    return guarded([&] {
        require(img && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::nearest_downsample(img->t, scale);
        *out = t.release();
    });
}

djf_status djf_bicubic_resize(const djf_tensor* img, size_t out_h, size_t out_w,
                              djf_tensor** out) {
    return guarded([&] {
        require(img && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::bicubic_resize(img->t, out_h, out_w);
        *out = t.release();
    });
}

djf_status djf_joint_bilateral_upsample(const djf_tensor* low, const djf_tensor* guidance,
                                        double sigma_spatial, double sigma_range,
                                        int window_radius, djf_tensor** out) {
    return guarded([&] {
        require(low && guidance && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::joint_bilateral_upsample(low->t, guidance->t,
                                             {sigma_spatial, sigma_range, window_radius});
        *out = t.release();
    });
}

djf_status djf_guided_filter(const djf_tensor* target, const djf_tensor* guidance, int radius,
                             double epsilon, djf_tensor** out) {
    return guarded([&] {
        require(target && guidance && out, "null argument");
        auto t = std::make_unique<djf_tensor>();
        t->t = djf::guided_filter(target->t, guidance->t, {radius, epsilon});
        *out = t.release();
    });
}

djf_status djf_train(const char* manifest_path, const char* task_json,
                     const char* net_config_json, const char* train_json, int threads,
                     djf_train_progress progress, void* user, const char* checkpoint_out,
                     const char* loss_csv_out) {
    return guarded([&] {
        require(manifest_path && checkpoint_out, "manifest_path/checkpoint_out is null");
        const djf::Manifest manifest = djf::read_manifest(manifest_path);
        const djf::TaskSpec task = parse_task(task_json);
        const djf::NetworkConfig net_cfg = parse_net_config(net_config_json);
        const djf::TrainConfig cfg = parse_train_config(train_json);
        std::function<void(const djf::LossRecord&)> on_record;
        if (progress) {
            on_record = [progress, user](const djf::LossRecord& r) {
                progress(r.iteration, r.loss, r.seconds, user);
            };
        }
        const djf::TrainResult result =
            djf::train(manifest, task, net_cfg, cfg, threads, on_record);
        std::ofstream out(checkpoint_out, std::ios::binary);
        if (!out) throw djf::IoError(std::string("cannot open '") + checkpoint_out + "'");
        out.write(reinterpret_cast<const char*>(result.checkpoint.data()),
                  static_cast<std::streamsize>(result.checkpoint.size()));
        if (!out) throw djf::IoError(std::string("short write to '") + checkpoint_out + "'");
        if (loss_csv_out) djf::write_loss_csv(loss_csv_out, result.records);
    });
}

djf_status djf_eval(const char* manifest_path, const char* filter_json, const char* task_json,
                    double unit_scale, int mask_missing, int threads,
                    const char* report_json_out, const char* report_csv_out, double* mean_out,
                    double* stddev_out) {
    return guarded([&] {
        require(manifest_path != nullptr, "manifest_path is null");
        const djf::Manifest manifest = djf::read_manifest(manifest_path);
        const djf::TaskSpec task = parse_task(task_json);
        const djf::FilterFn filter = make_filter(filter_json, task, threads);
        djf::EvalConvention conv{unit_scale, mask_missing != 0};
        const djf::EvalReport report = djf::eval_dataset(filter, manifest, task, conv);
        const std::string task_name =
            task.kind == djf::TaskSpec::Kind::upsample
                ? "upsample_x" + std::to_string(task.scale)
                : "denoise_var" + std::to_string(task.noise_variance);
        if (report_json_out) {
            djf::write_report_json(report_json_out, report, manifest.dataset, task_name);
        }
        if (report_csv_out) djf::write_report_csv(report_csv_out, report);
        if (mean_out) *mean_out = report.mean;
        if (stddev_out) *stddev_out = report.stddev;
    });
}

djf_status djf_benchmark(const char* filter_json, const char* task_json, size_t height,
                         size_t width, int threads, int repetitions, double* seconds_out) {
    return guarded([&] {
        require(seconds_out != nullptr, "seconds_out is null");
        const djf::TaskSpec task = parse_task(task_json);
        const djf::FilterFn filter = make_filter(filter_json, task, threads);
        *seconds_out = djf::benchmark_runtime(filter, task, height, width, repetitions);
    });
}

djf_status djf_make_synthetic_dataset(const char* dir, size_t count, size_t height, size_t width,
                                      uint64_t seed, char** manifest_path_out) {
    return guarded([&] {
        require(dir != nullptr, "dir is null");
        const std::string path = djf::write_scene_dataset(dir, count, height, width, seed);
        if (manifest_path_out) *manifest_path_out = dup_string(path);
    });
}

}  // extern "C"
