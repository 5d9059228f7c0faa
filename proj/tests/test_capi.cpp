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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "djf/djf.h"

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() / tag;
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

djf_tensor* make_random(size_t c, size_t h, size_t w, unsigned seed) {
    std::vector<float> data(c * h * w);
    unsigned state = seed;
    for (float& v : data) {
        state = state * 1664525u + 1013904223u;
        v = static_cast<float>(state >> 8) / static_cast<float>(1u << 24);
    }
    djf_tensor* t = nullptr;
    REQUIRE(djf_tensor_create(c, h, w, data.data(), &t) == DJF_OK);
    return t;
}

}  // namespace

TEST_CASE("tensor handles round-trip shape and data") {
    const float data[6] = {0.f, 0.25f, 0.5f, 0.75f, 1.f, 0.125f};
    djf_tensor* t = nullptr;
    REQUIRE(djf_tensor_create(1, 2, 3, data, &t) == DJF_OK);
    CHECK(djf_tensor_channels(t) == 1);
    CHECK(djf_tensor_height(t) == 2);
    CHECK(djf_tensor_width(t) == 3);
    CHECK(std::memcmp(djf_tensor_data(t), data, sizeof data) == 0);
    djf_tensor_destroy(t);

    CHECK(djf_tensor_create(1, 2, 3, nullptr, nullptr) == DJF_ERR_INVALID_ARGUMENT);
    CHECK(std::string(djf_last_error()).size() > 0);
}

TEST_CASE("model create/save/load and config JSON") {
    TempDir dir("djf_capi_model");
    djf_model* model = nullptr;
    REQUIRE(djf_model_create(R"({"n1": 8, "n2": 4, "seed": 3})", &model) == DJF_OK);
    CHECK(djf_model_param_count(model) > 0);

    char* config = djf_model_config_json(model);
    REQUIRE(config != nullptr);
    const auto j = nlohmann::json::parse(config);
    CHECK(j["n1"] == 8);
    CHECK(j["n2"] == 4);
    CHECK(j["f1"] == 9);
    djf_string_free(config);

    const std::string path = dir.file("m.djf");
    REQUIRE(djf_model_save(model, path.c_str()) == DJF_OK);

    djf_model* loaded = nullptr;
    REQUIRE(djf_model_load(path.c_str(), &loaded) == DJF_OK);
    CHECK(djf_model_param_count(loaded) == djf_model_param_count(model));

    char* info = djf_checkpoint_info_json(path.c_str());
    REQUIRE(info != nullptr);
    const auto ji = nlohmann::json::parse(info);
    CHECK(ji["param_count"] == djf_model_param_count(model));
    CHECK(ji["payload_bytes"] == 4 * djf_model_param_count(model));
    CHECK(ji["file_bytes"] > ji["payload_bytes"]);
    djf_string_free(info);

    djf_model_destroy(loaded);
    djf_model_destroy(model);

    CHECK(djf_model_load(dir.file("missing.djf").c_str(), &loaded) == DJF_ERR_IO);
    CHECK(djf_model_create("{\"f1\": 8}", &model) == DJF_ERR_INVALID_ARGUMENT);
    CHECK(djf_model_create("{\"bogus\": 1}", &model) == DJF_ERR_FORMAT);
}

TEST_CASE("joint filtering through the C surface") {
    djf_model* model = nullptr;
    REQUIRE(djf_model_create(R"({"n1": 4, "n2": 2, "f1": 5, "f2": 1, "f3": 3, "seed": 1})",
                             &model) == DJF_OK);
    djf_tensor* target = make_random(1, 12, 10, 5);
    djf_tensor* guidance = make_random(3, 12, 10, 6);

    djf_tensor* out = nullptr;
    REQUIRE(djf_joint_filter(model, target, guidance, 1, &out) == DJF_OK);
    CHECK(djf_tensor_height(out) == 12);
    CHECK(djf_tensor_width(out) == 10);

    // Freshly built models carry near-zero weights, so the skip connection
    // keeps the output close to the target.
    const float* o = djf_tensor_data(out);
    const float* t = djf_tensor_data(target);
    for (size_t i = 0; i < 120; ++i) CHECK(std::abs(o[i] - t[i]) < 0.05f);
    djf_tensor_destroy(out);

    djf_tensor* bad = make_random(1, 5, 5, 7);
    CHECK(djf_joint_filter(model, bad, guidance, 1, &out) == DJF_ERR_SHAPE_MISMATCH);
    CHECK(std::string(djf_last_error()).find("differ spatially") != std::string::npos);
    djf_tensor_destroy(bad);

    djf_tensor* low = make_random(1, 6, 5, 8);
    REQUIRE(djf_upsample(model, low, guidance, 2, 1, &out) == DJF_OK);
    CHECK(djf_tensor_height(out) == 12);
    djf_tensor_destroy(out);
    CHECK(djf_upsample(model, low, guidance, 3, 1, &out) == DJF_ERR_SHAPE_MISMATCH);

    REQUIRE(djf_denoise(model, target, guidance, 1, &out) == DJF_OK);
    djf_tensor_destroy(out);

    REQUIRE(djf_texture_separate(model, target, 2, 0, 1, &out) == DJF_OK);
    djf_tensor_destroy(out);
    REQUIRE(djf_texture_separate(model, target, 2, 1, 1, &out) == DJF_OK);
    djf_tensor_destroy(out);

    djf_tensor** maps = nullptr;
    size_t count = 0;
    REQUIRE(djf_dump_features(model, target, guidance, "target", 1, 1, &maps, &count) ==
            DJF_OK);
    CHECK(count == 4);
    djf_tensor_list_destroy(maps, count);
    CHECK(djf_dump_features(model, target, guidance, "nope", 1, 1, &maps, &count) ==
          DJF_ERR_INVALID_ARGUMENT);
    CHECK(djf_dump_features(model, target, guidance, "target", 9, 1, &maps, &count) ==
          DJF_ERR_INVALID_ARGUMENT);

    djf_tensor_destroy(low);
    djf_tensor_destroy(target);
    djf_tensor_destroy(guidance);
    djf_model_destroy(model);
}

TEST_CASE("baseline operators through the C surface") {
    djf_tensor* img = make_random(1, 8, 8, 9);
    djf_tensor* out = nullptr;

    REQUIRE(djf_nearest_downsample(img, 2, &out) == DJF_OK);
    CHECK(djf_tensor_height(out) == 4);
    djf_tensor_destroy(out);
    CHECK(djf_nearest_downsample(img, 3, &out) == DJF_ERR_SHAPE_MISMATCH);

    REQUIRE(djf_bicubic_resize(img, 16, 12, &out) == DJF_OK);
    CHECK(djf_tensor_width(out) == 12);
    djf_tensor_destroy(out);

    djf_tensor* guidance = make_random(3, 16, 16, 10);
    REQUIRE(djf_joint_bilateral_upsample(img, guidance, 1.0, 0.1, 2, &out) == DJF_OK);
    CHECK(djf_tensor_height(out) == 16);
    djf_tensor_destroy(out);

    djf_tensor* guide1 = make_random(1, 8, 8, 11);
    REQUIRE(djf_guided_filter(img, guide1, 2, 1e-4, &out) == DJF_OK);
    djf_tensor_destroy(out);
    CHECK(djf_guided_filter(img, guidance, 2, 1e-4, &out) == DJF_ERR_SHAPE_MISMATCH);

    djf_tensor_destroy(guide1);
    djf_tensor_destroy(guidance);
    djf_tensor_destroy(img);
}

TEST_CASE("image io, synthetic data, train, eval, bench end to end") {
    TempDir dir("djf_capi_pipeline");
    char* manifest_path = nullptr;
    REQUIRE(djf_make_synthetic_dataset(dir.file("data").c_str(), 4, 48, 48, 21,
                                       &manifest_path) == DJF_OK);
    REQUIRE(manifest_path != nullptr);

    const char* task = R"({"kind":"upsample","scale":4,"seed":1})";
    const char* net = R"({"n1":4,"n2":2,"f1":5,"f2":1,"f3":3,"seed":2})";
    const char* tc =
        R"({"patch_size":16,"patches_total":32,"batch_size":8,"epochs":2,"seed":3})";
    const std::string ckpt = dir.file("model.djf");
    const std::string csv = dir.file("loss.csv");
    REQUIRE(djf_train(manifest_path, task, net, tc, 2, nullptr, nullptr, ckpt.c_str(),
                      csv.c_str()) == DJF_OK);
    CHECK(std::filesystem::exists(ckpt));
    CHECK(std::filesystem::exists(csv));

    double mean = -1.0, stddev = -1.0;
    const std::string spec = std::string(R"({"kind":"model","path":")") + ckpt + "\"}";
    REQUIRE(djf_eval(manifest_path, spec.c_str(), task, 1.0, 0, 1,
                     dir.file("report.json").c_str(), dir.file("report.csv").c_str(), &mean,
                     &stddev) == DJF_OK);
    CHECK(mean >= 0.0);
    CHECK(std::filesystem::exists(dir.file("report.json")));

    double bicubic_mean = -1.0;
    REQUIRE(djf_eval(manifest_path, R"({"kind":"bicubic"})", task, 1.0, 0, 1, nullptr, nullptr,
                     &bicubic_mean, nullptr) == DJF_OK);
    CHECK(bicubic_mean > 0.0);

    double jbu_mean = -1.0;
    REQUIRE(djf_eval(manifest_path, R"({"kind":"jbu"})", task, 1.0, 0, 1, nullptr, nullptr,
                     &jbu_mean, nullptr) == DJF_OK);
    double gf_mean = -1.0;
    REQUIRE(djf_eval(manifest_path, R"({"kind":"gf"})", task, 1.0, 0, 1, nullptr, nullptr,
                     &gf_mean, nullptr) == DJF_OK);

    double seconds = -1.0;
    REQUIRE(djf_benchmark(R"({"kind":"bicubic"})", task, 64, 64, 1, 3, &seconds) == DJF_OK);
    CHECK(seconds >= 0.0);

    // reading a written image back through the C API
    djf_tensor* img = nullptr;
    int maxval = 0;
    const std::string depth0 = dir.file("data/depth_0000.pgm");
    REQUIRE(djf_read_image(depth0.c_str(), &img, &maxval) == DJF_OK);
    CHECK(maxval == 65535);
    REQUIRE(djf_write_image(dir.file("copy.pgm").c_str(), img, maxval) == DJF_OK);
    djf_tensor_destroy(img);

    CHECK(djf_read_image(dir.file("absent.pgm").c_str(), &img, nullptr) == DJF_ERR_IO);
    CHECK(djf_train(dir.file("absent.jsonl").c_str(), task, net, tc, 1, nullptr, nullptr,
                    ckpt.c_str(), nullptr) == DJF_ERR_IO);

    djf_string_free(manifest_path);
}

TEST_CASE("version string") {
    CHECK(std::string(djf_version()).find('.') != std::string::npos);
}
