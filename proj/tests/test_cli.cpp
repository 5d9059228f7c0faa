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

// Drives the installed `djf` binary end to end over the bundled toy fixture.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef DJF_CLI_PATH
#error "DJF_CLI_PATH must be defined"
#endif
#ifndef DJF_TOY8_MANIFEST
#error "DJF_TOY8_MANIFEST must be defined"
#endif

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

int run(const std::string& args) {
    const std::string cmd = std::string(DJF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

const std::string kManifest = DJF_TOY8_MANIFEST;
const std::string kFixtureDir = std::filesystem::path(DJF_TOY8_MANIFEST).parent_path().string();

}  // namespace

TEST_CASE("usage errors exit 1, help exits 0") {
    CHECK(run("") == 1);
    CHECK(run("--help") == 0);
    CHECK(run("no-such-command") == 1);
    CHECK(run("train") == 1);                  // missing required flags
    CHECK(run("eval --manifest x --task sideways") == 1);
}

TEST_CASE("train is deterministic per seed and the checkpoint inspects cleanly") {
    TempDir dir("djf_cli_train");
    const std::string common =
        "train --manifest " + kManifest +
        " --task upsample --scale 4 --config '{\"n1\":4,\"n2\":2,\"f1\":5,\"f2\":1,\"f3\":3}'"
        " --patch-size 16 --patches 32 --batch 8 --epochs 2 --seed 7 --log-every 0 --threads 1";
    CHECK(run(common + " --out " + dir.file("a.djf") + " --loss-csv " + dir.file("a.csv")) ==
          0);
    CHECK(run(common + " --out " + dir.file("b.djf")) == 0);
    const auto a = slurp(dir.file("a.djf"));
    CHECK(!a.empty());
    CHECK(a == slurp(dir.file("b.djf")));

    std::ifstream csv(dir.file("a.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "iteration,loss,seconds");

    CHECK(run("inspect-checkpoint --model " + dir.file("a.djf")) == 0);
    CHECK(run("inspect-checkpoint --model " + dir.file("missing.djf")) == 2);
}

TEST_CASE("apply/separate/features run; shape mismatches exit 2") {
    TempDir dir("djf_cli_apply");
    const std::string model = dir.file("m.djf");
    CHECK(run("train --manifest " + kManifest +
              " --task upsample --scale 4"
              " --config '{\"n1\":4,\"n2\":2,\"f1\":5,\"f2\":1,\"f3\":3}'"
              " --patch-size 16 --patches 16 --batch 8 --epochs 1 --seed 3 --log-every 0"
              " --out " + model) == 0);

    const std::string depth = kFixtureDir + "/depth_0000.pgm";
    const std::string rgb = kFixtureDir + "/rgb_0000.ppm";
    const std::string other_rgb = kFixtureDir + "/rgb_0001.ppm";

    CHECK(run("apply denoise --model " + model + " --target " + depth + " --guidance " + rgb +
              " --out " + dir.file("out.pgm")) == 0);
    CHECK(std::filesystem::exists(dir.file("out.pgm")));

    // guidance dims must be scale x target dims
    CHECK(run("apply upsample --model " + model + " --target " + depth + " --guidance " + rgb +
              " --scale 4 --out " + dir.file("up.pgm")) == 2);

    CHECK(run("separate --model " + model + " --image " + rgb +
              " --iterations 2 --guidance-mode rolling --out " + dir.file("sep.ppm")) == 0);

    CHECK(run("features --model " + model + " --target " + depth + " --guidance " + rgb +
              " --subnet guidance --layer 1 --out-prefix " + dir.file("feat")) == 0);
    CHECK(std::filesystem::exists(dir.file("feat") + "_guidance_l1_000.pgm"));
    CHECK(run("features --model " + model + " --target " + depth + " --guidance " + rgb +
              " --subnet guidance --layer 9 --out-prefix " + dir.file("feat")) == 2);

    (void)other_rgb;
}

TEST_CASE("eval and baseline subcommands") {
    TempDir dir("djf_cli_eval");
    CHECK(run("eval --manifest " + kManifest +
              " --task upsample --scale 4 --filter bicubic --report-json " +
              dir.file("r.json") + " --report-csv " + dir.file("r.csv")) == 0);
    CHECK(std::filesystem::exists(dir.file("r.json")));
    CHECK(std::filesystem::exists(dir.file("r.csv")));
    CHECK(run("eval --manifest " + kManifest + " --task upsample --scale 4 --filter jbu") ==
          0);
    CHECK(run("eval --manifest " + kManifest + " --task upsample --scale 4 --filter gf") == 0);
    CHECK(run("eval --manifest " + dir.file("missing.jsonl") +
              " --task upsample --filter bicubic") == 2);

    const std::string depth = kFixtureDir + "/depth_0000.pgm";
    const std::string rgb = kFixtureDir + "/rgb_0000.ppm";
    CHECK(run("baseline bicubic --target " + depth + " --scale 2 --out " +
              dir.file("bc.pgm")) == 0);
    CHECK(run("baseline gf --target " + depth + " --guidance " + depth +
              " --radius 2 --out " + dir.file("gf.pgm")) == 0);

    // build a true low-res input for jbu
    CHECK(run("bench --filter bicubic --task upsample --scale 4 --height 64 --width 64 "
              "--reps 3") == 0);
}
