// End-to-end tests of the command-line tool. The binary path comes from the
// PLUMBLINE_BIN environment variable (set by the test harness).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "plumbline/image.hpp"
#include "plumbline/model.hpp"
#include "plumbline/synth.hpp"

using namespace plumbline;
namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("PLUMBLINE_BIN");
    REQUIRE(b != nullptr);
    return b;
}

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cmd_output.txt";
    const std::string cmd =
        "cd " + dir.string() + " && " + bin() + " " + args + " > " + log.string() +
        " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream f(log);
    r.output.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("plumbline_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int count_lines(const fs::path& p) {
    std::ifstream f(p);
    int n = 0;
    std::string line;
    while (std::getline(f, line)) ++n;
    return n;
}

// small scene image shared by the happy-path cases
void write_scene_png(const fs::path& p, int size, uint64_t seed) {
    const auto lines = random_lines(size, size, 4, size / 6.0, seed);
    save_gray(render_lines(size, size, lines, 1.5), p.string());
}

}  // namespace

TEST_CASE("version flag and bad usage") {
    const auto dir = fresh_dir("usage");
    CHECK(run("--version", dir).code == 0);
    CHECK(run("", dir).code == 2);                 // a subcommand is required
    CHECK(run("calibrate", dir).code == 2);        // missing image argument
    CHECK(run("frobnicate", dir).code == 2);       // unknown subcommand
    CHECK(run("calibrate --no-such-flag x.png", dir).code == 2);
}

TEST_CASE("unreadable and corrupt image files exit 3 without outputs") {
    const auto dir = fresh_dir("io");
    const auto r1 = run("calibrate missing.png --out p.json", dir);
    CHECK(r1.code == 3);
    CHECK_FALSE(fs::exists(dir / "p.json"));

    write_text(dir / "empty.png", "");
    const auto r2 = run("calibrate empty.png --out p.json", dir);
    CHECK(r2.code == 3);
    CHECK_FALSE(fs::exists(dir / "p.json"));

    write_text(dir / "garbage.png", "this is not an image");
    CHECK(run("inspect garbage.png", dir).code == 3);
}

TEST_CASE("image dimension mismatch is a usage error") {
    const auto dir = fresh_dir("mismatch");
    write_scene_png(dir / "a.png", 120, 1);
    write_scene_png(dir / "b.png", 140, 2);
    const auto r = run("calibrate a.png b.png --out p.json", dir);
    CHECK(r.code == 2);
    CHECK(r.output.find("dimension") != std::string::npos);
}

TEST_CASE("synth rejects noise fractions outside [0,1)") {
    const auto dir = fresh_dir("badnoise");
    CHECK(run("synth --noise 1.5 --trials 1", dir).code == 2);
    CHECK(run("synth --noise -0.1 --trials 1", dir).code == 2);
    CHECK(run("synth --clutter blobs --trials 1", dir).code == 2);
}

TEST_CASE("bad params JSON exits 3") {
    const auto dir = fresh_dir("badparams");
    write_scene_png(dir / "img.png", 120, 3);
    write_text(dir / "p.json", "{ not json");
    CHECK(run("undistort img.png p.json --out o.png", dir).code == 3);
    write_text(dir / "short.json", "{\"c\":[1,2],\"gamma\":0,\"b\":[0,0]}");
    CHECK(run("undistort img.png short.json --out o.png", dir).code == 3);
}

TEST_CASE("synth study writes trials, summary and manifest") {
    const auto dir = fresh_dir("synth");
    const auto r = run(
        "synth --trials 2 --gammas 1e-5 --noise 0 --clutter points --seed 7 "
        "--restarts 6 --radial-only --out study",
        dir);
    CHECK(r.code == 0);
    CHECK(count_lines(dir / "study_trials.csv") == 3);   // header + 2 rows
    CHECK(count_lines(dir / "study_summary.csv") == 2);  // header + 1 cell
    const auto m = nlohmann::json::parse(slurp(dir / "study_manifest.json"));
    CHECK(m.at("command") == "synth");
    CHECK(m.at("seed") == 7);
    CHECK(m.at("config").at("trials") == 2);
    CHECK(m.at("outputs").size() == 2);
}

TEST_CASE("inspect on a blank image succeeds with empty outputs") {
    const auto dir = fresh_dir("blank");
    save_gray(GrayImage(64, 64, 0.5), (dir / "flat.png").string());
    const auto r = run("inspect flat.png --sigma-vote 2 --out flat", dir);
    CHECK(r.code == 0);
    CHECK(r.output.find("warning") != std::string::npos);
    CHECK(count_lines(dir / "flat_edgels.csv") == 1);    // header only
    CHECK(count_lines(dir / "flat_hough.csv") == 361);   // header + bins
}

TEST_CASE("inspect emits edgels and histogram for a line image") {
    const auto dir = fresh_dir("inspect");
    write_scene_png(dir / "img.png", 160, 2);
    const auto r = run("inspect img.png --sigma-vote 2 --edgels 500 --out ins", dir);
    CHECK(r.code == 0);
    CHECK(count_lines(dir / "ins_edgels.csv") > 50);
    CHECK(slurp(dir / "ins_edgels.csv").substr(0, 17) == "x,y,nx,ny,weight\n");
    CHECK(count_lines(dir / "ins_hough.csv") == 361);
    const auto m = nlohmann::json::parse(slurp(dir / "ins_manifest.json"));
    CHECK(m.at("command") == "inspect");
    CHECK(m.at("inputs").size() == 1);
}

TEST_CASE("calibrate then undistort runs clean and is thread-deterministic") {
    const auto dir = fresh_dir("pipeline");
    write_scene_png(dir / "img.png", 200, 11);
    const std::string base =
        "calibrate img.png --sigma-vote 2 --edgels 2000 --restarts 6 "
        "--radial-only --seed 3 --bins 360";
    const auto r1 = run(base + " --threads 1 --out p1.json", dir);
    CHECK(r1.code == 0);
    const auto r2 = run(base + " --threads 2 --out p2.json", dir);
    CHECK(r2.code == 0);
    CHECK(slurp(dir / "p1.json") == slurp(dir / "p2.json"));

    const DistortionParams p = params_from_json(slurp(dir / "p1.json"));
    CHECK(std::isfinite(p.gamma));

    const auto m = nlohmann::json::parse(slurp(dir / "p1.json.manifest.json"));
    CHECK(m.at("command") == "calibrate");
    CHECK(m.at("config").at("restarts") == 6);
    CHECK(m.at("inputs").at(0) == "img.png");

    const auto ru = run("undistort img.png p1.json --out out.png --mask mask.png", dir);
    CHECK(ru.code == 0);
    const GrayImage out = load_gray((dir / "out.png").string());
    CHECK(out.width == 200);
    CHECK(out.height == 200);
    const GrayImage mask = load_gray((dir / "mask.png").string());
    CHECK(mask.width == 200);
    const auto mu = nlohmann::json::parse(slurp(dir / "out.png.manifest.json"));
    CHECK(mu.at("outputs").size() == 2);
}

TEST_CASE("calibrate accepts multiple images of equal size") {
    const auto dir = fresh_dir("multi");
    write_scene_png(dir / "a.png", 160, 21);
    write_scene_png(dir / "b.png", 160, 22);
    const auto r = run(
        "calibrate a.png b.png --sigma-vote 2 --edgels 1000 --restarts 4 "
        "--radial-only --out p.json --trace trace.csv",
        dir);
    CHECK(r.code == 0);
    const auto m = nlohmann::json::parse(slurp(dir / "p.json.manifest.json"));
    CHECK(m.at("inputs").size() == 2);
    CHECK(m.at("config").at("edgels_per_image").size() == 2);
    CHECK(count_lines(dir / "trace.csv") == 5);  // header + one row per restart
}
