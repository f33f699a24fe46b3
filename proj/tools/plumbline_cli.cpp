// Command-line front end: calibrate, undistort, synth, inspect.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 numeric/feasibility failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plumbline/edgels.hpp"
#include "plumbline/hough.hpp"
#include "plumbline/image.hpp"
#include "plumbline/model.hpp"
#include "plumbline/optim.hpp"
#include "plumbline/synth.hpp"
#include "plumbline/threads.hpp"
#include "plumbline/warp.hpp"

namespace {

using namespace plumbline;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Manifest written atomically next to the outputs; re-running the recorded
// command with the recorded config reproduces the outputs exactly.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& inputs, const json& config,
                    uint64_t seed, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["config"] = config;
    m["seed"] = seed;
    m["version"] = kVersion;
    m["outputs"] = outputs;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) throw IoError("cannot write " + tmp);
        f << m.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

DistortionParams load_params(const std::string& path) {
    try {
        return params_from_json(read_file(path));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError("bad params file " + path + ": " + e.what());
    }
}

struct CalibrateOpts {
    std::vector<std::string> images;
    std::string out = "params.json";
    std::string trace;
    int bins = 360;
    int restarts = 120;
    uint64_t seed = 0;
    bool radial_only = false;
    int edgels = 100000;
    double sigma_vote = 6.0;
    int grid = 16;
    int threads = 0;
};

int run_calibrate(const CalibrateOpts& o) {
    std::vector<GrayImage> imgs;
    for (const auto& path : o.images) {
        try {
            imgs.push_back(load_gray(path));
        } catch (const std::exception& e) {
            throw IoError(e.what());
        }
    }
    for (size_t i = 1; i < imgs.size(); ++i)
        if (imgs[i].width != imgs[0].width || imgs[i].height != imgs[0].height)
            throw UsageError("image dimension mismatch: " + o.images[i] +
                             " differs from " + o.images[0]);

    std::vector<Edgel> all;
    std::vector<size_t> per_image;
    for (size_t i = 0; i < imgs.size(); ++i) {
        ExtractionConfig ec;
        ec.sigma_vote = o.sigma_vote;
        ec.target_edgels = o.edgels;
        ec.grid_cells = o.grid;
        ec.rng_seed = mix_seed(o.seed, i);
        ec.threads = o.threads;
        auto e = extract_edgels(imgs[i], ec);
        per_image.push_back(e.size());
        all.insert(all.end(), e.begin(), e.end());
    }

    OptimConfig oc;
    oc.restarts = o.restarts;
    oc.rng_seed = o.seed;
    oc.radial_only = o.radial_only;
    oc.threads = o.threads;
    std::vector<RestartTrace> trace;
    const DistortionParams fitted =
        mcdh_calibrate(all, imgs[0].width, imgs[0].height, oc, o.bins,
                       o.trace.empty() ? nullptr : &trace);

    {
        std::ofstream f(o.out);
        if (!f) throw IoError("cannot write " + o.out);
        f << params_to_json(fitted);
    }
    std::vector<std::string> outputs{o.out};
    if (!o.trace.empty()) {
        write_trace_csv(trace, o.trace);
        outputs.push_back(o.trace);
    }

    json cfg;
    cfg["bins"] = o.bins;
    cfg["restarts"] = o.restarts;
    cfg["radial_only"] = o.radial_only;
    cfg["edgels"] = o.edgels;
    cfg["sigma_vote"] = o.sigma_vote;
    cfg["grid"] = o.grid;
    cfg["edgels_per_image"] = per_image;
    cfg["edgels_total"] = all.size();
    write_manifest(o.out + ".manifest.json", "calibrate", o.images, cfg, o.seed, outputs);
    return 0;
}

struct UndistortOpts {
    std::string image;
    std::string params;
    std::string out = "undistorted.png";
    std::string mask;
    int width = 0;   // 0 = same as input
    int height = 0;
    int threads = 0;
};

int run_undistort(const UndistortOpts& o) {
    GrayImage img;
    try {
        img = load_gray(o.image);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    const DistortionParams p = load_params(o.params);
    const int ow = o.width > 0 ? o.width : img.width;
    const int oh = o.height > 0 ? o.height : img.height;
    std::vector<uint8_t> coverage;
    const GrayImage out = undistort_image(img, p, ow, oh,
                                          o.mask.empty() ? nullptr : &coverage,
                                          o.threads);
    save_gray(out, o.out);
    std::vector<std::string> outputs{o.out};
    if (!o.mask.empty()) {
        save_mask(coverage, ow, oh, o.mask);
        outputs.push_back(o.mask);
    }
    json cfg;
    cfg["width"] = ow;
    cfg["height"] = oh;
    write_manifest(o.out + ".manifest.json", "undistort", {o.image, o.params}, cfg, 0,
                   outputs);
    return 0;
}

struct SynthOpts {
    int trials = 20;
    std::vector<double> gammas{1e-5, 2e-5};
    std::vector<double> noise{0.0};
    std::string clutter = "points";
    uint64_t seed = 0;
    int restarts = 120;
    int bins = 360;
    bool radial_only = false;
    int size = 250;
    int lines = 5;
    int pts = 10;
    double orient_sigma = 0.01;
    std::string out = "study";
    int threads = 0;
};

int run_synth(const SynthOpts& o) {
    for (double n : o.noise)
        if (n < 0.0 || n >= 1.0)
            throw UsageError("noise fraction must be in [0,1)");
    SceneConfig sc;
    sc.size = o.size;
    sc.n_lines = o.lines;
    sc.pts_per_line = o.pts;
    sc.orientation_noise_sigma = o.orient_sigma;
    sc.rng_seed = o.seed;
    OptimConfig oc;
    oc.restarts = o.restarts;
    oc.radial_only = o.radial_only;
    oc.threads = o.threads;
    const ClutterKind kind = o.clutter == "points" ? ClutterKind::uncorrelated_points
                                                   : ClutterKind::correlated_ellipses;
    const TrialReport report =
        run_study(o.gammas, o.noise, o.trials, kind, sc, oc, o.bins);
    const std::string trials_csv = o.out + "_trials.csv";
    const std::string summary_csv = o.out + "_summary.csv";
    write_trials_csv(report, trials_csv);
    write_summary_csv(report, summary_csv);
    json cfg;
    cfg["trials"] = o.trials;
    cfg["gammas"] = o.gammas;
    cfg["noise"] = o.noise;
    cfg["clutter"] = o.clutter;
    cfg["restarts"] = o.restarts;
    cfg["bins"] = o.bins;
    cfg["radial_only"] = o.radial_only;
    cfg["size"] = o.size;
    cfg["lines"] = o.lines;
    cfg["pts"] = o.pts;
    cfg["orient_sigma"] = o.orient_sigma;
    write_manifest(o.out + "_manifest.json", "synth", {}, cfg, o.seed,
                   {trials_csv, summary_csv});
    return 0;
}

struct InspectOpts {
    std::string image;
    std::string params;
    std::string out = "inspect";
    int bins = 360;
    int edgels = 100000;
    double sigma_vote = 6.0;
    uint64_t seed = 0;
    int threads = 0;
};

int run_inspect(const InspectOpts& o) {
    GrayImage img;
    try {
        img = load_gray(o.image);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    ExtractionConfig ec;
    ec.sigma_vote = o.sigma_vote;
    ec.target_edgels = o.edgels;
    ec.rng_seed = o.seed;
    ec.threads = o.threads;
    std::vector<Edgel> edgels = extract_edgels(img, ec);

    std::vector<Edgel> for_hist = edgels;
    if (!o.params.empty()) {
        const DistortionParams p = load_params(o.params);
        std::vector<Edgel> corrected;
        for (const Edgel& e : for_hist)
            if (auto t = try_transform_edgel(p, e)) corrected.push_back(*t);
        for_hist = std::move(corrected);
    }

    const std::string edgels_csv = o.out + "_edgels.csv";
    const std::string hough_csv = o.out + "_hough.csv";
    write_edgels_csv(edgels, edgels_csv);
    OrientationHistogram h;
    h.bins.assign(static_cast<size_t>(o.bins), 0.0);
    if (!for_hist.empty())
        h = hough_1d(for_hist, o.bins);
    else
        std::cerr << "warning: no salient edgels found in " << o.image << "\n";
    write_histogram_csv(h, hough_csv);

    json cfg;
    cfg["bins"] = o.bins;
    cfg["edgels"] = o.edgels;
    cfg["sigma_vote"] = o.sigma_vote;
    cfg["n_edgels"] = edgels.size();
    std::vector<std::string> inputs{o.image};
    if (!o.params.empty()) inputs.push_back(o.params);
    write_manifest(o.out + "_manifest.json", "inspect", inputs, cfg, o.seed,
                   {edgels_csv, hough_csv});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plumb-line lens distortion self-calibration"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CalibrateOpts cal;
    auto* c = app.add_subcommand("calibrate",
                                 "Estimate distortion parameters from image(s)");
    c->add_option("images", cal.images, "Input image(s), same dimensions")
        ->required()
        ->expected(-1);
    c->add_option("--out", cal.out, "Output params JSON path");
    c->add_option("--bins", cal.bins, "Orientation histogram bins");
    c->add_option("--restarts", cal.restarts, "MCDH restarts");
    c->add_option("--seed", cal.seed, "RNG seed");
    c->add_flag("--radial-only", cal.radial_only, "Freeze anisotropy at zero");
    c->add_option("--edgels", cal.edgels, "Target edgel count per image");
    c->add_option("--sigma-vote", cal.sigma_vote, "Tensor-voting kernel scale, px");
    c->add_option("--grid", cal.grid, "Subsampling grid cells per axis");
    c->add_option("--threads", cal.threads, "Worker cap (0 = auto)");
    c->add_option("--trace", cal.trace, "Optional per-restart trace CSV");

    UndistortOpts und;
    auto* u = app.add_subcommand("undistort", "Apply a correction to an image");
    u->add_option("image", und.image, "Input image")->required();
    u->add_option("params", und.params, "Params JSON from calibrate")->required();
    u->add_option("--out", und.out, "Output image path");
    u->add_option("--mask", und.mask, "Optional coverage mask path");
    u->add_option("--width", und.width, "Output width (default: input)");
    u->add_option("--height", und.height, "Output height (default: input)");
    u->add_option("--threads", und.threads, "Worker cap (0 = auto)");

    SynthOpts syn;
    auto* s = app.add_subcommand("synth", "Synthetic parameter-recovery study");
    s->add_option("--trials", syn.trials, "Trials per (gamma, noise) cell");
    s->add_option("--gammas", syn.gammas, "Ground-truth gamma values");
    s->add_option("--noise", syn.noise, "Clutter fractions in [0,1)");
    s->add_option("--clutter", syn.clutter, "Clutter kind")
        ->check(CLI::IsMember({"points", "ellipses"}));
    s->add_option("--seed", syn.seed, "RNG seed");
    s->add_option("--restarts", syn.restarts, "MCDH restarts");
    s->add_option("--bins", syn.bins, "Orientation histogram bins");
    s->add_flag("--radial-only", syn.radial_only, "Freeze anisotropy at zero");
    s->add_option("--size", syn.size, "Scene side, px");
    s->add_option("--lines", syn.lines, "Lines per scene");
    s->add_option("--pts", syn.pts, "Points per line");
    s->add_option("--orient-sigma", syn.orient_sigma, "Orientation noise, rad");
    s->add_option("--out", syn.out, "Output CSV prefix");
    s->add_option("--threads", syn.threads, "Worker cap (0 = auto)");

    InspectOpts ins;
    auto* i = app.add_subcommand("inspect", "Dump edgels and orientation histogram");
    i->add_option("image", ins.image, "Input image")->required();
    i->add_option("params", ins.params, "Optional params JSON to apply first");
    i->add_option("--out", ins.out, "Output CSV prefix");
    i->add_option("--bins", ins.bins, "Orientation histogram bins");
    i->add_option("--edgels", ins.edgels, "Target edgel count");
    i->add_option("--sigma-vote", ins.sigma_vote, "Tensor-voting kernel scale, px");
    i->add_option("--seed", ins.seed, "RNG seed");
    i->add_option("--threads", ins.threads, "Worker cap (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c->parsed()) return run_calibrate(cal);
        if (u->parsed()) return run_undistort(und);
        if (s->parsed()) return run_synth(syn);
        if (i->parsed()) return run_inspect(ins);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
