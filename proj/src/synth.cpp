#include "plumbline/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "plumbline/threads.hpp"

namespace plumbline {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxAttempts = 100000;

const char* kind_name(ClutterKind k) {
    return k == ClutterKind::uncorrelated_points ? "points" : "ellipses";
}

// Intersection of the line center + o*n + t*tangent with the rectangle
// [lo,hi]^2, as a t-interval. Returns false when the line misses the box.
bool clip_to_box(const Vec2& origin, const Vec2& dir, double lo, double hi,
                 double* t0, double* t1) {
    double tmin = -1e300, tmax = 1e300;
    const double o[2] = {origin.x, origin.y};
    const double d[2] = {dir.x, dir.y};
    for (int a = 0; a < 2; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (o[a] < lo || o[a] > hi) return false;
            continue;
        }
        double ta = (lo - o[a]) / d[a];
        double tb = (hi - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        tmin = std::max(tmin, ta);
        tmax = std::min(tmax, tb);
    }
    if (tmin >= tmax) return false;
    *t0 = tmin;
    *t1 = tmax;
    return true;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return std::nan("");
    const double idx = q * (static_cast<double>(v.size()) - 1.0);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg) {
    if (cfg.size < 3 || cfg.n_lines < 1 || cfg.pts_per_line < 2 ||
        cfg.noise_fraction < 0.0 || cfg.noise_fraction >= 1.0)
        throw std::invalid_argument("generate_scene: invalid config");

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01;

    const Vec2 center{cfg.size / 2.0, cfg.size / 2.0};
    const double lo = 0.0, hi = cfg.size - 1.0;
    const double half_diag = center.norm();

    DistortionParams distorting;
    distorting.c = center;
    distorting.gamma = cfg.gamma_true;

    Scene scene;
    scene.ground_truth = distorting;

    double spacing_sum = 0.0;
    int attempts = 0;
    for (int line = 0; line < cfg.n_lines;) {
        if (++attempts > kMaxAttempts)
            throw std::runtime_error("generate_scene: line rejection sampling failed");
        const double theta = u01(rng) * kPi;
        const double off = (u01(rng) * 2.0 - 1.0) * half_diag;
        const Vec2 n{std::cos(theta), std::sin(theta)};
        const Vec2 tangent{-n.y, n.x};
        const Vec2 origin = center + n * off;
        double t0, t1;
        if (!clip_to_box(origin, tangent, lo + 1.0, hi - 1.0, &t0, &t1)) continue;
        const double len = t1 - t0;
        if (len < 2.0 * cfg.pts_per_line) continue;

        std::vector<Edgel> pts;
        bool ok = true;
        for (int i = 0; i < cfg.pts_per_line; ++i) {
            const double t = t0 + len * i / (cfg.pts_per_line - 1);
            const Vec2 pos = origin + tangent * t;
            if ((pos - center).norm() < cfg.center_exclusion) {
                ok = false;
                break;
            }
            pts.push_back({pos, n, 1.0});
        }
        if (!ok) continue;

        for (Edgel& e : pts) {
            const double a = theta + cfg.orientation_noise_sigma * n01(rng);
            e.normal = {std::cos(a), std::sin(a)};
            if (cfg.gamma_true != 0.0) e = transform_edgel(distorting, e);
            scene.edgels.push_back(e);
        }
        spacing_sum += len / (cfg.pts_per_line - 1);
        ++line;
    }

    const long n_line_edgels = static_cast<long>(scene.edgels.size());
    const long n_clutter = std::lround(
        cfg.noise_fraction / (1.0 - cfg.noise_fraction) * static_cast<double>(n_line_edgels));

    if (cfg.clutter_kind == ClutterKind::uncorrelated_points) {
        attempts = 0;
        for (long i = 0; i < n_clutter;) {
            if (++attempts > kMaxAttempts)
                throw std::runtime_error("generate_scene: clutter rejection sampling failed");
            const Vec2 pos{lo + u01(rng) * (hi - lo), lo + u01(rng) * (hi - lo)};
            if ((pos - center).norm() < cfg.center_exclusion) continue;
            const double a = u01(rng) * kPi;
            scene.edgels.push_back({pos, {std::cos(a), std::sin(a)}, 1.0});
            ++i;
        }
    } else {
        const double spacing = spacing_sum / cfg.n_lines;
        std::uniform_real_distribution<double> axis(10.0, cfg.size / 3.0);
        long added = 0;
        attempts = 0;
        while (added < n_clutter) {
            if (++attempts > kMaxAttempts)
                throw std::runtime_error("generate_scene: ellipse sampling failed");
            const Vec2 ec{lo + u01(rng) * (hi - lo), lo + u01(rng) * (hi - lo)};
            const double sa = axis(rng), sb = axis(rng);
            const double phi = u01(rng) * kPi;
            const double cph = std::cos(phi), sph = std::sin(phi);
            // Ramanujan perimeter approximation
            const double per =
                kPi * (3.0 * (sa + sb) - std::sqrt((3.0 * sa + sb) * (sa + 3.0 * sb)));
            const int npts = std::max(3, static_cast<int>(std::lround(per / spacing)));
            for (int i = 0; i < npts && added < n_clutter; ++i) {
                const double psi = 2.0 * kPi * i / npts;
                const Vec2 local{sa * std::cos(psi), sb * std::sin(psi)};
                const Vec2 pos{ec.x + cph * local.x - sph * local.y,
                               ec.y + sph * local.x + cph * local.y};
                if (pos.x < lo || pos.x > hi || pos.y < lo || pos.y > hi) continue;
                const Vec2 nl{std::cos(psi) / sa, std::sin(psi) / sb};
                const Vec2 nr{cph * nl.x - sph * nl.y, sph * nl.x + cph * nl.y};
                scene.edgels.push_back({pos, nr.normalized(), 1.0});
                ++added;
            }
        }
    }
    return scene;
}

TrialReport run_study(const std::vector<double>& gammas,
                      const std::vector<double>& noise_levels, int trials,
                      ClutterKind kind, const SceneConfig& base_cfg,
                      const OptimConfig& optim_cfg, int bins) {
    if (trials < 1)
        throw std::invalid_argument("run_study: trials must be >= 1");
    TrialReport report;
    uint64_t cell = 0;
    for (double g : gammas) {
        for (double nf : noise_levels) {
            std::vector<double> recovered;
            for (int t = 0; t < trials; ++t) {
                const uint64_t trial_seed = mix_seed(mix_seed(base_cfg.rng_seed, cell), t);
                SceneConfig sc = base_cfg;
                sc.gamma_true = g;
                sc.noise_fraction = nf;
                sc.clutter_kind = kind;
                sc.rng_seed = trial_seed;

                TrialRow row;
                row.gamma_true = g;
                row.noise = nf;
                row.kind = kind;
                row.trial = t;
                try {
                    const Scene scene = generate_scene(sc);
                    OptimConfig oc = optim_cfg;
                    oc.rng_seed = mix_seed(trial_seed, 0x5EEDull);
                    const DistortionParams fitted =
                        mcdh_calibrate(scene.edgels, sc.size, sc.size, oc, bins);
                    // report the distortion estimate: the Harris negation of
                    // the fitted correction
                    row.gamma_recovered = -fitted.gamma;
                    row.cost = entropy_cost(
                        scene.edgels, sc.size, sc.size,
                        scale_params(fitted, Vec2{sc.size / 2.0, sc.size / 2.0}.norm()),
                        bins);
                    row.ok = true;
                    recovered.push_back(row.gamma_recovered);
                } catch (const std::exception&) {
                    row.ok = false;
                    row.gamma_recovered = std::nan("");
                    row.cost = std::nan("");
                }
                report.rows.push_back(row);
            }
            CellSummary s;
            s.gamma_true = g;
            s.noise = nf;
            s.kind = kind;
            s.n_ok = static_cast<int>(recovered.size());
            s.p10 = percentile(recovered, 0.1);
            s.median = percentile(recovered, 0.5);
            s.p90 = percentile(recovered, 0.9);
            report.summary.push_back(s);
            ++cell;
        }
    }
    return report;
}

void write_trials_csv(const TrialReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fputs("gamma_true,noise,kind,trial,ok,gamma_recovered,cost\n", f);
    for (const TrialRow& r : report.rows)
        std::fprintf(f, "%.17g,%.17g,%s,%d,%d,%.17g,%.17g\n", r.gamma_true, r.noise,
                     kind_name(r.kind), r.trial, r.ok ? 1 : 0, r.gamma_recovered, r.cost);
    std::fclose(f);
}

void write_summary_csv(const TrialReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fputs("gamma_true,noise,kind,n_ok,p10,median,p90\n", f);
    for (const CellSummary& s : report.summary)
        std::fprintf(f, "%.17g,%.17g,%s,%d,%.17g,%.17g,%.17g\n", s.gamma_true, s.noise,
                     kind_name(s.kind), s.n_ok, s.p10, s.median, s.p90);
    std::fclose(f);
}

GrayImage render_lines(int width, int height, const std::vector<LineSpec>& lines,
                       double ridge_sigma) {
    GrayImage img(width, height, 0.0);
    const double inv2s2 = 1.0 / (2.0 * ridge_sigma * ridge_sigma);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.0;
            for (const LineSpec& l : lines) {
                const double d =
                    x * std::cos(l.theta) + y * std::sin(l.theta) - l.offset;
                // truncate at 3 sigma so the background is exactly black;
                // coherent far tails would otherwise pass the saliency gate
                if (std::abs(d) > 3.0 * ridge_sigma) continue;
                v = std::max(v, std::exp(-d * d * inv2s2));
            }
            img.at(x, y) = v;
        }
    }
    return img;
}

std::vector<LineSpec> random_lines(int width, int height, int count,
                                   double center_exclusion, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Vec2 center{width / 2.0, height / 2.0};
    const double half_diag = center.norm();
    std::vector<LineSpec> lines;
    int attempts = 0;
    while (static_cast<int>(lines.size()) < count) {
        if (++attempts > kMaxAttempts)
            throw std::runtime_error("random_lines: rejection sampling failed");
        const double theta = u01(rng) * kPi;
        const double oc = (u01(rng) * 2.0 - 1.0) * (half_diag * 0.85);
        if (std::abs(oc) < center_exclusion) continue;
        bool separated = true;
        for (const LineSpec& l : lines) {
            double da = std::abs(l.theta - theta);
            da = std::min(da, kPi - da);
            if (da < 0.08) {
                separated = false;
                break;
            }
        }
        if (!separated) continue;
        const Vec2 n{std::cos(theta), std::sin(theta)};
        const Vec2 tangent{-n.y, n.x};
        const Vec2 origin = center + n * oc;
        double t0, t1;
        if (!clip_to_box(origin, tangent, 1.0, std::min(width, height) - 2.0, &t0, &t1))
            continue;
        if (t1 - t0 < 0.4 * std::min(width, height)) continue;
        lines.push_back({theta, origin.dot(n)});
    }
    return lines;
}

}  // namespace plumbline
