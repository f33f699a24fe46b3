#include "plumbline/optim.hpp"

#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "plumbline/threads.hpp"

namespace plumbline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

struct Frame {
    Vec2 center;     // image center c~
    double rho_max;  // |c~|
};

Frame make_frame(int w, int h) {
    const Vec2 c{w / 2.0, h / 2.0};
    return {c, c.norm()};
}

// Entropy of the transported edgel orientations; shares the histogram
// scratch per thread so concurrent restarts stay reentrant.
double eval_cost(const std::vector<Edgel>& edgels, const ScaledParamVector& v,
                 double rho_max, int bins) {
    const DistortionParams p = unscale_params(v, rho_max);
    static thread_local std::vector<double> hist;
    hist.assign(static_cast<size_t>(bins), 0.0);

    size_t kept = 0;
    for (const Edgel& e : edgels) {
        const auto t = try_transform_edgel(p, e);
        if (!t) continue;
        ++kept;
        double theta = std::atan2(t->normal.y, t->normal.x);
        if (theta < 0.0) theta += kPi;
        if (theta >= kPi) theta -= kPi;
        if (theta < 0.0) theta = 0.0;
        const double u = theta * bins / kPi;
        int i0 = static_cast<int>(u);
        if (i0 >= bins) i0 = bins - 1;
        const double frac = u - i0;
        hist[static_cast<size_t>(i0)] += 1.0 - frac;
        hist[static_cast<size_t>((i0 + 1) % bins)] += frac;
    }
    if (kept * 2 < edgels.size() || kept == 0) return kInf;

    double c = 0.0;
    const double total = static_cast<double>(kept);
    for (double b : hist) {
        if (b <= 0.0) continue;
        const double pr = b / total;
        c -= pr * std::log2(pr);
    }
    return c;
}

ScaledParamVector embed(const std::vector<double>& x, const ScaledParamVector& base) {
    ScaledParamVector v = base;
    for (size_t i = 0; i < x.size() && i < 9; ++i) v[i] = x[i];
    return v;
}

}  // namespace

ScaledParamVector scale_params(const DistortionParams& p, double rho_max) {
    ScaledParamVector v{};
    v[0] = p.c.x;
    v[1] = p.c.y;
    v[2] = 100.0 * p.gamma * rho_max * rho_max;
    for (size_t i = 0; i < 6; ++i) v[3 + i] = 1e5 * p.b[i];
    return v;
}

DistortionParams unscale_params(const ScaledParamVector& v, double rho_max) {
    DistortionParams p;
    p.c = {v[0], v[1]};
    p.gamma = v[2] / (100.0 * rho_max * rho_max);
    for (size_t i = 0; i < 6; ++i) p.b[i] = v[3 + i] * 1e-5;
    return p;
}

double entropy_cost(const std::vector<Edgel>& edgels, int img_width, int img_height,
                    const ScaledParamVector& v, int bins) {
    if (edgels.empty())
        throw std::invalid_argument("entropy_cost: no edgels");
    return eval_cost(edgels, v, make_frame(img_width, img_height).rho_max, bins);
}

DistortionParams mcdh_calibrate(const std::vector<Edgel>& edgels, int img_width,
                                int img_height, const OptimConfig& cfg, int bins,
                                std::vector<RestartTrace>* trace) {
    if (edgels.size() < cfg.min_edgels)
        throw std::invalid_argument("mcdh_calibrate: " + std::to_string(edgels.size()) +
                                    " edgels, need at least " +
                                    std::to_string(cfg.min_edgels));
    if (cfg.restarts < 1)
        throw std::invalid_argument("mcdh_calibrate: restarts must be >= 1");

    const Frame fr = make_frame(img_width, img_height);
    const size_t ndim = cfg.radial_only ? 3 : 9;
    const double center_sigma = fr.rho_max * cfg.center_sigma_fraction;

    auto objective = [&](const std::vector<double>& x) {
        return eval_cost(edgels, embed(x, ScaledParamVector{}), fr.rho_max, bins);
    };

    std::vector<SimplexResult> results(static_cast<size_t>(cfg.restarts));
    parallel_for(0, cfg.restarts, cfg.threads, [&](long k) {
        std::mt19937_64 rng(mix_seed(cfg.rng_seed, static_cast<uint64_t>(k)));
        std::normal_distribution<double> n01;
        std::vector<double> x0(ndim, 0.0);
        x0[0] = fr.center.x + center_sigma * n01(rng);
        x0[1] = fr.center.y + center_sigma * n01(rng);
        x0[2] = cfg.beta_sigma * n01(rng);
        results[static_cast<size_t>(k)] =
            downhill_simplex(objective, x0, cfg.max_iters, cfg.residual_tol);
    });

    size_t best = 0;
    for (size_t k = 1; k < results.size(); ++k)
        if (results[k].fx < results[best].fx) best = k;  // ties keep smallest index

    if (trace) {
        trace->clear();
        for (size_t k = 0; k < results.size(); ++k)
            trace->push_back({static_cast<int>(k), results[k].iters, results[k].fx,
                              unscale_params(embed(results[k].x, ScaledParamVector{}),
                                             fr.rho_max)});
    }

    // Identity fallback: self-calibration must never make things worse.
    std::vector<double> x_id(ndim, 0.0);
    x_id[0] = fr.center.x;
    x_id[1] = fr.center.y;
    const double f_id = objective(x_id);
    if (!(results[best].fx <= f_id)) {
        DistortionParams id;
        id.c = fr.center;
        return id;
    }
    return unscale_params(embed(results[best].x, ScaledParamVector{}), fr.rho_max);
}

void write_trace_csv(const std::vector<RestartTrace>& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fputs("restart,iters,cost,c1,c2,gamma,b1,b2,b3,b4,b5,b6\n", f);
    for (const RestartTrace& t : trace) {
        std::fprintf(f, "%d,%d,%.17g,%.17g,%.17g,%.17g", t.restart, t.iters, t.cost,
                     t.params.c.x, t.params.c.y, t.params.gamma);
        for (double bi : t.params.b) std::fprintf(f, ",%.17g", bi);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

}  // namespace plumbline
