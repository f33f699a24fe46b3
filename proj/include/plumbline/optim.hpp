#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "plumbline/hough.hpp"
#include "plumbline/model.hpp"

namespace plumbline {

/// Optimization-space parameter vector [c1, c2, beta, d1..d6] with
/// beta = 100 * gamma * rho_max^2 and d_i = 1e5 * b_i, where rho_max is the
/// norm of the image-center vector. The rescaling brings every coordinate to
/// a comparable magnitude for the simplex.
using ScaledParamVector = std::array<double, 9>;

ScaledParamVector scale_params(const DistortionParams& p, double rho_max);
DistortionParams unscale_params(const ScaledParamVector& v, double rho_max);

struct OptimConfig {
    int restarts = 120;
    int max_iters = 1000;            ///< simplex iterations per restart
    double residual_tol = 1e-15;
    uint64_t rng_seed = 0;
    double center_sigma_fraction = 1.0 / 20.0;  ///< start-center sigma, fraction of rho_max
    double beta_sigma = 100.0;       ///< start-beta drawn from N(0, beta_sigma^2); wide
                                     ///< enough to seed strong distortions (beta ~ -60)
    size_t min_edgels = 10;
    bool radial_only = false;        ///< freeze the six anisotropy coordinates at 0
    int threads = 0;                 ///< 0 = auto
};

/// Entropy of the orientation histogram of the edgels transported through the
/// candidate correction. Edgels whose transform hits a domain error are
/// dropped; when more than half drop the candidate is infeasible and the
/// cost is +infinity.
double entropy_cost(const std::vector<Edgel>& edgels, int img_width, int img_height,
                    const ScaledParamVector& v, int bins);

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    int iters = 0;
};

/// Nelder-Mead with standard coefficients (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). The initial simplex is x0 plus one vertex
/// offset by +1 in each coordinate. Terminates when the location residual
///   r = |s_best - s_worst| / |s_best|
/// drops below `tol` (r := 0 when best and worst coincide) or after
/// `max_iters` iterations.
template <typename F>
SimplexResult downhill_simplex(F&& f, const std::vector<double>& x0, int max_iters,
                               double tol) {
    const size_t n = x0.size();
    std::vector<std::vector<double>> vx(n + 1, x0);
    for (size_t i = 0; i < n; ++i) vx[i + 1][i] += 1.0;
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i <= n; ++i) fv[i] = f(vx[i]);

    auto norm = [](const std::vector<double>& a) {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    };
    auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    };

    int iter = 0;
    while (iter < max_iters) {
        size_t best = 0, worst = 0, second = 0;
        for (size_t i = 1; i <= n; ++i) {
            if (fv[i] < fv[best]) best = i;
            if (fv[i] > fv[worst]) worst = i;
        }
        second = best;
        for (size_t i = 0; i <= n; ++i)
            if (i != worst && fv[i] > fv[second]) second = i;

        const double spread = dist(vx[best], vx[worst]);
        double residual;
        if (spread == 0.0) {
            residual = 0.0;
        } else {
            const double nb = norm(vx[best]);
            residual = nb > 0.0 ? spread / nb : std::numeric_limits<double>::infinity();
        }
        if (residual < tol) break;
        ++iter;

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (size_t k = 0; k < n; ++k) centroid[k] += vx[i][k];
        }
        for (size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

        std::vector<double> xr(n);
        for (size_t k = 0; k < n; ++k) xr[k] = 2.0 * centroid[k] - vx[worst][k];
        const double fr = f(xr);

        if (fr < fv[best]) {
            std::vector<double> xe(n);
            for (size_t k = 0; k < n; ++k) xe[k] = 3.0 * centroid[k] - 2.0 * vx[worst][k];
            const double fe = f(xe);
            if (fe < fr) {
                vx[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                vx[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            vx[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            std::vector<double> xc(n);
            if (fr < fv[worst]) {
                for (size_t k = 0; k < n; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
            } else {
                for (size_t k = 0; k < n; ++k)
                    xc[k] = centroid[k] + 0.5 * (vx[worst][k] - centroid[k]);
            }
            const double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                vx[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (size_t k = 0; k < n; ++k)
                        vx[i][k] = vx[best][k] + 0.5 * (vx[i][k] - vx[best][k]);
                    fv[i] = f(vx[i]);
                }
            }
        }
    }

    size_t best = 0;
    for (size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    return {vx[best], fv[best], iter};
}

struct RestartTrace {
    int restart = 0;
    int iters = 0;
    double cost = 0.0;
    DistortionParams params;
};

/// Monte-Carlo downhill calibration: `restarts` seeded random starts
/// (center ~ N(image center, (rho_max/20)^2 I), beta ~ N(0, beta_sigma^2),
/// anisotropy zero), each refined by downhill simplex on entropy_cost; the
/// global best is returned. Falls back to identity parameters when no
/// restart beats the identity cost. Deterministic for a given seed and any
/// thread count.
DistortionParams mcdh_calibrate(const std::vector<Edgel>& edgels, int img_width,
                                int img_height, const OptimConfig& cfg, int bins,
                                std::vector<RestartTrace>* trace = nullptr);

/// Per-restart diagnostics CSV: "restart,iters,cost,c1,c2,gamma,b1..b6".
void write_trace_csv(const std::vector<RestartTrace>& trace, const std::string& path);

}  // namespace plumbline
