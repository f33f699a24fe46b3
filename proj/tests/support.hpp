// Shared helpers for the test suites: independent oracles and generators.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "plumbline/image.hpp"
#include "plumbline/model.hpp"

namespace testsupport {

using plumbline::DistortionParams;
using plumbline::Jacobian2x2;
using plumbline::Vec2;

// Central-finite-difference Jacobian of correct_point; the independent
// oracle for the analytic Jacobian.
inline Jacobian2x2 fd_jacobian(const DistortionParams& p, const Vec2& x,
                               double step = 1e-4) {
    auto d = [&](const Vec2& q) { return plumbline::correct_point(p, q); };
    const Vec2 dx{step, 0.0}, dy{0.0, step};
    const Vec2 fx = (d(x + dx) - d(x - dx)) / (2.0 * step);
    const Vec2 fy = (d(x + dy) - d(x - dy)) / (2.0 * step);
    Jacobian2x2 j;
    j.j11 = fx.x;
    j.j12 = fy.x;
    j.j21 = fx.y;
    j.j22 = fy.y;
    return j;
}

struct ParamPointDraw {
    DistortionParams params;
    Vec2 point;
};

// Random (params, point) pairs on the domain used by the acceptance gate:
// rho in [10, 1000], gamma*rho_max^2 in [-0.5, 0.5] with rho_max = 1000,
// b_i in [-3e-3, 3e-3]; the center stays at a modest offset from the origin.
inline ParamPointDraw random_param_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double rho_max = 1000.0;
    DistortionParams p;
    p.c = {u01(rng) * 100.0 - 50.0, u01(rng) * 100.0 - 50.0};
    p.gamma = (u01(rng) - 0.5) / (rho_max * rho_max);
    for (auto& bi : p.b) bi = (u01(rng) * 2.0 - 1.0) * 3e-3;
    const double rho = 10.0 + u01(rng) * 990.0;
    const double ang = u01(rng) * 2.0 * M_PI;
    ParamPointDraw d;
    d.params = p;
    d.point = p.c + Vec2{std::cos(ang), std::sin(ang)} * rho;
    return d;
}

// Least-squares line fit through 2-D points (total least squares via the
// covariance eigensystem); returns max orthogonal deviation.
inline double max_line_deviation(const std::vector<Vec2>& pts) {
    const size_t n = pts.size();
    Vec2 mean{0, 0};
    for (const auto& p : pts) mean += p;
    mean = mean / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
        const Vec2 d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // normal of the best-fit line = eigenvector of the smaller eigenvalue
    const double tr = sxx + syy;
    const double disc = std::sqrt((sxx - syy) * (sxx - syy) + 4.0 * sxy * sxy);
    const double lmin = 0.5 * (tr - disc);
    Vec2 normal{sxy, lmin - sxx};
    if (normal.squared_norm() == 0.0) normal = {lmin - syy, sxy};
    if (normal.squared_norm() == 0.0) normal = {1.0, 0.0};
    normal = normal.normalized();
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, std::abs((p - mean).dot(normal)));
    return worst;
}

// Subpixel ridge centers near the line x.n = offset: walk along the line,
// scan a perpendicular intensity profile, and refine the peak with a
// parabolic fit. Points close to the border or with a weak peak are skipped.
inline std::vector<Vec2> trace_ridge(const plumbline::GrayImage& img, double theta,
                                     double offset, double scan_range) {
    const Vec2 n{std::cos(theta), std::sin(theta)};
    const Vec2 t{-n.y, n.x};
    const int range = static_cast<int>(scan_range);
    std::vector<Vec2> pts;
    const double diag = std::hypot(img.width, img.height);
    auto bilinear = [&](const Vec2& p, double* out) {
        const double fx = std::floor(p.x), fy = std::floor(p.y);
        const int xi = static_cast<int>(fx), yi = static_cast<int>(fy);
        if (xi < 8 || yi < 8 || xi >= img.width - 9 || yi >= img.height - 9)
            return false;
        const double ax = p.x - fx, ay = p.y - fy;
        *out = (1 - ax) * (1 - ay) * img.at(xi, yi) +
               ax * (1 - ay) * img.at(xi + 1, yi) +
               (1 - ax) * ay * img.at(xi, yi + 1) + ax * ay * img.at(xi + 1, yi + 1);
        return true;
    };
    for (double s = -diag; s <= diag; s += 4.0) {
        const Vec2 base = n * offset + t * s;
        int best = -range - 1;
        double best_v = 0.3;  // ignore weak responses
        bool complete = true;  // truncated profiles bias the peak
        for (int k = -range; k <= range; ++k) {
            double v;
            if (!bilinear(base + n * static_cast<double>(k), &v)) {
                complete = false;
                break;
            }
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        if (!complete || best < -range + 1 || best > range - 1) continue;
        auto at = [&](int k) {
            double v = 0.0;
            bilinear(base + n * static_cast<double>(k), &v);
            return v;
        };
        const double vm = at(best - 1), v0 = at(best), vp = at(best + 1);
        const double den = vm - 2.0 * v0 + vp;
        double frac = 0.0;
        if (den < 0.0) frac = 0.5 * (vm - vp) / den;
        if (std::abs(frac) > 1.0) frac = 0.0;
        pts.push_back(base + n * (static_cast<double>(best) + frac));
    }
    return pts;
}

inline double angle_diff_mod_pi(double a, double b) {
    double d = std::fmod(std::abs(a - b), M_PI);
    return std::min(d, M_PI - d);
}

}  // namespace testsupport
