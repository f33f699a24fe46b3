#include "plumbline/hough.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace plumbline {

double OrientationHistogram::total_mass() const {
    double t = 0.0;
    for (double b : bins) t += b;
    return t;
}

namespace {

constexpr double kPi = std::numbers::pi;

// folds atan2 output into [0, pi)
inline double orientation_mod_pi(const Vec2& n) {
    double theta = std::atan2(n.y, n.x);
    if (theta < 0.0) theta += kPi;
    if (theta >= kPi) theta -= kPi;
    if (theta < 0.0) theta = 0.0;
    return theta;
}

}  // namespace

OrientationHistogram hough_1d(const std::vector<Edgel>& edgels, int bins) {
    if (bins < 2)
        throw std::invalid_argument("hough_1d: need at least 2 bins");
    OrientationHistogram h;
    h.bins.assign(static_cast<size_t>(bins), 0.0);
    for (const Edgel& e : edgels) {
        const double u = orientation_mod_pi(e.normal) * bins / kPi;
        int i0 = static_cast<int>(u);
        if (i0 >= bins) i0 = bins - 1;
        const double frac = u - i0;
        h.bins[static_cast<size_t>(i0)] += 1.0 - frac;
        h.bins[static_cast<size_t>((i0 + 1) % bins)] += frac;
    }
    return h;
}

double entropy(const OrientationHistogram& h) {
    const double total = h.total_mass();
    if (total <= 0.0)
        throw std::domain_error("entropy: histogram has no mass");
    double c = 0.0;
    for (double b : h.bins) {
        if (b <= 0.0) continue;
        const double p = b / total;
        c -= p * std::log2(p);
    }
    return c;
}

void write_histogram_csv(const OrientationHistogram& h, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fputs("bin_index,theta_center_radians,mass\n", f);
    const size_t n = h.bins.size();
    for (size_t i = 0; i < n; ++i) {
        const double theta = static_cast<double>(i) * kPi / static_cast<double>(n);
        std::fprintf(f, "%zu,%.17g,%.17g\n", i, theta, h.bins[i]);
    }
    std::fclose(f);
}

}  // namespace plumbline
