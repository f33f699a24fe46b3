#include "plumbline/warp.hpp"

#include <cmath>
#include <stdexcept>

#include "plumbline/threads.hpp"

namespace plumbline {

std::array<double, 4> catmull_rom_weights(double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return {0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2)};
}

bool sample_bicubic(const GrayImage& img, const Vec2& pos, double* out) {
    const double fx = std::floor(pos.x);
    const double fy = std::floor(pos.y);
    const int ix = static_cast<int>(fx);
    const int iy = static_cast<int>(fy);
    if (ix - 1 < 0 || ix + 2 >= img.width || iy - 1 < 0 || iy + 2 >= img.height)
        return false;
    const auto wx = catmull_rom_weights(pos.x - fx);
    const auto wy = catmull_rom_weights(pos.y - fy);
    double acc = 0.0;
    for (int r = 0; r < 4; ++r) {
        const int y = iy - 1 + r;
        double row = 0.0;
        for (int cidx = 0; cidx < 4; ++cidx)
            row += wx[static_cast<size_t>(cidx)] * img.at(ix - 1 + cidx, y);
        acc += wy[static_cast<size_t>(r)] * row;
    }
    *out = acc;
    return true;
}

GrayImage undistort_image(const GrayImage& img, const DistortionParams& p,
                          int out_width, int out_height,
                          std::vector<uint8_t>* coverage, int threads) {
    GrayImage out(out_width, out_height, 0.0);
    if (coverage)
        coverage->assign(static_cast<size_t>(out_width) * out_height, 0);

    parallel_for(0, out_height, threads, [&](long y) {
        for (int x = 0; x < out_width; ++x) {
            Vec2 src;
            try {
                src = invert_point(p, {static_cast<double>(x), static_cast<double>(y)});
            } catch (const std::domain_error&) {
                continue;  // infeasible inversion, treated as out of bounds
            }
            double v;
            if (!sample_bicubic(img, src, &v)) continue;
            v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
            out.at(x, static_cast<int>(y)) = v;
            if (coverage)
                (*coverage)[static_cast<size_t>(y) * out_width + x] = 1;
        }
    });
    return out;
}

}  // namespace plumbline
