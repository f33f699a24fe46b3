#pragma once

#include <cstdint>
#include <vector>

#include "plumbline/image.hpp"
#include "plumbline/model.hpp"

namespace plumbline {

/// Catmull-Rom (a = -0.5) kernel weights for fractional offset t in [0,1),
/// covering samples at -1, 0, +1, +2. Weights sum to 1 and interpolate
/// exactly at t = 0.
std::array<double, 4> catmull_rom_weights(double t);

/// Samples the image at a continuous position with bicubic Catmull-Rom
/// interpolation. Returns false when the 4x4 support leaves the image.
bool sample_bicubic(const GrayImage& img, const Vec2& pos, double* out);

/// Inverse-maps every output pixel through invert_point and resamples the
/// input bicubically. Pixels whose preimage (with support) falls outside the
/// input, or whose inversion is infeasible, are written black and cleared in
/// `coverage` (when given). Output values are clamped to [0,1].
GrayImage undistort_image(const GrayImage& img, const DistortionParams& p,
                          int out_width, int out_height,
                          std::vector<uint8_t>* coverage = nullptr, int threads = 0);

}  // namespace plumbline
