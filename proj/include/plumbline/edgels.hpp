#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plumbline/image.hpp"
#include "plumbline/model.hpp"
#include "plumbline/vec2.hpp"

namespace plumbline {

/// Per-pixel image gradient, central differences in the interior and
/// one-sided at the borders.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<Vec2> data;

    Vec2 at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

/// Per-pixel symmetric 2x2 second-moment accumulator.
struct TensorField {
    int width = 0;
    int height = 0;
    std::vector<double> t11, t12, t22;
};

struct ExtractionConfig {
    double sigma_vote = 6.0;     ///< stick-voting kernel scale, pixels
    double e_saliency = 2.0;     ///< saliency weight e in phi = max - e*min
    int target_edgels = 100000;  ///< total edgels kept after subsampling
    int grid_cells = 16;         ///< stratification grid cells per axis
    uint64_t rng_seed = 0;       ///< subsampling seed
    int threads = 0;             ///< 0 = auto
};

/// Per-pixel edge saliency and normal derived from the tensor eigensystem.
struct SaliencyField {
    int width = 0;
    int height = 0;
    std::vector<double> phi;
    std::vector<Vec2> normal;
};

GradientField gradient(const GrayImage& img);

/// Stick tensor voting on the gradient field. Every pixel with a nonzero
/// gradient casts votes to all pixels within radius 3*sigma; a vote is the
/// outer product of the normal predicted by the osculating circle joining
/// voter and receiver, attenuated by arc length and curvature:
///   w = m * exp(-(s^2 + 0.25*sigma^2 * k^2) / sigma^2).
/// Accumulation is gather-ordered per receiving pixel, so the result is
/// independent of the thread count.
TensorField tensor_vote(const GradientField& grad, double sigma, int threads = 0);

/// phi = lambda_max - e * lambda_min; normal is the leading eigenvector with
/// nonnegative x (ties broken toward nonnegative y). A zero tensor yields
/// phi = 0 and normal (1,0).
SaliencyField saliency_and_normals(const TensorField& t, double e);

/// Full pipeline: gradient -> tensor_vote -> saliency threshold (phi > 0) ->
/// grid-stratified seeded subsampling. Deterministic given (img, cfg).
std::vector<Edgel> extract_edgels(const GrayImage& img, const ExtractionConfig& cfg);

/// CSV export: header "x,y,nx,ny,weight", one row per edgel.
void write_edgels_csv(const std::vector<Edgel>& edgels, const std::string& path);

}  // namespace plumbline
