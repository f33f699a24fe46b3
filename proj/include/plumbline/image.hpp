#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plumbline {

/// Row-major grayscale raster with intensities in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Loads 8/16-bit grayscale or color PNG/PGM; color is reduced with
/// luma = 0.299 R + 0.587 G + 0.114 B. Throws std::runtime_error on failure.
GrayImage load_gray(const std::string& path);

/// Writes 8-bit PNG or PGM depending on the extension.
void save_gray(const GrayImage& img, const std::string& path);

/// Writes a coverage mask (0 = uncovered, 255 = covered); bilevel PNG when
/// the extension is .png.
void save_mask(const std::vector<uint8_t>& mask, int width, int height,
               const std::string& path);

}  // namespace plumbline
