#pragma once

#include <string>
#include <vector>

#include "plumbline/model.hpp"

namespace plumbline {

/// B-bin angular accumulator over orientations theta in [0, pi).
struct OrientationHistogram {
    std::vector<double> bins;

    double total_mass() const;
};

/// 1-D angular Hough transform of edgel normals. Each edgel votes mass 1,
/// split between the two neighbouring bins by linear interpolation on the
/// continuous bin coordinate u = theta * B / pi (circular wraparound).
/// Orientations are identified mod pi, so both normal signs of one line
/// land in the same bin.
OrientationHistogram hough_1d(const std::vector<Edgel>& edgels, int bins);

/// Shannon entropy (bits) of the normalized histogram:
///   C = -sum_b p_b log2 p_b, zero bins contribute nothing.
/// Throws std::domain_error on an all-zero histogram.
double entropy(const OrientationHistogram& h);

/// CSV export: header "bin_index,theta_center_radians,mass".
void write_histogram_csv(const OrientationHistogram& h, const std::string& path);

}  // namespace plumbline
