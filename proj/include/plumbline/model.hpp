#pragma once

#include <array>
#include <optional>
#include <string>

#include "plumbline/vec2.hpp"

namespace plumbline {

/// Anisotropic Harris distortion-correction model.
///
/// The corrected position of a point x is
///   D(x) = r_hat * f(rho) * (1 + g(theta)) + c
/// with r = x - c, rho = |r|, f(rho) = rho / sqrt(1 + gamma*rho^2) and
/// g an angular modulation parameterized by six coefficients b1..b6.
struct DistortionParams {
    Vec2 c;                           ///< center of radial distortion, pixels
    double gamma = 0.0;               ///< Harris coefficient, pixels^-2
    std::array<double, 6> b{};        ///< anisotropy coefficients, dimensionless

    bool is_identity() const;

    /// True when 1 + gamma*rho^2 > 0 for every rho in (0, rho_max].
    bool valid_for_radius(double rho_max) const;
};

/// An edge sample: subpixel position, unit normal and a saliency weight.
struct Edgel {
    Vec2 position;
    Vec2 normal;
    double weight = 1.0;
};

/// dD/dx of the correction map at a point.
struct Jacobian2x2 {
    double j11 = 1.0, j12 = 0.0;
    double j21 = 0.0, j22 = 1.0;

    Vec2 apply(const Vec2& v) const {
        return {j11 * v.x + j12 * v.y, j21 * v.x + j22 * v.y};
    }
};

/// Harris radial correction f(rho) = rho / sqrt(1 + gamma*rho^2).
/// Throws std::domain_error when 1 + gamma*rho^2 <= 0.
double harris_f(double gamma, double rho);

/// Angular modulation g evaluated on a unit direction r_hat:
///   g = b1*r2 + b2*r1 + (b3*r2 + b4*r1)^2 + (b5*r2 + b6*r1)^3.
double anisotropy_g(const std::array<double, 6>& b, const Vec2& r_hat);

/// Applies the correction map to a point. correct_point(p, p.c) == p.c by
/// convention (the limit rho -> 0 of the map).
Vec2 correct_point(const DistortionParams& p, const Vec2& x);

/// Exact inverse of correct_point. The map preserves ray direction, so the
/// inversion is scalar per ray: divide the output radius by (1 + g(theta)),
/// then apply the closed-form Harris inverse rho = rho' / sqrt(1 - gamma*rho'^2).
/// Throws std::domain_error outside the invertible range.
Vec2 invert_point(const DistortionParams& p, const Vec2& x_out);

/// Analytic Jacobian dD/dx. Throws std::domain_error at x == p.c.
Jacobian2x2 jacobian(const DistortionParams& p, const Vec2& x);

/// Transports an edgel through the correction map: the position through
/// correct_point, the normal through h = R90 * J * R(-90) * n, renormalized.
Edgel transform_edgel(const DistortionParams& p, const Edgel& e);

/// Non-throwing variants for optimizer hot paths. Return nullopt on any
/// domain failure (point at the center, non-positive 1 + gamma*rho^2,
/// non-positive 1 + g, degenerate transported normal).
std::optional<Vec2> try_correct_point(const DistortionParams& p, const Vec2& x);
std::optional<Edgel> try_transform_edgel(const DistortionParams& p, const Edgel& e);

/// JSON interchange: {"c":[c1,c2],"gamma":g,"b":[b1..b6]}.
std::string params_to_json(const DistortionParams& p);
DistortionParams params_from_json(const std::string& text);

}  // namespace plumbline
