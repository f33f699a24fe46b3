#include "plumbline/model.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace plumbline {

namespace {

constexpr double kCenterEps = 1e-12;  // below this radius a point is "at" c

struct GTerms {
    double g;        // g(r_hat)
    double dg_dr1;   // dg / d r_hat_1
    double dg_dr2;   // dg / d r_hat_2
};

GTerms g_terms(const std::array<double, 6>& b, const Vec2& r_hat) {
    const double lin = b[0] * r_hat.y + b[1] * r_hat.x;
    const double q = b[2] * r_hat.y + b[3] * r_hat.x;
    const double s = b[4] * r_hat.y + b[5] * r_hat.x;
    GTerms t;
    t.g = lin + q * q + s * s * s;
    t.dg_dr1 = b[1] + 2.0 * b[3] * q + 3.0 * b[5] * s * s;
    t.dg_dr2 = b[0] + 2.0 * b[2] * q + 3.0 * b[4] * s * s;
    return t;
}

}  // namespace

bool DistortionParams::is_identity() const {
    if (gamma != 0.0) return false;
    for (double bi : b)
        if (bi != 0.0) return false;
    return true;
}

bool DistortionParams::valid_for_radius(double rho_max) const {
    return 1.0 + gamma * rho_max * rho_max > 0.0;
}

double harris_f(double gamma, double rho) {
    const double den = 1.0 + gamma * rho * rho;
    if (den <= 0.0)
        throw std::domain_error("harris_f: 1 + gamma*rho^2 <= 0");
    return rho / std::sqrt(den);
}

double anisotropy_g(const std::array<double, 6>& b, const Vec2& r_hat) {
    return g_terms(b, r_hat).g;
}

Vec2 correct_point(const DistortionParams& p, const Vec2& x) {
    if (p.is_identity()) return x;
    const Vec2 r = x - p.c;
    const double rho = r.norm();
    if (rho < kCenterEps) return p.c;
    const Vec2 r_hat = r / rho;
    const double f = harris_f(p.gamma, rho);
    const double g = anisotropy_g(p.b, r_hat);
    return r_hat * (f * (1.0 + g)) + p.c;
}

Vec2 invert_point(const DistortionParams& p, const Vec2& x_out) {
    if (p.is_identity()) return x_out;
    const Vec2 r = x_out - p.c;
    const double rho_out = r.norm();
    if (rho_out < kCenterEps) return p.c;
    const Vec2 r_hat = r / rho_out;
    const double one_plus_g = 1.0 + anisotropy_g(p.b, r_hat);
    if (one_plus_g <= 0.0)
        throw std::domain_error("invert_point: 1 + g(theta) <= 0");
    const double fv = rho_out / one_plus_g;  // = f(rho) of the source point
    const double den = 1.0 - p.gamma * fv * fv;
    if (den <= 0.0)
        throw std::domain_error("invert_point: outside invertible range");
    const double rho = fv / std::sqrt(den);
    return r_hat * rho + p.c;
}

Jacobian2x2 jacobian(const DistortionParams& p, const Vec2& x) {
    const Vec2 r = x - p.c;
    const double rho = r.norm();
    if (rho < kCenterEps)
        throw std::domain_error("jacobian: singular at the distortion center");
    if (p.is_identity()) return {};
    const Vec2 rh = r / rho;
    const double den = 1.0 + p.gamma * rho * rho;
    if (den <= 0.0)
        throw std::domain_error("jacobian: 1 + gamma*rho^2 <= 0");
    const double f = rho / std::sqrt(den);
    const double fp = std::pow(den, -1.5);
    const GTerms gt = g_terms(p.b, rh);
    const double opg = 1.0 + gt.g;

    // d r_hat / d x = (1/rho) [ r2^2, -r1 r2 ; -r1 r2, r1^2 ]
    const double h11 = rh.y * rh.y / rho;
    const double h12 = -rh.x * rh.y / rho;
    const double h22 = rh.x * rh.x / rho;

    // dg/dx = [dg/dr1 dg/dr2] * d r_hat / d x
    const double dg_dx1 = gt.dg_dr1 * h11 + gt.dg_dr2 * h12;
    const double dg_dx2 = gt.dg_dr1 * h12 + gt.dg_dr2 * h22;

    Jacobian2x2 j;
    j.j11 = h11 * f * opg + rh.x * opg * fp * rh.x + rh.x * f * dg_dx1;
    j.j12 = h12 * f * opg + rh.x * opg * fp * rh.y + rh.x * f * dg_dx2;
    j.j21 = h12 * f * opg + rh.y * opg * fp * rh.x + rh.y * f * dg_dx1;
    j.j22 = h22 * f * opg + rh.y * opg * fp * rh.y + rh.y * f * dg_dx2;
    return j;
}

Edgel transform_edgel(const DistortionParams& p, const Edgel& e) {
    if (p.is_identity()) return e;
    const Jacobian2x2 j = jacobian(p, e.position);
    // h = R90 * J * R(-90) * n
    const Vec2 tangent{-e.normal.y, e.normal.x};        // R(-90) n
    const Vec2 jt = j.apply(tangent);
    const Vec2 h{jt.y, -jt.x};                          // R90 (J t)
    const double n = h.norm();
    if (n <= 0.0 || !std::isfinite(n))
        throw std::domain_error("transform_edgel: degenerate transported normal");
    Edgel out;
    out.position = correct_point(p, e.position);
    out.normal = h / n;
    out.weight = e.weight;
    return out;
}

std::optional<Vec2> try_correct_point(const DistortionParams& p, const Vec2& x) {
    if (p.is_identity()) return x;
    const Vec2 r = x - p.c;
    const double rho = r.norm();
    if (rho < kCenterEps) return std::nullopt;
    const double den = 1.0 + p.gamma * rho * rho;
    if (den <= 0.0) return std::nullopt;
    const Vec2 r_hat = r / rho;
    const double f = rho / std::sqrt(den);
    return r_hat * (f * (1.0 + anisotropy_g(p.b, r_hat))) + p.c;
}

std::optional<Edgel> try_transform_edgel(const DistortionParams& p, const Edgel& e) {
    if (p.is_identity()) return e;
    const Vec2 r = e.position - p.c;
    const double rho = r.norm();
    if (rho < kCenterEps) return std::nullopt;
    if (1.0 + p.gamma * rho * rho <= 0.0) return std::nullopt;
    const Jacobian2x2 j = jacobian(p, e.position);
    const Vec2 tangent{-e.normal.y, e.normal.x};
    const Vec2 jt = j.apply(tangent);
    const Vec2 h{jt.y, -jt.x};
    const double n = h.norm();
    if (n <= 0.0 || !std::isfinite(n)) return std::nullopt;
    Edgel out;
    out.position = correct_point(p, e.position);
    out.normal = h / n;
    out.weight = e.weight;
    return out;
}

std::string params_to_json(const DistortionParams& p) {
    nlohmann::json j;
    j["c"] = {p.c.x, p.c.y};
    j["gamma"] = p.gamma;
    j["b"] = p.b;
    return j.dump(2) + "\n";
}

DistortionParams params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    DistortionParams p;
    p.c = {j.at("c").at(0).get<double>(), j.at("c").at(1).get<double>()};
    p.gamma = j.at("gamma").get<double>();
    const auto& b = j.at("b");
    if (b.size() != 6)
        throw std::invalid_argument("params JSON: expected 6 anisotropy coefficients");
    for (int i = 0; i < 6; ++i) p.b[static_cast<size_t>(i)] = b.at(i).get<double>();
    return p;
}

}  // namespace plumbline
