#include "plumbline/edgels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "plumbline/threads.hpp"

namespace plumbline {

GradientField gradient(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("gradient: image must be at least 3x3");
    GradientField g;
    g.width = img.width;
    g.height = img.height;
    g.data.resize(img.data.size());
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double gx, gy;
            if (x == 0)
                gx = img.at(1, y) - img.at(0, y);
            else if (x == img.width - 1)
                gx = img.at(x, y) - img.at(x - 1, y);
            else
                gx = (img.at(x + 1, y) - img.at(x - 1, y)) * 0.5;
            if (y == 0)
                gy = img.at(x, 1) - img.at(x, 0);
            else if (y == img.height - 1)
                gy = img.at(x, y) - img.at(x, y - 1);
            else
                gy = (img.at(x, y + 1) - img.at(x, y - 1)) * 0.5;
            g.data[static_cast<size_t>(y) * img.width + x] = {gx, gy};
        }
    }
    return g;
}

namespace {

struct StickVote {
    double w;     // scalar weight (before gradient magnitude)
    Vec2 normal;  // predicted receiver normal, unit
};

// Vote cast by a voter with unit normal `n` at a receiver offset `d`.
// The voter's tangent and the receiver are joined by an osculating circle;
// s is its arc length, k its curvature, and the receiver normal is the
// circle normal (a rotation of n by twice the offset angle).
StickVote stick_vote(const Vec2& n, const Vec2& d, double sigma, double kappa) {
    const double l = d.norm();
    if (l == 0.0) return {1.0, n};
    Vec2 nn = n;
    Vec2 tt = n.perp();
    double xt = d.dot(tt);
    double xn = d.dot(nn);
    if (xt < 0.0) { tt = tt * -1.0; xt = -xt; }
    if (xn < 0.0) { nn = nn * -1.0; xn = -xn; }
    const double theta = std::atan2(xn, xt);  // in [0, pi/2]
    // standard stick field: no votes outside the 45 degree cone about the
    // tangent; a smooth continuation cannot bend that sharply, and without
    // the cutoff a thick straight edge pollutes its own plateness
    if (theta > 0.25 * std::numbers::pi) return {0.0, n};
    const double sin_t = std::sin(theta);
    const double s = sin_t < 1e-12 ? l : l * theta / sin_t;
    const double k = 2.0 * sin_t / l;
    const double w = std::exp(-(s * s + kappa * k * k) / (sigma * sigma));
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    return {w, tt * -s2 + nn * c2};
}

}  // namespace

TensorField tensor_vote(const GradientField& grad, double sigma, int threads) {
    if (sigma <= 0.0)
        throw std::invalid_argument("tensor_vote: sigma must be positive");
    const int w = grad.width, h = grad.height;
    TensorField out;
    out.width = w;
    out.height = h;
    out.t11.assign(grad.data.size(), 0.0);
    out.t12.assign(grad.data.size(), 0.0);
    out.t22.assign(grad.data.size(), 0.0);

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const double r2max = 9.0 * sigma * sigma;
    const double kappa = 0.25 * sigma * sigma;

    // Gather form: each receiver sums the votes of nearby voters in a fixed
    // scan order, so accumulation is deterministic for any thread count.
    parallel_for(0, h, threads, [&](long ry) {
        for (int rx = 0; rx < w; ++rx) {
            double a11 = 0.0, a12 = 0.0, a22 = 0.0;
            const int y0 = std::max(0, static_cast<int>(ry) - radius);
            const int y1 = std::min(h - 1, static_cast<int>(ry) + radius);
            const int x0 = std::max(0, rx - radius);
            const int x1 = std::min(w - 1, rx + radius);
            for (int vy = y0; vy <= y1; ++vy) {
                for (int vx = x0; vx <= x1; ++vx) {
                    const Vec2 gv = grad.data[static_cast<size_t>(vy) * w + vx];
                    const double m2 = gv.squared_norm();
                    if (m2 == 0.0) continue;
                    const Vec2 d{static_cast<double>(rx - vx),
                                 static_cast<double>(ry - vy)};
                    if (d.squared_norm() > r2max) continue;
                    const double m = std::sqrt(m2);
                    const StickVote v = stick_vote(gv / m, d, sigma, kappa);
                    const double wm = v.w * m;
                    a11 += wm * v.normal.x * v.normal.x;
                    a12 += wm * v.normal.x * v.normal.y;
                    a22 += wm * v.normal.y * v.normal.y;
                }
            }
            const size_t i = static_cast<size_t>(ry) * w + rx;
            out.t11[i] = a11;
            out.t12[i] = a12;
            out.t22[i] = a22;
        }
    });
    return out;
}

SaliencyField saliency_and_normals(const TensorField& t, double e) {
    if (e <= 0.0)
        throw std::invalid_argument("saliency_and_normals: e must be positive");
    SaliencyField s;
    s.width = t.width;
    s.height = t.height;
    s.phi.resize(t.t11.size());
    s.normal.resize(t.t11.size());
    for (size_t i = 0; i < t.t11.size(); ++i) {
        const double a = t.t11[i], b = t.t12[i], c = t.t22[i];
        if (a == 0.0 && b == 0.0 && c == 0.0) {
            s.phi[i] = 0.0;
            s.normal[i] = {1.0, 0.0};
            continue;
        }
        const double tr = a + c;
        const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
        const double l1 = 0.5 * (tr + disc);
        const double l2 = 0.5 * (tr - disc);
        s.phi[i] = l1 - e * l2;
        // leading eigenvector of [[a,b],[b,c]]
        Vec2 v{l1 - c, b};
        Vec2 w{b, l1 - a};
        if (w.squared_norm() > v.squared_norm()) v = w;
        if (v.squared_norm() == 0.0) v = {1.0, 0.0};  // isotropic tensor
        v = v.normalized();
        if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = v * -1.0;
        s.normal[i] = v;
    }
    return s;
}

std::vector<Edgel> extract_edgels(const GrayImage& img, const ExtractionConfig& cfg) {
    if (cfg.sigma_vote <= 0.0 || cfg.e_saliency <= 0.0 || cfg.target_edgels <= 0 ||
        cfg.grid_cells <= 0)
        throw std::invalid_argument("extract_edgels: invalid config");
    const GradientField grad = gradient(img);
    const TensorField tf = tensor_vote(grad, cfg.sigma_vote, cfg.threads);
    const SaliencyField sf = saliency_and_normals(tf, cfg.e_saliency);

    const int g = cfg.grid_cells;
    const long ncells = static_cast<long>(g) * g;
    const long quota = (cfg.target_edgels + ncells - 1) / ncells;

    // skip a border band where gradients are one-sided and vote support is
    // truncated; normals there are unreliable
    int margin = static_cast<int>(std::ceil(3.0 * cfg.sigma_vote));
    margin = std::min({margin, img.width / 4, img.height / 4});

    // candidates must be edges themselves; pixels that merely receive votes
    // (smooth interiors, ridge centerlines) carry vote-dominated tensors
    // whose eigenvectors are unrelated to any local edge
    double gmax2 = 0.0;
    for (const Vec2& v : grad.data) gmax2 = std::max(gmax2, v.squared_norm());
    const double gmin2 = 0.01 * gmax2;  // magnitude floor: 10% of the strongest edge

    std::vector<std::vector<size_t>> cells(static_cast<size_t>(ncells));
    for (int y = margin; y < img.height - margin; ++y) {
        const int cy = std::min(g - 1, y * g / img.height);
        for (int x = margin; x < img.width - margin; ++x) {
            const size_t i = static_cast<size_t>(y) * img.width + x;
            if (sf.phi[i] <= 0.0) continue;
            if (grad.data[i].squared_norm() <= gmin2) continue;
            const int cx = std::min(g - 1, x * g / img.width);
            cells[static_cast<size_t>(cy) * g + cx].push_back(i);
        }
    }

    std::vector<Edgel> out;
    for (long ci = 0; ci < ncells; ++ci) {
        auto& cand = cells[static_cast<size_t>(ci)];
        if (static_cast<long>(cand.size()) > quota) {
            std::mt19937_64 rng(mix_seed(cfg.rng_seed, static_cast<uint64_t>(ci)));
            // partial Fisher-Yates, keep the first `quota` picks
            for (long j = 0; j < quota; ++j) {
                std::uniform_int_distribution<size_t> pick(static_cast<size_t>(j),
                                                           cand.size() - 1);
                std::swap(cand[static_cast<size_t>(j)], cand[pick(rng)]);
            }
            cand.resize(static_cast<size_t>(quota));
            std::sort(cand.begin(), cand.end());
        }
        for (size_t i : cand) {
            const int x = static_cast<int>(i % img.width);
            const int y = static_cast<int>(i / img.width);
            out.push_back({{static_cast<double>(x), static_cast<double>(y)},
                           sf.normal[i],
                           sf.phi[i]});
        }
    }
    return out;
}

void write_edgels_csv(const std::vector<Edgel>& edgels, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fputs("x,y,nx,ny,weight\n", f);
    for (const Edgel& e : edgels)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", e.position.x, e.position.y,
                     e.normal.x, e.normal.y, e.weight);
    std::fclose(f);
}

}  // namespace plumbline
