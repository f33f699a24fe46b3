#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "plumbline/synth.hpp"
#include "support.hpp"

using namespace plumbline;
using namespace testsupport;

TEST_CASE("straight scenes put exact points on exact lines") {
    SceneConfig cfg;
    cfg.gamma_true = 0.0;
    cfg.orientation_noise_sigma = 0.0;
    cfg.rng_seed = 6;
    const Scene s = generate_scene(cfg);
    REQUIRE(s.edgels.size() == 50);
    CHECK(s.ground_truth.is_identity());
    for (int l = 0; l < 5; ++l) {
        const Edgel& first = s.edgels[static_cast<size_t>(l) * 10];
        const Vec2 n = first.normal;
        for (int i = 0; i < 10; ++i) {
            const Edgel& e = s.edgels[static_cast<size_t>(l) * 10 + i];
            CHECK(e.normal == n);
            CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs((e.position - first.position).dot(n)) < 1e-9);
            CHECK((e.position - Vec2{125.0, 125.0}).norm() >= cfg.center_exclusion);
            CHECK(e.position.x >= 0.0);
            CHECK(e.position.x <= 249.0);
            CHECK(e.position.y >= 0.0);
            CHECK(e.position.y <= 249.0);
        }
    }
}

TEST_CASE("a distorted scene is the straight scene pushed through the model") {
    SceneConfig straight;
    straight.rng_seed = 14;
    SceneConfig bent = straight;
    bent.gamma_true = 1.5e-5;
    const Scene a = generate_scene(straight);
    const Scene b = generate_scene(bent);
    REQUIRE(a.edgels.size() == b.edgels.size());
    CHECK(b.ground_truth.gamma == 1.5e-5);
    CHECK(b.ground_truth.c == Vec2{125.0, 125.0});
    for (size_t i = 0; i < a.edgels.size(); ++i) {
        const Edgel t = transform_edgel(b.ground_truth, a.edgels[i]);
        CHECK((t.position - b.edgels[i].position).norm() < 1e-12);
        CHECK((t.normal - b.edgels[i].normal).norm() < 1e-12);
    }
}

TEST_CASE("clutter count matches the contamination fraction exactly") {
    SceneConfig cfg;
    cfg.noise_fraction = 0.5;
    cfg.rng_seed = 3;
    const Scene s = generate_scene(cfg);
    CHECK(s.edgels.size() == 100);  // 50 line edgels + 50 clutter

    cfg.noise_fraction = 0.2;
    const Scene s2 = generate_scene(cfg);
    // round(0.2/0.8 * 50) = 13
    CHECK(s2.edgels.size() == 63);
}

TEST_CASE("point clutter respects bounds and the exclusion disc") {
    SceneConfig cfg;
    cfg.noise_fraction = 0.6;
    cfg.rng_seed = 8;
    const Scene s = generate_scene(cfg);
    for (size_t i = 50; i < s.edgels.size(); ++i) {
        const Edgel& e = s.edgels[i];
        CHECK(e.position.x >= 0.0);
        CHECK(e.position.x <= 249.0);
        CHECK(e.position.y >= 0.0);
        CHECK(e.position.y <= 249.0);
        CHECK((e.position - Vec2{125.0, 125.0}).norm() >= cfg.center_exclusion);
        CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ellipse clutter points lie on their ellipses with outward normals") {
    SceneConfig cfg;
    cfg.noise_fraction = 0.5;
    cfg.clutter_kind = ClutterKind::correlated_ellipses;
    cfg.rng_seed = 19;
    const Scene s = generate_scene(cfg);
    REQUIRE(s.edgels.size() == 100);
    for (size_t i = 50; i < s.edgels.size(); ++i) {
        const Edgel& e = s.edgels[i];
        CHECK(e.position.x >= 0.0);
        CHECK(e.position.x <= 249.0);
        CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // correlated clutter has structured orientations: consecutive samples on
    // one arc have slowly varying normals much more often than random pairs
    int slow = 0;
    for (size_t i = 51; i < 100; ++i) {
        const double d = angle_diff_mod_pi(
            std::atan2(s.edgels[i].normal.y, s.edgels[i].normal.x),
            std::atan2(s.edgels[i - 1].normal.y, s.edgels[i - 1].normal.x));
        if (d < 0.5) ++slow;
    }
    CHECK(slow > 30);
}

TEST_CASE("scene generation is deterministic per seed") {
    SceneConfig cfg;
    cfg.gamma_true = 1e-5;
    cfg.noise_fraction = 0.3;
    cfg.rng_seed = 77;
    const Scene a = generate_scene(cfg);
    const Scene b = generate_scene(cfg);
    REQUIRE(a.edgels.size() == b.edgels.size());
    for (size_t i = 0; i < a.edgels.size(); ++i) {
        CHECK(a.edgels[i].position == b.edgels[i].position);
        CHECK(a.edgels[i].normal == b.edgels[i].normal);
    }
    cfg.rng_seed = 78;
    const Scene c = generate_scene(cfg);
    bool same = a.edgels.size() == c.edgels.size();
    if (same)
        for (size_t i = 0; i < a.edgels.size(); ++i)
            if (!(a.edgels[i].position == c.edgels[i].position)) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("invalid scene configs are rejected") {
    SceneConfig cfg;
    cfg.noise_fraction = 1.0;
    CHECK_THROWS_AS(generate_scene(cfg), std::invalid_argument);
    cfg = SceneConfig{};
    cfg.pts_per_line = 1;
    CHECK_THROWS_AS(generate_scene(cfg), std::invalid_argument);
    cfg = SceneConfig{};
    cfg.n_lines = 0;
    CHECK_THROWS_AS(generate_scene(cfg), std::invalid_argument);
}

TEST_CASE("study smoke run aggregates percentiles and round-trips to CSV") {
    SceneConfig base;
    base.rng_seed = 4;
    OptimConfig oc;
    oc.restarts = 10;
    oc.radial_only = true;
    const TrialReport r =
        run_study({1e-5}, {0.0}, 3, ClutterKind::uncorrelated_points, base, oc, 360);
    REQUIRE(r.rows.size() == 3);
    REQUIRE(r.summary.size() == 1);
    for (const auto& row : r.rows) {
        CHECK(row.ok);
        CHECK(std::isfinite(row.gamma_recovered));
        CHECK(std::isfinite(row.cost));
    }
    const auto& s = r.summary[0];
    CHECK(s.n_ok == 3);
    CHECK(s.p10 <= s.median);
    CHECK(s.median <= s.p90);

    write_trials_csv(r, "/tmp/plumbline_trials.csv");
    write_summary_csv(r, "/tmp/plumbline_summary.csv");
    std::ifstream t("/tmp/plumbline_trials.csv"), m("/tmp/plumbline_summary.csv");
    std::string line;
    REQUIRE(std::getline(t, line));
    CHECK(line == "gamma_true,noise,kind,trial,ok,gamma_recovered,cost");
    int nrows = 0;
    while (std::getline(t, line)) ++nrows;
    CHECK(nrows == 3);
    REQUIRE(std::getline(m, line));
    CHECK(line == "gamma_true,noise,kind,n_ok,p10,median,p90");
    std::remove("/tmp/plumbline_trials.csv");
    std::remove("/tmp/plumbline_summary.csv");
}

TEST_CASE("study results do not depend on the thread count") {
    SceneConfig base;
    base.rng_seed = 4;
    OptimConfig oc;
    oc.restarts = 6;
    oc.radial_only = true;
    oc.threads = 1;
    const TrialReport a =
        run_study({1e-5}, {0.2}, 2, ClutterKind::uncorrelated_points, base, oc, 360);
    oc.threads = 3;
    const TrialReport b =
        run_study({1e-5}, {0.2}, 2, ClutterKind::uncorrelated_points, base, oc, 360);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i)
        CHECK(a.rows[i].gamma_recovered == b.rows[i].gamma_recovered);
}

TEST_CASE("line rendering peaks on the line and is black past the cutoff") {
    const std::vector<LineSpec> lines{{0.0, 60.5}};  // vertical line x = 60.5
    const GrayImage img = render_lines(120, 120, lines, 1.5);
    for (int y = 10; y < 110; y += 10) {
        CHECK(img.at(60, y) == doctest::Approx(std::exp(-0.25 / 4.5)).epsilon(1e-12));
        CHECK(img.at(61, y) == img.at(60, y));
        CHECK(img.at(70, y) == 0.0);
        CHECK(img.at(50, y) == 0.0);
    }
}

TEST_CASE("random line sets respect exclusion and separation") {
    const auto lines = random_lines(300, 300, 6, 50.0, 9);
    REQUIRE(lines.size() == 6);
    const Vec2 center{150.0, 150.0};
    for (size_t i = 0; i < lines.size(); ++i) {
        const Vec2 n{std::cos(lines[i].theta), std::sin(lines[i].theta)};
        const double dist_to_center = std::abs(center.dot(n) - lines[i].offset);
        CHECK(dist_to_center >= 50.0);
        for (size_t j = 0; j < i; ++j) {
            double da = std::abs(lines[i].theta - lines[j].theta);
            da = std::min(da, std::numbers::pi - da);
            CHECK(da >= 0.08);
        }
    }
}
