#include <doctest.h>

#include "treewave/analysis.hpp"
#include "treewave/errors.hpp"

#include <cmath>
#include <limits>

using namespace treewave;

namespace {

ClassifyConfig quick() {
    ClassifyConfig c;
    c.sim.t_end = 400;
    return c;
}

} // namespace

TEST_CASE("classification of a speed estimate") {
    SpeedEstimate e;
    e.valid = true;
    e.c_hat = 0.2;
    CHECK(classify_speed(e) == Direction::down);
    e.c_hat = -0.2;
    CHECK(classify_speed(e) == Direction::up);
    e.pinned = true;
    CHECK(classify_speed(e) == Direction::pinned);
    e.valid = false;
    CHECK_THROWS_AS(classify_speed(e), Error);
}

TEST_CASE("classify: symmetric point and far from the critical curve") {
    const auto g = Nonlinearity::cubic();
    const RegionPoint s = classify(0.5, 1.0, 1.0, Method::simulation, g, quick());
    CHECK(s.classification == Direction::pinned);
    CHECK(std::abs(s.c_hat) < 1e-8);
    // The MFDE route cannot converge at a = 1/2 and falls back to simulation.
    const RegionPoint m = classify(0.5, 1.0, 1.0, Method::mfde, g, quick());
    CHECK(m.classification == Direction::pinned);
    CHECK(m.method == Method::simulation);

    const double dc = critical_diffusion(0.75, 2.0);
    for (Method method : {Method::simulation, Method::mfde}) {
        const RegionPoint up = classify(0.75, 4 * dc, 2.0, method, g, quick());
        CHECK(up.classification == Direction::up);
        CHECK(up.method == method);
        CHECK(classify(0.75, 0.5 * dc, 2.0, method, g, quick()).classification == Direction::down);
    }
}

TEST_CASE("cross-method agreement away from zero speed") {
    const auto g = Nonlinearity::cubic();
    const ClassifyConfig cfg = quick();
    for (auto [a, d, k] : {std::tuple{0.9, 0.05, 2.0}, std::tuple{0.6, 2.0, 1.5}, std::tuple{0.8, 3.0, 3.0},
                           std::tuple{0.7, 0.3, 4.0}}) {
        const RegionPoint s = classify(a, d, k, Method::simulation, g, cfg);
        const RegionPoint m = classify(a, d, k, Method::mfde, g, cfg);
        if (std::abs(s.c_hat) > 10 * cfg.sim.pin_tol) {
            CHECK(s.classification == m.classification);
            CHECK(m.c_hat == doctest::Approx(s.c_hat).epsilon(0.01));
        }
    }
}

TEST_CASE("scan order does not depend on the number of workers") {
    const auto g = Nonlinearity::cubic();
    ClassifyConfig one = quick(), three = quick();
    one.jobs = 1;
    three.jobs = 3;
    const std::vector<double> as{0.8, 0.6}, ds{1.0, 0.1, 0.4};
    const auto r1 = scan_region(as, ds, 2.0, Method::simulation, g, one);
    const auto r3 = scan_region(as, ds, 2.0, Method::simulation, g, three);
    REQUIRE(r1.size() == 6);
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].a == r3[i].a);
        CHECK(r1[i].d == r3[i].d);
        CHECK(r1[i].c_hat == r3[i].c_hat);
        CHECK(r1[i].classification == r3[i].classification);
    }
    CHECK(r1.front().a == 0.6);
    CHECK(r1.front().d == 0.1);
}

TEST_CASE("direction sequence") {
    std::vector<RegionPoint> pts;
    for (auto [d, c] : {std::pair{0.3, Direction::up}, {0.1, Direction::pinned}, {0.2, Direction::down},
                        {0.25, Direction::down}, {0.01, Direction::pinned}})
        pts.push_back({0.9, d, 2.0, c, 0.0, Method::simulation});
    pts.push_back({0.8, 0.5, 2.0, Direction::up, 0.0, Method::simulation});
    const auto seq = direction_sequence(pts, 0.9);
    CHECK(seq == std::vector{Direction::pinned, Direction::down, Direction::up});
}

TEST_CASE("reversal trace") {
    const auto g = Nonlinearity::cubic();
    const ClassifyConfig cfg = quick();
    const BoundaryCurve c1 = trace_reversal({0.75}, 2.0, 4e-3, g, cfg);
    REQUIRE(c1.points.size() == 1);
    CHECK(c1.kind == BoundaryKind::reversal);
    const double dc = critical_diffusion(0.75, 2.0);
    CHECK(c1.points[0].second == doctest::Approx(dc).epsilon(0.1));
    // Halving the tolerance moves the point by less than the tolerance.
    const BoundaryCurve c2 = trace_reversal({0.75}, 2.0, 2e-3, g, cfg);
    CHECK(std::abs(c2.points[0].second - c1.points[0].second) < 4e-3);

    // d_crit grows like (a - 1/2)^2 and so do the traced points.
    const BoundaryCurve m = trace_reversal({0.8, 0.6, 0.7}, 1.2, 1e-2, g, cfg);
    REQUIRE(m.points.size() == 3);
    CHECK(m.points[0].first == 0.6);
    CHECK(m.points[0].second < m.points[1].second);
    CHECK(m.points[1].second < m.points[2].second);

    CHECK_THROWS_AS(trace_reversal({0.75}, 1.0, 1e-3, g, cfg), ParameterError);
}

TEST_CASE("pinning trace at one detuning") {
    const auto g = Nonlinearity::cubic();
    ClassifyConfig cfg;
    cfg.sim.t_end = 1000;
    const PinningTrace t = trace_pinning({0.95}, 2.0, 1e-4, 2.0, 12, g, cfg);
    CHECK(t.diagnostics.empty());
    const auto seq = direction_sequence(t.points, 0.95);
    CHECK(seq == std::vector{Direction::pinned, Direction::down, Direction::pinned, Direction::up});
    REQUIRE(!t.pin_exit.points.empty());
    // The small-d pinning region ends well below d = 1e-2.
    CHECK(t.pin_exit.points.front().second < 1e-2);
    for (const auto& p : t.points) {
        if (p.classification == Direction::pinned) CHECK(std::abs(p.c_hat) < cfg.sim.pin_tol);
    }

    const PinningTrace none = trace_pinning({0.7}, 2.0, 0.5, 1.0, 3, g, cfg);
    CHECK(none.diagnostics.size() == 1);
    CHECK(none.pin_exit.points.empty());
}

TEST_CASE("log-log slope") {
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
    CHECK(std::isnan(loglog_slope({1}, {1})));
}

TEST_CASE("convergence study") {
    const auto g = Nonlinearity::cubic();
    const ConvergenceStudy s = convergence_study(0.6, 2.0, {0.4, 0.2, 0.1, 0.05}, g);
    CHECK(s.slope >= 0.8);
    CHECK(s.slope <= 1.2);
    for (std::size_t i = 0; i + 1 < s.rows.size(); ++i) CHECK(s.rows[i + 1].err_profile < s.rows[i].err_profile);
    double K = 0;
    for (const auto& r : s.rows) K = std::max(K, r.err_c / r.h);
    CHECK(s.empirical_K == K);

    // k = 1: the comparison quantity is c itself.
    const ConvergenceStudy s1 = convergence_study(0.75, 1.0, {0.4, 0.2}, g);
    for (const auto& r : s1.rows) CHECK(r.c_compare == r.c);

    CHECK_THROWS_AS(convergence_study(0.6, 2.0, {0.1, 0.2}, g), ParameterError);

    // A row that cannot be solved is recorded and the study continues.
    const ConvergenceStudy f = convergence_study(0.95, 2.0, {100.0, 0.1}, g);
    CHECK_FALSE(f.rows[0].ok);
    CHECK_FALSE(f.rows[0].message.empty());
    CHECK(f.rows[1].ok);
}

TEST_CASE("convergence study with a user nonlinearity") {
    // The reference profile comes from the continuum solver.
    const auto user = Nonlinearity::custom([](double u, double a) { return u * (1 - u) * (u - a); },
                                           [](double u, double a) { return -3 * u * u + 2 * (1 + a) * u - a; });
    const ConvergenceStudy s = convergence_study(0.75, 2.0, {0.2, 0.1}, user);
    const ConvergenceStudy c = convergence_study(0.75, 2.0, {0.2, 0.1}, Nonlinearity::cubic());
    CHECK(s.sigma_star == doctest::Approx(c.sigma_star).epsilon(1e-6));
    CHECK(s.rows[1].err_c == doctest::Approx(c.rows[1].err_c).epsilon(1e-3));
    CHECK(s.rows[1].err_profile == doctest::Approx(c.rows[1].err_profile).epsilon(1e-2));
}

TEST_CASE("corollary: roots solve the quadratic") {
    for (double k : {1.05, 1.5, 3.0}) {
        for (double a : {0.6, 0.75, 0.9}) {
            const double K = 0.003;
            const CorollaryReport r = corollary_report(a, k, K);
            CHECK(r.nu_minus[0] < 0);
            for (int i = 0; i < 2; ++i) {
                const double theta = i == 0 ? -1.0 : 1.0;
                for (double nu : {r.nu_minus[i], r.nu_plus[i]}) {
                    // For theta = -1 the smaller root is negative and has no d.
                    if (std::isnan(nu) || nu <= 0) continue;
                    const double lhs = rescaled_speed_prediction(nu * nu, a, k);
                    const double rhs = theta * K * grid_size(nu * nu, k);
                    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
                }
            }
        }
    }
}

TEST_CASE("corollary: limits and edge cases") {
    // k -> 1: gamma -> 0, E -> 0, nu_- -> 0, nu_+^2 -> d_crit.
    const CorollaryReport lim = corollary_report(0.75, 1 + 1e-14, 0.01);
    CHECK(lim.gamma < 1e-6);
    CHECK(lim.E[1] < 1e-6);
    CHECK(lim.nu_minus[1] < 1e-6 * std::sqrt(lim.d_crit));
    CHECK(lim.nu_plus_sq(+1) == doctest::Approx(lim.d_crit).epsilon(1e-6));

    // gamma d_crit^{-1/4} = 1: E(+1) = 1 and D+ collapses.
    const double a = 0.75, k = 2.0;
    const double K_edge = (k + 1) * std::pow(a - 0.5, 2) / (4 * (k - 1));
    const CorollaryReport edge = corollary_report(a, k, K_edge);
    CHECK(edge.real_valued);
    CHECK(edge.E[1] == doctest::Approx(1.0));
    CHECK(edge.nu_minus[1] == doctest::Approx(edge.nu_plus[1]));
    CHECK(edge.nu_minus[1] == doctest::Approx(0.5 * std::sqrt(edge.d_crit)));

    // Beyond it the roots are complex: flagged, report still emitted.
    const CorollaryReport cx = corollary_report(a, k, 2 * K_edge);
    CHECK_FALSE(cx.real_valued);
    CHECK(std::isnan(cx.E[1]));
    CHECK_FALSE(cx.reason.empty());
    CHECK(std::isfinite(cx.E[0]));

    const CorollaryReport bad = corollary_report(0.75, 1.0, 0.01);
    CHECK_FALSE(bad.preconditions());
    CHECK(bad.reason.find("k must exceed 1") != std::string::npos);
}

TEST_CASE("corollary: algebraic bound chain when the preconditions hold") {
    int held = 0;
    for (double k : {1.01, 1.05, 1.1, 1.2}) {
        for (double a : {0.6, 0.7, 0.8, 0.95}) {
            for (double K : {1e-4, 1e-3, 1e-2}) {
                const CorollaryReport r = corollary_report(a, k, K, 0.4);
                if (!r.preconditions()) continue;
                ++held;
                CHECK(r.check_upper);
                CHECK(r.check_lower_minus);
                CHECK(r.check_lower_plus);
                // D+ is empty when nu_diamond^2 exceeds its upper end.
                CHECK(r.nu_minus_sq(+1) < r.D_plus.hi);
                CHECK(r.D_plus.lo == std::max(r.nu_diamond * r.nu_diamond, r.nu_minus_sq(+1)));
                CHECK(r.D_minus.hi == std::numeric_limits<double>::infinity());
                CHECK(r.nu_diamond == doctest::Approx(std::sqrt(2.0) / (0.4 * std::sqrt(k + 1))));
            }
        }
    }
    CHECK(held > 10);
}

TEST_CASE("probe points") {
    const auto p = probe_points({1.0, 16.0}, 3);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == doctest::Approx(2.0));
    CHECK(p[1] == doctest::Approx(4.0));
    CHECK(p[2] == doctest::Approx(8.0));
    CHECK_THROWS_AS(probe_points({1.0, std::numeric_limits<double>::infinity()}, 3), ParameterError);
}
