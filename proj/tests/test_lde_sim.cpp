#include <doctest.h>

#include "treewave/errors.hpp"
#include "treewave/lde_sim.hpp"
#include "treewave/wave_solver.hpp"

#include <cmath>

using namespace treewave;

TEST_CASE("stability bound") {
    const ModelParams p(0.75, 2.0, 3.0);
    const auto g = Nonlinearity::cubic();
    CHECK(stability_bound(p, g) == doctest::Approx(0.5 / (8.0 + g.lipschitz(0.75))));
    const LatticeState s = tanh_initial_state(p, 64);
    CHECK_THROWS_AS(step(s, p, g, 1.0), ParameterError);
    CHECK_THROWS_AS(step(s, p, g, 0.0), ParameterError);
    SimConfig cfg;
    cfg.dt = 1.0;
    CHECK_THROWS_AS(simulate(p, g, cfg), ParameterError);
}

TEST_CASE("rhs of a front state") {
    const ModelParams p(0.6, 1.0, 2.0);
    const auto g = Nonlinearity::cubic();
    LatticeState s;
    s.u = {0.0, 0.0, 1.0, 1.0};
    const auto du = rhs(s, p, g);
    CHECK(du[0] == 0.0);
    CHECK(du[1] == doctest::Approx(2.0));
    CHECK(du[2] == doctest::Approx(-1.0));
    CHECK(du[3] == 0.0);
    const auto refl = rhs(s, p, g, LatticeBoundary::reflecting);
    CHECK(refl == du);
}

TEST_CASE("front position interpolation") {
    LatticeState s;
    s.offset = 10;
    s.u = {0.0, 0.2, 0.6, 1.0};
    CHECK(front_position(s) == doctest::Approx(11.75));
    s.u = {0.0, 0.1, 0.2, 0.3};
    CHECK_THROWS_AS(front_position(s), FrontLostError);
}

TEST_CASE("least-squares fit") {
    std::vector<double> t, x;
    for (int i = 0; i < 20; ++i) {
        t.push_back(i * 0.5);
        x.push_back(3.0 - 0.7 * i * 0.5);
    }
    const SpeedEstimate e = fit_speed(t, x);
    CHECK(e.valid);
    CHECK(e.c_hat == doctest::Approx(-0.7));
    CHECK(e.intercept == doctest::Approx(3.0));
    CHECK(e.r_squared == doctest::Approx(1.0));
    CHECK(e.stderr_c == doctest::Approx(0.0).scale(1.0));
    const SpeedEstimate one = fit_speed({1.0}, {2.0});
    CHECK_FALSE(one.valid);
    CHECK(std::isnan(one.c_hat));
}

TEST_CASE("t_end = 0 gives a single sample and no speed") {
    SimConfig cfg;
    cfg.t_end = 0.0;
    cfg.record_trajectory = true;
    const SimResult r = simulate(ModelParams(0.7, 1.0, 1.0), Nonlinearity::cubic(), cfg);
    CHECK(r.trajectory.size() == 1);
    CHECK_FALSE(r.speed.valid);
    CHECK(std::isnan(r.speed.c_hat));
}

TEST_CASE("symmetric detuning does not move") {
    SimConfig cfg;
    cfg.t_end = 200;
    cfg.window = 128;
    const SpeedEstimate e = estimate_speed(ModelParams(0.5, 1.0, 1.0), Nonlinearity::cubic(), cfg);
    CHECK(std::abs(e.c_hat) < 1e-8);
    CHECK(e.pinned);
}

TEST_CASE("continuum regime: speed approaches the prediction") {
    // For k = 1 and large d the lattice front is close to the PDE front.
    SimConfig cfg;
    cfg.t_end = 100;
    cfg.window = 256;
    const SpeedEstimate e = estimate_speed(ModelParams(0.75, 10.0, 1.0), Nonlinearity::cubic(), cfg);
    CHECK(e.c_hat == doctest::Approx(speed_prediction(0.75, 10.0, 1.0)).epsilon(0.01));
}

TEST_CASE("sign of the speed follows the prediction away from the critical curve") {
    SimConfig cfg;
    cfg.t_end = 200;
    cfg.window = 256;
    const auto g = Nonlinearity::cubic();
    const double dc = critical_diffusion(0.75, 2.0);
    CHECK(estimate_speed(ModelParams(0.75, 4 * dc, 2.0), g, cfg).c_hat < 0.0);
    CHECK(estimate_speed(ModelParams(0.75, 0.5 * dc, 2.0), g, cfg).c_hat > 0.0);
}

TEST_CASE("simulation and travelling wave agree") {
    // Oracle: c/h of the independently computed travelling wave.
    const auto g = Nonlinearity::cubic();
    for (auto [a, d, k] : {std::tuple{0.75, 1.0, 1.5}, std::tuple{0.6, 1.0, 4.0}, std::tuple{0.9, 3.0, 2.0}}) {
        const ModelParams p(a, d, k);
        SimConfig cfg;
        cfg.t_end = 200;
        cfg.window = 256;
        const double c_sim = estimate_speed(p, g, cfg).c_hat;
        const double c_wave = solve_wave(p, g, SolveConfig{}).c_lattice();
        CHECK(c_sim == doctest::Approx(c_wave).epsilon(2e-3));
    }
}

TEST_CASE("translation equivariance") {
    const ModelParams p(0.7, 0.8, 2.0);
    const auto g = Nonlinearity::cubic();
    SimConfig cfg;
    cfg.t_end = 50;
    cfg.window = 128;
    cfg.record_trajectory = true;
    const SimResult r0 = simulate(p, g, cfg, tanh_initial_state(p, 128, 0));
    const SimResult r5 = simulate(p, g, cfg, tanh_initial_state(p, 128, 5));
    REQUIRE(r0.trajectory.size() == r5.trajectory.size());
    for (std::size_t i = 0; i < r0.trajectory.size(); ++i)
        CHECK(r5.trajectory[i].front_position - r0.trajectory[i].front_position == doctest::Approx(5.0));
    CHECK(r0.speed.c_hat == doctest::Approx(r5.speed.c_hat).epsilon(1e-12));
}

TEST_CASE("sample times do not depend on dt") {
    const ModelParams p(0.8, 1.0, 1.0);
    const auto g = Nonlinearity::cubic();
    SimConfig cfg;
    cfg.t_end = 20;
    cfg.window = 128;
    cfg.record_trajectory = true;
    const SimResult coarse = simulate(p, g, cfg);
    cfg.dt = stability_bound(p, g) / 3;
    const SimResult fine = simulate(p, g, cfg);
    REQUIRE(coarse.trajectory.size() == fine.trajectory.size());
    for (std::size_t i = 0; i < fine.trajectory.size(); ++i) {
        CHECK(coarse.trajectory[i].time == fine.trajectory[i].time);
        // RK4: the positions agree to the integration error.
        CHECK(coarse.trajectory[i].front_position == doctest::Approx(fine.trajectory[i].front_position).epsilon(1e-6));
    }
}

TEST_CASE("the window follows the front") {
    const ModelParams p(0.9, 2.0, 1.0);
    const auto g = Nonlinearity::cubic();
    SimConfig cfg;
    cfg.t_end = 200;
    cfg.window = 64;
    cfg.recenter_margin = 16;
    const SimResult r = simulate(p, g, cfg);
    CHECK(r.final_state.offset > 100);
    const double x = front_position(r.final_state);
    CHECK(x > static_cast<double>(r.final_state.offset) + 16);
    CHECK(x < static_cast<double>(r.final_state.offset) + 48);
}

TEST_CASE("a step without recentering keeps the window") {
    const ModelParams p(0.7, 1.0, 1.0);
    const auto g = Nonlinearity::cubic();
    const LatticeState s = tanh_initial_state(p, 64, 3);
    const LatticeState n = step(s, p, g, 0.1);
    CHECK(n.offset == s.offset);
    CHECK(n.time == doctest::Approx(0.1));
    CHECK(n.u.size() == s.u.size());
    CHECK_THROWS_AS(simulate(p, g, SimConfig{}, tanh_initial_state(p, 32)), ParameterError);
}
