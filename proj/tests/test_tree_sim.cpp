#include <doctest.h>

#include "treewave/errors.hpp"
#include "treewave/kary_tree.hpp"
#include "treewave/lde_sim.hpp"
#include "treewave/tree_sim.hpp"

#include <cmath>

using namespace treewave;

TEST_CASE("tree layout") {
    const KaryTree t(3, 4);
    CHECK(t.layers() == 5);
    CHECK(t.size() == 1 + 3 + 9 + 27 + 81);
    for (int l = 0; l < t.layers(); ++l) CHECK(t.layer_size(l) == static_cast<std::size_t>(std::pow(3, l)));
    for (int l = 0; l + 1 < t.layers(); ++l) {
        for (std::size_t v = t.layer_offset(l); v < t.layer_offset(l) + t.layer_size(l); ++v) {
            CHECK(t.layer_of(v) == l);
            const std::size_t c = t.first_child(v, l);
            for (std::size_t j = 0; j < 3; ++j) CHECK(t.parent(c + j, l + 1) == v);
        }
    }
    CHECK_THROWS_AS(KaryTree(1, 3), ParameterError);
    CHECK_THROWS_AS(KaryTree(2, 40), ParameterError);
}

TEST_CASE("layer-symmetric state") {
    const KaryTree t(2, 3);
    const TreeState s = layer_symmetric_state(t, {0.1, 0.2, 0.3, 0.4});
    CHECK(s.u[0] == 0.1);
    CHECK(s.u[2] == 0.2);
    CHECK(s.u[14] == 0.4);
    CHECK_THROWS_AS(layer_symmetric_state(t, {0.1}), ParameterError);
}

TEST_CASE("layer profile front position") {
    CHECK(layer_front_position({0.0, 0.25, 0.75, 1.0}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(layer_front_position({0.7, 0.8}), FrontLostError);
}

TEST_CASE("layer-symmetric data reduce to the lattice equation") {
    // A truncated tree is the lattice equation with reflecting ends: the root
    // has no parent and the leaves have no children.
    const int depth = 8;
    const KaryTree tree(3, depth);
    const auto g = Nonlinearity::cubic();
    const double a = 0.7, d = 0.6;
    const ModelParams p(a, d, 3.0);

    std::vector<double> layers(depth + 1);
    for (int i = 0; i <= depth; ++i) layers[static_cast<std::size_t>(i)] = 1 / (1 + std::exp(-(i - 4.0)));

    TreeSimConfig cfg;
    cfg.t_end = 5;
    cfg.sample_interval = 0.5;
    const TreeTrajectory tr = simulate_tree(tree, d, g, a, layer_symmetric_state(tree, layers), cfg);
    CHECK(tr.dt == doctest::Approx(0.5 / std::ceil(0.5 / stability_bound(p, g) - 1e-12)));

    LatticeState s{layers, 0, 0.0};
    std::size_t sample = 0;
    for (const auto& ls : tr.samples) {
        while (s.time < ls.time - 1e-12) s = step(s, p, g, std::min(tr.dt, ls.time - s.time), 0, LatticeBoundary::reflecting);
        for (int i = 0; i <= depth; ++i) {
            CHECK(ls.spread[static_cast<std::size_t>(i)] == 0.0);
            CHECK(ls.mean[static_cast<std::size_t>(i)] == doctest::Approx(s.u[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
        ++sample;
    }
    CHECK(sample == 11);
}

TEST_CASE("tree time step validation") {
    const KaryTree tree(2, 3);
    TreeSimConfig cfg;
    cfg.dt = 10.0;
    const auto g = Nonlinearity::cubic();
    CHECK_THROWS_AS(simulate_tree(tree, 1.0, g, 0.6, TreeState{std::vector<double>(tree.size(), 0.5), 0.0}, cfg),
                    ParameterError);
    CHECK_THROWS_AS(simulate_tree(tree, 1.0, g, 0.6, TreeState{{0.5}, 0.0}, TreeSimConfig{}), ParameterError);
}
