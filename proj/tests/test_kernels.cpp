#include <doctest.h>

#include "treewave/kernels.hpp"

#include <omp.h>

#include <random>

using namespace treewave;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.05, 1.05);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

} // namespace

TEST_CASE("lattice kernel: parallel matches serial") {
    const auto g = Nonlinearity::cubic();
    const kernels::LatticeCoupling c{0.7, 2.5, 0.8, &g};
    for (std::size_t n : {5u, 1000u, 100000u}) {
        const auto u = random_values(n, 3);
        std::vector<double> a(n), b(n);
        kernels::lattice_rhs_serial(u, a, c, {0.0, 1.0});
        omp_set_num_threads(4);
        kernels::lattice_rhs(u, b, c, {0.0, 1.0});
        CHECK(a == b);
    }
}

TEST_CASE("lattice kernel against the formula") {
    const auto g = Nonlinearity::cubic();
    const kernels::LatticeCoupling c{0.5, 3.0, 0.6, &g};
    const std::vector<double> u{0.1, 0.4, 0.9};
    std::vector<double> du(3);
    kernels::lattice_rhs_serial(u, du, c, {0.2, 0.7});
    CHECK(du[0] == doctest::Approx(0.5 * (3 * 0.4 - 4 * 0.1 + 0.2) + g(0.1, 0.6)));
    CHECK(du[1] == doctest::Approx(0.5 * (3 * 0.9 - 4 * 0.4 + 0.1) + g(0.4, 0.6)));
    CHECK(du[2] == doctest::Approx(0.5 * (3 * 0.7 - 4 * 0.9 + 0.4) + g(0.9, 0.6)));
}

TEST_CASE("tree kernel: parallel matches serial") {
    const auto g = Nonlinearity::cubic();
    for (int k : {2, 3}) {
        const KaryTree tree(k, k == 2 ? 16 : 10);
        const auto u = random_values(tree.size(), 5);
        std::vector<double> a(tree.size()), b(tree.size());
        kernels::tree_rhs_serial(tree, u, a, 0.4, 0.7, g);
        omp_set_num_threads(4);
        kernels::tree_rhs(tree, u, b, 0.4, 0.7, g);
        CHECK(a == b);
    }
}

TEST_CASE("tree kernel against neighbour sums") {
    const auto g = Nonlinearity::cubic();
    const KaryTree tree(2, 2);
    const std::vector<double> u{0.5, 0.1, 0.9, 0.2, 0.3, 0.4, 0.6};
    std::vector<double> du(u.size());
    kernels::tree_rhs_serial(tree, u, du, 1.0, 0.3, g);
    CHECK(du[0] == doctest::Approx((0.1 - 0.5) + (0.9 - 0.5) + g(0.5, 0.3)));
    CHECK(du[1] == doctest::Approx((0.5 - 0.1) + (0.2 - 0.1) + (0.3 - 0.1) + g(0.1, 0.3)));
    CHECK(du[6] == doctest::Approx((0.9 - 0.6) + g(0.6, 0.3)));
}

TEST_CASE("vector updates") {
    const auto x = random_values(50000, 9);
    const auto dx = random_values(50000, 10);
    std::vector<double> y(x.size());
    kernels::axpy_into(x, 0.25, dx, y);
    for (std::size_t i = 0; i < x.size(); i += 997) CHECK(y[i] == x[i] + 0.25 * dx[i]);
    std::vector<double> u = x;
    kernels::rk4_combine(u, 0.6, dx, dx, dx, dx);
    for (std::size_t i = 0; i < x.size(); i += 997) CHECK(u[i] == doctest::Approx(x[i] + 0.6 * dx[i]));
}
