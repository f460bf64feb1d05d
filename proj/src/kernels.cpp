#include "treewave/kernels.hpp"

#include <cstddef>

namespace treewave::kernels {

namespace {

// Below this size thread start-up costs more than the loop.
constexpr std::ptrdiff_t parallel_threshold = 1 << 14;

inline double lattice_site(double left, double centre, double right, const LatticeCoupling& c) {
    return c.d * (c.k * right - (c.k + 1.0) * centre + left) + (*c.g)(centre, c.a);
}

inline double tree_node(const KaryTree& tree, std::span<const double> u, std::size_t v, int layer, double d,
                        double a, const Nonlinearity& g) {
    const double uv = u[v];
    double flux = 0.0;
    if (layer > 0) flux += u[tree.parent(v, layer)] - uv;
    if (layer < tree.depth()) {
        const std::size_t first = tree.first_child(v, layer);
        for (std::size_t j = 0; j < static_cast<std::size_t>(tree.k()); ++j) flux += u[first + j] - uv;
    }
    return d * flux + g(uv, a);
}

} // namespace

void lattice_rhs_serial(std::span<const double> u, std::span<double> du, const LatticeCoupling& c, Ghosts ghosts) {
    const std::size_t n = u.size();
    if (n == 0) return;
    if (n == 1) {
        du[0] = lattice_site(ghosts.left, u[0], ghosts.right, c);
        return;
    }
    du[0] = lattice_site(ghosts.left, u[0], u[1], c);
    for (std::size_t i = 1; i + 1 < n; ++i) du[i] = lattice_site(u[i - 1], u[i], u[i + 1], c);
    du[n - 1] = lattice_site(u[n - 2], u[n - 1], ghosts.right, c);
}

void lattice_rhs(std::span<const double> u, std::span<double> du, const LatticeCoupling& c, Ghosts ghosts) {
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    if (n < 2) {
        lattice_rhs_serial(u, du, c, ghosts);
        return;
    }
#pragma omp parallel for schedule(static) if (n > parallel_threshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double left = i == 0 ? ghosts.left : u[static_cast<std::size_t>(i - 1)];
        const double right = i == n - 1 ? ghosts.right : u[static_cast<std::size_t>(i + 1)];
        du[static_cast<std::size_t>(i)] = lattice_site(left, u[static_cast<std::size_t>(i)], right, c);
    }
}

void tree_rhs_serial(const KaryTree& tree, std::span<const double> u, std::span<double> du, double d, double a,
                     const Nonlinearity& g) {
    for (int layer = 0; layer < tree.layers(); ++layer) {
        const std::size_t begin = tree.layer_offset(layer);
        const std::size_t end = begin + tree.layer_size(layer);
        for (std::size_t v = begin; v < end; ++v) du[v] = tree_node(tree, u, v, layer, d, a, g);
    }
}

void tree_rhs(const KaryTree& tree, std::span<const double> u, std::span<double> du, double d, double a,
              const Nonlinearity& g) {
    for (int layer = 0; layer < tree.layers(); ++layer) {
        const auto begin = static_cast<std::ptrdiff_t>(tree.layer_offset(layer));
        const auto end = begin + static_cast<std::ptrdiff_t>(tree.layer_size(layer));
#pragma omp parallel for schedule(static) if (end - begin > parallel_threshold)
        for (std::ptrdiff_t v = begin; v < end; ++v) {
            du[static_cast<std::size_t>(v)] = tree_node(tree, u, static_cast<std::size_t>(v), layer, d, a, g);
        }
    }
}

void axpy_into(std::span<const double> x, double alpha, std::span<const double> dx, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > parallel_threshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        y[j] = x[j] + alpha * dx[j];
    }
}

void rk4_combine(std::span<double> u, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4) {
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    const double w = dt / 6.0;
#pragma omp parallel for schedule(static) if (n > parallel_threshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        u[j] += w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

} // namespace treewave::kernels
