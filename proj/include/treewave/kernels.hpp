#pragma once

// Right-hand-side kernels of the lattice and tree dynamics. Each kernel has an
// OpenMP version and a serial reference used by the tests and the benchmark.

#include "treewave/kary_tree.hpp"
#include "treewave/model.hpp"

#include <span>

namespace treewave::kernels {

/// Coupling d (k u_{i+1} - (k+1) u_i + u_{i-1}) + g(u_i; a).
struct LatticeCoupling {
    double d;
    double k;
    double a;
    const Nonlinearity* g;
};

/// Values read for u_{-1} and u_N.
struct Ghosts {
    double left;
    double right;
};

void lattice_rhs_serial(std::span<const double> u, std::span<double> du, const LatticeCoupling& c, Ghosts ghosts);
void lattice_rhs(std::span<const double> u, std::span<double> du, const LatticeCoupling& c, Ghosts ghosts);

/// du_v = d sum_{w ~ v} (u_w - u_v) + g(u_v; a) over parent and children.
void tree_rhs_serial(const KaryTree& tree, std::span<const double> u, std::span<double> du, double d, double a,
                     const Nonlinearity& g);
void tree_rhs(const KaryTree& tree, std::span<const double> u, std::span<double> du, double d, double a,
              const Nonlinearity& g);

/// y = x + alpha * dx.
void axpy_into(std::span<const double> x, double alpha, std::span<const double> dx, std::span<double> y);

/// u += dt/6 (k1 + 2 k2 + 2 k3 + k4).
void rk4_combine(std::span<double> u, double dt, std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4);

} // namespace treewave::kernels
