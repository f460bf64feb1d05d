#pragma once

// Shift-based difference operators on uniform grids:
//
//   delta0_h v = (v(xi+h) - v(xi-h)) / (2h)
//   lap_h v    = (v(xi+h) - 2 v(xi) + v(xi-h)) / h^2
//   M_{h,k} v  = lap_h v + 2(k-1)/(h(k+1)) [delta0_h v - v']
//
// The shift h must be an integer multiple of the grid spacing. Values outside
// the grid are taken from a constant extension (0/0 for compactly supported
// functions, 0/1 for front profiles).

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace treewave {

class GridFunction {
public:
    GridFunction(std::vector<double> values, double spacing, double origin = 0.0);

    /// Samples f at origin + j * spacing, j = 0..n-1.
    static GridFunction sample(const std::function<double(double)>& f, std::size_t n, double spacing,
                               double origin);

    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return spacing_; }
    double origin() const noexcept { return origin_; }
    double x(std::size_t j) const noexcept { return origin_ + spacing_ * static_cast<double>(j); }

    bool same_grid(const GridFunction& other) const noexcept;

private:
    std::vector<double> values_;
    double spacing_;
    double origin_;
};

/// Constant values assumed to the left and right of the grid.
struct Extension {
    double left = 0.0;
    double right = 0.0;

    static constexpr Extension zero() { return {0.0, 0.0}; }
    static constexpr Extension front() { return {0.0, 1.0}; }
};

enum class StencilKind { delta0, laplacian, M, M_adjoint };

/// Shift part of an operator: sum_i weights[i] * v(xi + offsets[i] * spacing).
/// For M and M_adjoint the derivative term is not part of the stencil and is
/// carried separately in `derivative_weight`.
struct OperatorStencil {
    StencilKind kind;
    std::vector<int> offsets;
    std::vector<double> weights;
    double derivative_weight = 0.0;
};

/// Number of grid steps m with h = m * spacing; throws AlignmentError when h is
/// not an integer multiple (relative tolerance 1e-9).
int shift_steps(double h, double spacing);

/// Coefficient 2(k-1)/(h(k+1)) of the advection bracket of M.
double advection_coefficient(double h, double k);

OperatorStencil make_stencil(StencilKind kind, double h, double k, double spacing);

/// Applies the shift stencil, plus `derivative_weight * v_prime` when given.
GridFunction apply_stencil(const OperatorStencil& s, const GridFunction& v, Extension ext,
                           const GridFunction* v_prime = nullptr);

GridFunction apply_delta0(const GridFunction& v, double h, Extension ext = Extension::zero());
GridFunction apply_laplacian(const GridFunction& v, double h, Extension ext = Extension::zero());
GridFunction apply_M(const GridFunction& v, const GridFunction& v_prime, double h, double k,
                     Extension ext = Extension::zero());
GridFunction apply_M_adjoint(const GridFunction& v, const GridFunction& v_prime, double h, double k,
                             Extension ext = Extension::zero());

/// Fourth-order central difference on the grid spacing, one-sided stencils
/// replaced by the constant extension at the ends.
GridFunction derivative4(const GridFunction& v, Extension ext = Extension::zero());

/// h^{-2} [2(cos(omega h) - 1) + 2i(k-1)/(k+1) (sin(omega h) - omega h)].
std::complex<double> fourier_symbol_M(double omega, double h, double k);

/// Trapezoid-rule inner product with weight `spacing`.
double inner(const GridFunction& u, const GridFunction& v);
double l2_norm(const GridFunction& u);

/// Profile with analytic first and second derivatives.
struct AnalyticProfile {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

/// The cubic's continuum front 1/2 [1 + tanh(xi / sqrt 8)] with derivatives.
AnalyticProfile tanh_profile();

/// L2 norm of M_{h,k} phi - phi'' on the grid [-half_width, half_width] with
/// spacing h/m, using the analytic phi' and phi''.
double residual_RB(const AnalyticProfile& profile, double h, double k, int m = 8,
                   double half_width = 30.0);

} // namespace treewave
