#pragma once

// Parameters, the bistable reaction term and the closed-form continuum-limit
// formulas for the lattice equation
//
//   du_i/dt = d (k u_{i+1} - (k+1) u_i + u_{i-1}) + g(u_i; a).

#include <functional>
#include <string>

namespace treewave {

/// The triple (a, d, k). Construction validates 0 < a < 1, d > 0, k >= 1.
class ModelParams {
public:
    ModelParams(double a, double d, double k);

    /// Builds the parameters from the grid size instead of the diffusion.
    static ModelParams from_grid_size(double a, double h, double k);

    double a() const noexcept { return a_; }
    double d() const noexcept { return d_; }
    double k() const noexcept { return k_; }
    /// Grid size h(d, k) linked to the diffusion by d h^2 (k+1) = 2.
    double h() const noexcept { return h_; }

    ModelParams with_a(double a) const { return {a, d_, k_}; }
    ModelParams with_d(double d) const { return {a_, d, k_}; }
    ModelParams with_k(double k) const { return {a_, d_, k}; }

private:
    double a_;
    double d_;
    double k_;
    double h_;
};

/// Bistable reaction term g(u; a) and its derivative g_u(u; a).
class Nonlinearity {
public:
    enum class Kind { cubic, user };
    using Fn = std::function<double(double u, double a)>;

    /// g(u; a) = u (1 - u)(u - a).
    static Nonlinearity cubic();
    /// User-supplied pair (g, g_u). Bistability is not checked here, see
    /// `check_bistable`.
    static Nonlinearity custom(Fn g, Fn g_u, std::string name = "user");

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double u, double a) const {
        if (kind_ == Kind::cubic) return u * (1.0 - u) * (u - a);
        return g_(u, a);
    }
    double deriv(double u, double a) const {
        if (kind_ == Kind::cubic) return -3.0 * u * u + 2.0 * (1.0 + a) * u - a;
        return g_u_(u, a);
    }

    /// max |g_u(u; a)| over u in [lo, hi], sampled on 1001 points.
    double lipschitz(double a, double lo = -0.1, double hi = 1.1) const;

private:
    Nonlinearity(Kind kind, Fn g, Fn g_u, std::string name);

    Kind kind_;
    Fn g_;
    Fn g_u_;
    std::string name_;
};

/// Result of sampling the bistability hypothesis on a grid.
struct BistableCheck {
    bool ok = true;
    std::string reason;
};

/// Samples zeros at 0, a, 1, the derivative signs there, and the sign pattern
/// g < 0 on (0, a), g > 0 on (a, 1) on a 1000-point grid.
BistableCheck check_bistable(const Nonlinearity& g, double a, double zero_tol = 1e-12);

struct ContinuumCoeffs {
    double nu;
    double beta;
    double sigma;
};

/// h(d, k) = sqrt(2) / (sqrt(d) sqrt(k+1)).
double grid_size(double d, double k);
/// d(h, k) = 2 / (h^2 (k+1)).
double diffusion_from_grid_size(double h, double k);

/// Coefficients (nu, beta) of the advection-diffusion limit and the speed
/// sigma of its explicit tanh front.
ContinuumCoeffs continuum_coeffs(const ModelParams& p);

/// Lattice speed predicted by the continuum limit, in sites per unit time:
/// sqrt((k+1) d)(a - 1/2) - (k-1) d.
double speed_prediction(double a, double d, double k);

/// Zero set of `speed_prediction` in d: (k+1)/(k-1)^2 (a - 1/2)^2.
/// Throws ParameterError for k <= 1 where the curve diverges.
double critical_diffusion(double a, double k);

/// Speed of the continuum front -sigma phi' = phi'' + g(phi; a).
/// Closed form sqrt(2)(a - 1/2) for the cubic; otherwise solved numerically.
double sigma_star(const Nonlinearity& g, double a);

struct AStarPlus {
    bool member;
    double integral;
};

/// Integral of g(.; a) over [0, 1]; a belongs to A*+ iff it is negative.
AStarPlus in_A_star_plus(const Nonlinearity& g, double a);

/// Explicit front 1/2 [1 + tanh((x - sigma t)/sqrt(8 nu))] of the continuum
/// PDE u_t = nu u_xx + beta u_x + g(u; a) for the cubic.
double tanh_front(double x, double t, double nu, double beta, double a);

} // namespace treewave
