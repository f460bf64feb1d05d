#include "treewave/model.hpp"

#include "treewave/errors.hpp"
#include "treewave/wave_solver.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace treewave {

namespace {

void require_domain(double d, double k) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        std::ostringstream os;
        os << "diffusion d must be positive and finite, got " << d;
        throw ParameterError(os.str());
    }
    if (!(k >= 1.0) || !std::isfinite(k)) {
        std::ostringstream os;
        os << "branching factor k must be >= 1, got " << k;
        throw ParameterError(os.str());
    }
}

} // namespace

ModelParams::ModelParams(double a, double d, double k) : a_(a), d_(d), k_(k) {
    if (!(a > 0.0 && a < 1.0)) {
        std::ostringstream os;
        os << "detuning a must lie in (0, 1), got " << a;
        throw ParameterError(os.str());
    }
    require_domain(d, k);
    h_ = grid_size(d, k);
}

ModelParams ModelParams::from_grid_size(double a, double h, double k) {
    return {a, diffusion_from_grid_size(h, k), k};
}

Nonlinearity::Nonlinearity(Kind kind, Fn g, Fn g_u, std::string name)
    : kind_(kind), g_(std::move(g)), g_u_(std::move(g_u)), name_(std::move(name)) {}

Nonlinearity Nonlinearity::cubic() {
    return Nonlinearity(Kind::cubic, nullptr, nullptr, "cubic");
}

Nonlinearity Nonlinearity::custom(Fn g, Fn g_u, std::string name) {
    if (!g || !g_u) throw ParameterError("custom nonlinearity needs both g and g_u");
    return Nonlinearity(Kind::user, std::move(g), std::move(g_u), std::move(name));
}

double Nonlinearity::lipschitz(double a, double lo, double hi) const {
    constexpr int n = 1000;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = lo + (hi - lo) * i / n;
        best = std::max(best, std::abs(deriv(u, a)));
    }
    return best;
}

BistableCheck check_bistable(const Nonlinearity& g, double a, double zero_tol) {
    auto fail = [](std::string why) { return BistableCheck{false, std::move(why)}; };
    for (double z : {0.0, a, 1.0}) {
        if (std::abs(g(z, a)) > zero_tol) {
            std::ostringstream os;
            os << "g(" << z << ") = " << g(z, a) << " is not a zero";
            return fail(os.str());
        }
    }
    if (!(g.deriv(0.0, a) < 0.0)) return fail("g_u(0) must be negative");
    if (!(g.deriv(1.0, a) < 0.0)) return fail("g_u(1) must be negative");
    if (!(g.deriv(a, a) > 0.0)) return fail("g_u(a) must be positive");

    constexpr int n = 1000;
    for (int i = 1; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        if (u == a) continue;
        const double v = g(u, a);
        if (u < a && !(v < 0.0)) {
            std::ostringstream os;
            os << "g(" << u << ") = " << v << " must be negative on (0, a)";
            return fail(os.str());
        }
        if (u > a && !(v > 0.0)) {
            std::ostringstream os;
            os << "g(" << u << ") = " << v << " must be positive on (a, 1)";
            return fail(os.str());
        }
    }
    return {};
}

double grid_size(double d, double k) {
    require_domain(d, k);
    return std::sqrt(2.0) / (std::sqrt(d) * std::sqrt(k + 1.0));
}

double diffusion_from_grid_size(double h, double k) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("grid size h must be positive");
    require_domain(1.0, k);
    return 2.0 / (h * h * (k + 1.0));
}

ContinuumCoeffs continuum_coeffs(const ModelParams& p) {
    const double h = p.h();
    const double nu = 0.5 * (p.k() + 1.0) * p.d() * h * h;
    const double beta = (p.k() - 1.0) * p.d() * h;
    const double sigma = std::sqrt(2.0 * nu) * (p.a() - 0.5) - beta;
    return {nu, beta, sigma};
}

double speed_prediction(double a, double d, double k) {
    return std::sqrt((k + 1.0) * d) * (a - 0.5) - (k - 1.0) * d;
}

double critical_diffusion(double a, double k) {
    if (!(k > 1.0)) {
        std::ostringstream os;
        os << "critical diffusion diverges for k <= 1 (got k = " << k << ")";
        throw ParameterError(os.str());
    }
    const double km1 = k - 1.0;
    return (k + 1.0) / (km1 * km1) * (a - 0.5) * (a - 0.5);
}

double sigma_star(const Nonlinearity& g, double a) {
    if (g.kind() == Nonlinearity::Kind::cubic) return std::sqrt(2.0) * (a - 0.5);
    return solve_continuum(a, g, SolveConfig{}).c;
}

AStarPlus in_A_star_plus(const Nonlinearity& g, double a) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double s) { return g(s, a); }, 0.0, 1.0, 15, 1e-14, &error);
    if (!std::isfinite(value) || error > 1e-12) {
        std::ostringstream os;
        os << "quadrature of g over [0, 1] failed (estimate " << value << ", error " << error << ")";
        throw QuadratureError(os.str());
    }
    // Values within the quadrature tolerance of zero are the pinned boundary of
    // the set and are not counted as members.
    return {value < -1e-12, value};
}

double tanh_front(double x, double t, double nu, double beta, double a) {
    const double sigma = std::sqrt(2.0 * nu) * (a - 0.5) - beta;
    return 0.5 * (1.0 + std::tanh((x - sigma * t) / std::sqrt(8.0 * nu)));
}

} // namespace treewave
