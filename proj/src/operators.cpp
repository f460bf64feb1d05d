#include "treewave/operators.hpp"

#include "treewave/errors.hpp"

#include <cmath>
#include <sstream>

namespace treewave {

GridFunction::GridFunction(std::vector<double> values, double spacing, double origin)
    : values_(std::move(values)), spacing_(spacing), origin_(origin) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ParameterError("grid spacing must be positive");
    if (values_.size() < 3) throw ParameterError("grid functions need at least 3 values");
    for (double v : values_) {
        if (!std::isfinite(v)) throw ParameterError("grid function values must be finite");
    }
}

GridFunction GridFunction::sample(const std::function<double(double)>& f, std::size_t n, double spacing,
                                  double origin) {
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) values[j] = f(origin + spacing * static_cast<double>(j));
    return {std::move(values), spacing, origin};
}

bool GridFunction::same_grid(const GridFunction& other) const noexcept {
    return size() == other.size() && spacing_ == other.spacing_ && origin_ == other.origin_;
}

int shift_steps(double h, double spacing) {
    if (!(h > 0.0)) throw ParameterError("shift h must be positive");
    const double ratio = h / spacing;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio) {
        std::ostringstream os;
        os << "shift h = " << h << " is not an integer multiple of the spacing " << spacing;
        throw AlignmentError(os.str());
    }
    return static_cast<int>(m);
}

double advection_coefficient(double h, double k) {
    return 2.0 * (k - 1.0) / (h * (k + 1.0));
}

OperatorStencil make_stencil(StencilKind kind, double h, double k, double spacing) {
    const int m = shift_steps(h, spacing);
    const double inv_h2 = 1.0 / (h * h);
    switch (kind) {
    case StencilKind::delta0:
        return {kind, {-m, m}, {-0.5 / h, 0.5 / h}, 0.0};
    case StencilKind::laplacian:
        return {kind, {-m, 0, m}, {inv_h2, -2.0 * inv_h2, inv_h2}, 0.0};
    case StencilKind::M:
    case StencilKind::M_adjoint: {
        const double sign = kind == StencilKind::M ? 1.0 : -1.0;
        const double b = sign * advection_coefficient(h, k);
        return {kind, {-m, 0, m}, {inv_h2 - 0.5 * b / h, -2.0 * inv_h2, inv_h2 + 0.5 * b / h}, -b};
    }
    }
    throw ParameterError("unknown stencil kind");
}

GridFunction apply_stencil(const OperatorStencil& s, const GridFunction& v, Extension ext,
                           const GridFunction* v_prime) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    const auto vals = v.values();
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < s.offsets.size(); ++i) {
        const std::ptrdiff_t off = s.offsets[i];
        const double w = s.weights[i];
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const std::ptrdiff_t src = j + off;
            const double x = src < 0 ? ext.left : (src >= n ? ext.right : vals[static_cast<std::size_t>(src)]);
            out[static_cast<std::size_t>(j)] += w * x;
        }
    }
    if (s.derivative_weight != 0.0) {
        if (v_prime == nullptr) throw ParameterError("operator needs the derivative of its argument");
        if (!v_prime->same_grid(v)) throw ParameterError("function and derivative live on different grids");
        const auto dv = v_prime->values();
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += s.derivative_weight * dv[j];
    }
    return {std::move(out), v.spacing(), v.origin()};
}

GridFunction apply_delta0(const GridFunction& v, double h, Extension ext) {
    return apply_stencil(make_stencil(StencilKind::delta0, h, 1.0, v.spacing()), v, ext);
}

GridFunction apply_laplacian(const GridFunction& v, double h, Extension ext) {
    return apply_stencil(make_stencil(StencilKind::laplacian, h, 1.0, v.spacing()), v, ext);
}

GridFunction apply_M(const GridFunction& v, const GridFunction& v_prime, double h, double k, Extension ext) {
    if (k == 1.0) {
        // The bracket vanishes identically; keep the result identical to the Laplacian.
        if (!v_prime.same_grid(v)) throw ParameterError("function and derivative live on different grids");
        return apply_laplacian(v, h, ext);
    }
    return apply_stencil(make_stencil(StencilKind::M, h, k, v.spacing()), v, ext, &v_prime);
}

GridFunction apply_M_adjoint(const GridFunction& v, const GridFunction& v_prime, double h, double k,
                             Extension ext) {
    if (k == 1.0) {
        if (!v_prime.same_grid(v)) throw ParameterError("function and derivative live on different grids");
        return apply_laplacian(v, h, ext);
    }
    return apply_stencil(make_stencil(StencilKind::M_adjoint, h, k, v.spacing()), v, ext, &v_prime);
}

GridFunction derivative4(const GridFunction& v, Extension ext) {
    const OperatorStencil s{StencilKind::delta0,
                            {-2, -1, 1, 2},
                            {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0},
                            0.0};
    GridFunction out = apply_stencil(s, v, ext);
    for (double& x : out.mutable_values()) x /= v.spacing();
    return out;
}

std::complex<double> fourier_symbol_M(double omega, double h, double k) {
    const double wh = omega * h;
    const double re = 2.0 * (std::cos(wh) - 1.0);
    const double im = 2.0 * (k - 1.0) / (k + 1.0) * (std::sin(wh) - wh);
    return {re / (h * h), im / (h * h)};
}

double inner(const GridFunction& u, const GridFunction& v) {
    if (!u.same_grid(v)) throw ParameterError("inner product of functions on different grids");
    const auto a = u.values();
    const auto b = v.values();
    const std::size_t n = a.size();
    double sum = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
    for (std::size_t j = 1; j + 1 < n; ++j) sum += a[j] * b[j];
    return sum * u.spacing();
}

double l2_norm(const GridFunction& u) { return std::sqrt(inner(u, u)); }

AnalyticProfile tanh_profile() {
    const double s = 1.0 / std::sqrt(8.0);
    return {
        [s](double x) { return 0.5 * (1.0 + std::tanh(s * x)); },
        [s](double x) {
            const double c = 1.0 / std::cosh(s * x);
            return 0.5 * s * c * c;
        },
        [s](double x) {
            const double c = 1.0 / std::cosh(s * x);
            return -s * s * c * c * std::tanh(s * x);
        },
    };
}

double residual_RB(const AnalyticProfile& profile, double h, double k, int m, double half_width) {
    if (m < 1) throw ParameterError("subgrid factor must be >= 1");
    const double dxi = h / m;
    // Pad by one shift on each side so every stencil reads sampled values.
    const auto inner_half = static_cast<std::size_t>(std::ceil(half_width / dxi));
    const std::size_t pad = static_cast<std::size_t>(m);
    const std::size_t n = 2 * (inner_half + pad) + 1;
    const double origin = -dxi * static_cast<double>(inner_half + pad);

    const auto phi = GridFunction::sample(profile.f, n, dxi, origin);
    const auto dphi = GridFunction::sample(profile.df, n, dxi, origin);
    const auto Mphi = apply_M(phi, dphi, h, k, Extension::front());

    std::vector<double> r(n - 2 * pad);
    for (std::size_t j = 0; j < r.size(); ++j) {
        const std::size_t src = j + pad;
        r[j] = Mphi[src] - profile.d2f(Mphi.x(src));
    }
    return l2_norm(GridFunction(std::move(r), dxi, origin + dxi * static_cast<double>(pad)));
}

} // namespace treewave
