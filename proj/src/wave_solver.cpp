#include "treewave/wave_solver.hpp"

#include "treewave/operators.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace treewave {

namespace {

/// LU factorization of a square banded matrix in LAPACK band storage.
class BandedLU {
public:
    BandedLU(std::size_t n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ldab_) * n, 0.0), ipiv_(n) {}

    void add(std::size_t row, std::size_t col, double value) {
        ab_[static_cast<std::size_t>(kl_ + ku_) + row - col + col * static_cast<std::size_t>(ldab_)] += value;
    }

    /// Returns false when the matrix is exactly singular.
    bool factor() {
        const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
                                               kl_, ku_, ab_.data(), ldab_, ipiv_.data());
        return info == 0;
    }

    /// Solves in place for `nrhs` column-major right-hand sides.
    void solve(std::vector<double>& rhs, int nrhs) const {
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(n_), kl_, ku_, nrhs, ab_.data(), ldab_,
                       ipiv_.data(), rhs.data(), static_cast<lapack_int>(n_));
    }

private:
    std::size_t n_;
    int kl_;
    int ku_;
    int ldab_;
    std::vector<double> ab_;
    std::vector<lapack_int> ipiv_;
};

double seed_speed(const ModelParams& p, const Nonlinearity& g) {
    return sigma_star(g, p.a()) - advection_coefficient(p.h(), p.k());
}

} // namespace

void SolveConfig::validate() const {
    if (!(half_width >= 20.0)) throw ParameterError("solver half-width must be >= 20");
    if (m < 4) throw ParameterError("subgrid factor m must be >= 4");
    if (!(newton_tol > 0.0 && newton_tol <= 1e-10)) throw ParameterError("Newton tolerance must lie in (0, 1e-10]");
    if (max_iters < 1) throw ParameterError("max_iters must be positive");
    if (max_halvings < 0) throw ParameterError("max_halvings must be non-negative");
    if (!(continuum_dxi > 0.0)) throw ParameterError("continuum grid spacing must be positive");
}

double WaveSolution::c_lattice() const {
    if (mode == WaveMode::continuum) return std::numeric_limits<double>::quiet_NaN();
    return c / h;
}

double WaveSolution::c_compare() const {
    if (mode == WaveMode::continuum) return c;
    return c + advection_coefficient(h, k);
}

WaveProblem::WaveProblem(const ModelParams& p, const Nonlinearity& g, const SolveConfig& cfg)
    : mode_(WaveMode::discrete), a_(p.a()), d_(p.d()), k_(p.k()), h_(p.h()), m_(cfg.m),
      b_(advection_coefficient(p.h(), p.k())), g_(g), cfg_(cfg) {
    cfg.validate();
    dxi_ = h_ / m_;
    init_grid(cfg);
}

WaveProblem::WaveProblem(double a, const Nonlinearity& g, const SolveConfig& cfg)
    : mode_(WaveMode::continuum), a_(a), d_(0.0), k_(1.0), h_(cfg.continuum_dxi), m_(1), b_(0.0), g_(g),
      cfg_(cfg) {
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("detuning a must lie in (0, 1)");
    cfg.validate();
    dxi_ = cfg.continuum_dxi;
    init_grid(cfg);
}

void WaveProblem::init_grid(const SolveConfig& cfg) {
    const auto half = static_cast<std::size_t>(std::ceil(cfg.half_width / dxi_ - 1e-9));
    n_ = 2 * half + 1;
    phase_ = half;
    origin_ = cfg.phase_point - dxi_ * static_cast<double>(half);
}

std::vector<double> WaveProblem::residual(const std::vector<double>& phi, double c) const {
    std::vector<double> f(n_);
    const auto m = static_cast<std::ptrdiff_t>(m_);
    const double inv_h2 = 1.0 / (h_ * h_);
    const double adv = 0.5 * b_ / h_;
    const double drift = 0.5 * c / dxi_;
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n_); ++j) {
        const double p0 = phi[static_cast<std::size_t>(j)];
        const double pp = ghost(j + m, phi);
        const double pm = ghost(j - m, phi);
        const double lap = ((pp - p0) + (pm - p0)) * inv_h2;
        const double d0 = (pp - pm) * adv;
        const double dphi = (ghost(j + 1, phi) - ghost(j - 1, phi)) * drift;
        f[static_cast<std::size_t>(j)] = dphi + lap + d0 + g_(p0, a_);
    }
    return f;
}

std::vector<double> WaveProblem::residual_M_form(const std::vector<double>& phi, double c) const {
    std::vector<double> dphi(n_);
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n_); ++j) {
        dphi[static_cast<std::size_t>(j)] = (ghost(j + 1, phi) - ghost(j - 1, phi)) / (2.0 * dxi_);
    }
    const GridFunction v(phi, dxi_, origin_);
    const GridFunction vp(dphi, dxi_, origin_);
    const double k = mode_ == WaveMode::continuum ? 1.0 : k_;
    const GridFunction mv = apply_M(v, vp, h_, k, Extension::front());
    std::vector<double> f(n_);
    for (std::size_t j = 0; j < n_; ++j) f[j] = (c + b_) * dphi[j] + mv[j] + g_(phi[j], a_);
    return f;
}

std::vector<double> WaveProblem::jacobian_apply(const std::vector<double>& phi, double c,
                                                const std::vector<double>& v, double vc) const {
    std::vector<double> out(n_);
    const auto m = static_cast<std::ptrdiff_t>(m_);
    const auto n = static_cast<std::ptrdiff_t>(n_);
    const double inv_h2 = 1.0 / (h_ * h_);
    const double adv = 0.5 * b_ / h_;
    auto at = [&](std::ptrdiff_t j) { return j < 0 || j >= n ? 0.0 : v[static_cast<std::size_t>(j)]; };
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double vp = at(j + m);
        const double vm = at(j - m);
        double r = (vp - 2.0 * v[jj] + vm) * inv_h2 + (vp - vm) * adv;
        r += 0.5 * c / dxi_ * (at(j + 1) - at(j - 1));
        r += g_.deriv(phi[jj], a_) * v[jj];
        r += vc * 0.5 / dxi_ * (ghost(j + 1, phi) - ghost(j - 1, phi));
        out[jj] = r;
    }
    return out;
}

double WaveProblem::norm(const std::vector<double>& f) const {
    double s = 0.0;
    for (double x : f) s += x * x;
    return std::sqrt(s * dxi_);
}

std::vector<double> WaveProblem::initial_profile(const WaveSolution* guess) const {
    std::vector<double> phi(n_);
    if (guess == nullptr || guess->phi.empty()) {
        const AnalyticProfile front = tanh_profile();
        for (std::size_t j = 0; j < n_; ++j) phi[j] = front.f(xi(j) - cfg_.phase_point);
    } else {
        // Linear interpolation, limits 0/1 outside the guess's grid.
        const double last = guess->xi(guess->phi.size() - 1);
        for (std::size_t j = 0; j < n_; ++j) {
            const double x = xi(j);
            if (x <= guess->origin) {
                phi[j] = x == guess->origin ? guess->phi.front() : 0.0;
            } else if (x >= last) {
                phi[j] = x == last ? guess->phi.back() : 1.0;
            } else {
                const double s = (x - guess->origin) / guess->dxi;
                const auto i = std::min(static_cast<std::size_t>(s), guess->phi.size() - 2);
                const double w = s - static_cast<double>(i);
                phi[j] = (1.0 - w) * guess->phi[i] + w * guess->phi[i + 1];
            }
        }
    }
    phi[phase_] = 0.5;
    return phi;
}

WaveSolution WaveProblem::package(std::vector<double> phi, double c, double norm, int iters) const {
    WaveSolution s;
    s.mode = mode_;
    s.a = a_;
    s.d = d_;
    s.k = k_;
    s.h = mode_ == WaveMode::continuum ? 0.0 : h_;
    s.dxi = dxi_;
    s.origin = origin_;
    s.phase_index = phase_;
    s.phi = std::move(phi);
    s.c = c;
    s.residual_norm = norm;
    s.newton_iters = iters;
    return s;
}

WaveSolution WaveProblem::solve(std::vector<double> phi, double c) const {
    phi[phase_] = 0.5;
    std::vector<double> f = residual(phi, c);
    double nrm = norm(f);
    const int band = std::max(m_, 1);

    for (int iter = 0;; ++iter) {
        if (!std::isfinite(nrm)) {
            throw NonConvergenceError("Newton iterate became non-finite", package(phi, c, nrm, iter));
        }
        if (nrm <= cfg_.newton_tol) return package(std::move(phi), c, nrm, iter);
        if (iter == cfg_.max_iters) {
            std::ostringstream os;
            os << "Newton did not reach tolerance " << cfg_.newton_tol << " in " << iter << " iterations (residual "
               << nrm << ")";
            throw NonConvergenceError(os.str(), package(std::move(phi), c, nrm, iter));
        }

        BandedLU lu(n_, band, band);
        const auto m = static_cast<std::ptrdiff_t>(m_);
        const auto n = static_cast<std::ptrdiff_t>(n_);
        const double inv_h2 = 1.0 / (h_ * h_);
        const double adv = 0.5 * b_ / h_;
        const double drift = 0.5 * c / dxi_;
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const auto row = static_cast<std::size_t>(j);
            lu.add(row, row, -2.0 * inv_h2 + g_.deriv(phi[row], a_));
            if (j + m < n) lu.add(row, row + static_cast<std::size_t>(m), inv_h2 + adv);
            if (j - m >= 0) lu.add(row, row - static_cast<std::size_t>(m), inv_h2 - adv);
            if (j + 1 < n) lu.add(row, row + 1, drift);
            if (j - 1 >= 0) lu.add(row, row - 1, -drift);
        }
        if (!lu.factor()) throw NonConvergenceError("singular Jacobian", package(phi, c, nrm, iter));

        // Bordered solve: columns [-F, dF/dc], then eliminate through the
        // phase row phi[phase] = 1/2, which the iterate already satisfies.
        std::vector<double> dfdc(n_);
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            dfdc[static_cast<std::size_t>(j)] = 0.5 / dxi_ * (ghost(j + 1, phi) - ghost(j - 1, phi));
        }
        std::vector<double> rhs(2 * n_);
        for (std::size_t j = 0; j < n_; ++j) {
            rhs[j] = -f[j];
            rhs[n_ + j] = dfdc[j];
        }
        lu.solve(rhs, 2);
        const double pivot = rhs[n_ + phase_];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw NonConvergenceError("degenerate bordered system", package(phi, c, nrm, iter));
        }
        double dc = rhs[phase_] / pivot;
        std::vector<double> dphi(n_);
        for (std::size_t j = 0; j < n_; ++j) dphi[j] = rhs[j] - dc * rhs[n_ + j];
        dphi[phase_] = 0.0;

        // One step of iterative refinement on the full bordered system.
        {
            const std::vector<double> jd = jacobian_apply(phi, c, dphi, dc);
            std::vector<double> r(n_);
            for (std::size_t j = 0; j < n_; ++j) r[j] = -f[j] - jd[j];
            lu.solve(r, 1);
            const double ddc = r[phase_] / pivot;
            for (std::size_t j = 0; j < n_; ++j) dphi[j] += r[j] - ddc * rhs[n_ + j];
            dphi[phase_] = 0.0;
            dc += ddc;
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= cfg_.max_halvings; ++halving, lambda *= 0.5) {
            std::vector<double> trial(n_);
            for (std::size_t j = 0; j < n_; ++j) trial[j] = phi[j] + lambda * dphi[j];
            const double trial_c = c + lambda * dc;
            std::vector<double> trial_f = residual(trial, trial_c);
            const double trial_norm = norm(trial_f);
            if (trial_norm < nrm) {
                phi = std::move(trial);
                c = trial_c;
                f = std::move(trial_f);
                nrm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "Newton step failed to reduce the residual after " << cfg_.max_halvings << " halvings (residual "
               << nrm << ")";
            throw NonConvergenceError(os.str(), package(std::move(phi), c, nrm, iter + 1));
        }
    }
}

WaveSolution solve_wave(const ModelParams& p, const Nonlinearity& g, const SolveConfig& cfg,
                        const WaveSolution* initial_guess) {
    const WaveProblem problem(p, g, cfg);
    const bool usable = initial_guess != nullptr && !initial_guess->phi.empty();
    const double c0 = usable && initial_guess->mode == WaveMode::discrete ? initial_guess->c : seed_speed(p, g);
    return problem.solve(problem.initial_profile(usable ? initial_guess : nullptr), c0);
}

WaveSolution solve_continuum(double a, const Nonlinearity& g, const SolveConfig& cfg,
                             const WaveSolution* initial_guess) {
    const WaveProblem problem(a, g, cfg);
    const bool usable = initial_guess != nullptr && !initial_guess->phi.empty();
    double c0 = 0.0;
    if (usable) c0 = initial_guess->c_compare();
    else if (g.kind() == Nonlinearity::Kind::cubic) c0 = std::sqrt(2.0) * (a - 0.5);
    return problem.solve(problem.initial_profile(usable ? initial_guess : nullptr), c0);
}

ResidualReport residual(const std::vector<double>& phi, double c, const ModelParams& p, const Nonlinearity& g,
                        const SolveConfig& cfg) {
    const WaveProblem problem(p, g, cfg);
    if (phi.size() != problem.size()) {
        std::ostringstream os;
        os << "profile has " << phi.size() << " values, the grid has " << problem.size();
        throw AlignmentError(os.str());
    }
    return {problem.norm(problem.residual(phi, c)), problem.norm(problem.residual_M_form(phi, c))};
}

ContinuationResult continue_in(ContinuationParameter which, double to, int steps, const ModelParams& p0,
                               const Nonlinearity& g, const SolveConfig& cfg) {
    if (steps < 1) throw ParameterError("continuation needs at least one step");
    auto value_of = [&](const ModelParams& p) {
        switch (which) {
        case ContinuationParameter::a: return p.a();
        case ContinuationParameter::d: return p.d();
        case ContinuationParameter::k: return p.k();
        }
        return 0.0;
    };
    auto at = [&](double v) {
        switch (which) {
        case ContinuationParameter::a: return p0.with_a(v);
        case ContinuationParameter::d: return p0.with_d(v);
        case ContinuationParameter::k: return p0.with_k(v);
        }
        return p0;
    };

    ContinuationResult out;
    const double from = value_of(p0);
    WaveSolution current = solve_wave(p0, g, cfg);
    out.values.push_back(from);
    out.path.push_back(current);

    const double nominal = (to - from) / steps;
    const double min_step = std::abs(nominal) / 1024.0;
    double reached = from;
    for (int i = 1; i <= steps; ++i) {
        const double target = from + nominal * i;
        while (reached != target) {
            double trial = target;
            std::optional<WaveSolution> next;
            for (;;) {
                try {
                    next = solve_wave(at(trial), g, cfg, &current);
                    break;
                } catch (const Error& e) {
                    const double half = 0.5 * (trial - reached);
                    if (std::abs(half) < min_step) {
                        out.complete = false;
                        out.frontier = reached;
                        out.failed_at = trial;
                        out.reason = e.what();
                        return out;
                    }
                    trial = reached + half;
                }
            }
            current = std::move(*next);
            reached = trial;
            if (reached == target) {
                out.values.push_back(target);
                out.path.push_back(current);
            }
        }
    }
    // Degenerate ranges still produce one solution per step.
    if (nominal == 0.0) {
        for (int i = 1; i <= steps; ++i) {
            out.values.push_back(from);
            out.path.push_back(solve_wave(p0, g, cfg, &current));
        }
    }
    return out;
}

} // namespace treewave
