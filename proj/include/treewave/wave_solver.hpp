#pragma once

// Newton solver for travelling fronts u_i(t) = phi(i h - c t) of the lattice
// equation. In the rescaled coordinate xi the profile solves
//
//   F(phi, c) = c phi' + lap_h phi + 2(k-1)/(h(k+1)) delta0_h phi + g(phi; a) = 0,
//   phi(-inf) = 0, phi(+inf) = 1,
//
// discretized on xi-nodes with spacing h/m so that the shifts +-h are exact,
// phi' replaced by the centred 3-point difference, and phi(xi_0) = 1/2 fixing
// the translation. The continuum mode solves c phi' + phi'' + g(phi; a) = 0
// with the 3-point second difference.

#include "treewave/errors.hpp"
#include "treewave/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace treewave {

enum class WaveMode { discrete, continuum };

struct SolveConfig {
    /// Half-width of the xi-domain.
    double half_width = 30.0;
    /// Grid steps per shift: h = m * dxi.
    int m = 8;
    double newton_tol = 1e-10;
    int max_iters = 50;
    /// Step halvings tried before a Newton step is declared failed.
    int max_halvings = 10;
    /// Grid spacing of the continuum mode.
    double continuum_dxi = 0.005;
    /// Node pinned to phi = 1/2; the grid is centred on it.
    double phase_point = 0.0;

    void validate() const;
};

struct WaveSolution {
    WaveMode mode = WaveMode::discrete;
    double a = 0.0;
    double d = 0.0;
    double k = 1.0;
    /// Shift of the rescaled equation; 0 in continuum mode.
    double h = 0.0;
    double dxi = 0.0;
    /// xi of node 0.
    double origin = 0.0;
    std::size_t phase_index = 0;
    std::vector<double> phi;
    /// Speed in the rescaled frame (sigma in continuum mode).
    double c = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;

    double xi(std::size_t j) const { return origin + dxi * static_cast<double>(j); }
    /// Lattice sites per unit time, c / h. Continuum solutions have no lattice.
    double c_lattice() const;
    /// c + 2(k-1)/(h(k+1)), the quantity that tends to sigma* as h -> 0.
    double c_compare() const;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, WaveSolution last)
        : Error(what, true), last_(std::move(last)) {}
    const WaveSolution& last_iterate() const noexcept { return last_; }

private:
    WaveSolution last_;
};

/// The discretized travelling-wave system for one parameter set.
class WaveProblem {
public:
    WaveProblem(const ModelParams& p, const Nonlinearity& g, const SolveConfig& cfg);
    /// Continuum problem at detuning a.
    WaveProblem(double a, const Nonlinearity& g, const SolveConfig& cfg);

    WaveMode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t phase_index() const noexcept { return phase_; }
    double dxi() const noexcept { return dxi_; }
    double origin() const noexcept { return origin_; }
    double h() const noexcept { return h_; }
    int m() const noexcept { return m_; }
    double advection() const noexcept { return b_; }
    double xi(std::size_t j) const { return origin_ + dxi_ * static_cast<double>(j); }

    /// F_j for every node, ghosts 0 left and 1 right.
    std::vector<double> residual(const std::vector<double>& phi, double c) const;
    /// Same residual written as (c + b) phi' + M_{h,k} phi + g(phi; a) through
    /// the operators module.
    std::vector<double> residual_M_form(const std::vector<double>& phi, double c) const;
    /// dF/dphi v + dF/dc vc.
    std::vector<double> jacobian_apply(const std::vector<double>& phi, double c, const std::vector<double>& v,
                                       double vc) const;
    /// Discrete L2 norm sqrt(dxi sum F_j^2).
    double norm(const std::vector<double>& f) const;

    /// Newton iteration from (phi, c); phi is overwritten with the result.
    WaveSolution solve(std::vector<double> phi, double c) const;

    /// Samples `guess` (or the tanh front when absent) on this grid.
    std::vector<double> initial_profile(const WaveSolution* guess) const;
    WaveSolution package(std::vector<double> phi, double c, double norm, int iters) const;

private:
    void init_grid(const SolveConfig& cfg);
    double ghost(std::ptrdiff_t j, const std::vector<double>& phi) const {
        if (j < 0) return 0.0;
        if (j >= static_cast<std::ptrdiff_t>(n_)) return 1.0;
        return phi[static_cast<std::size_t>(j)];
    }

    WaveMode mode_;
    double a_;
    double d_;
    double k_;
    double h_;
    int m_;
    double b_;
    double dxi_ = 0.0;
    double origin_ = 0.0;
    std::size_t n_ = 0;
    std::size_t phase_ = 0;
    Nonlinearity g_;
    SolveConfig cfg_;
};

/// Travelling front of the lattice equation. Without a guess, the tanh front
/// and the continuum speed prediction seed Newton. Throws NonConvergenceError
/// (carrying the last iterate) when damping is exhausted.
WaveSolution solve_wave(const ModelParams& p, const Nonlinearity& g, const SolveConfig& cfg,
                        const WaveSolution* initial_guess = nullptr);

/// Front of the limiting ODE -sigma phi' = phi'' + g(phi; a).
WaveSolution solve_continuum(double a, const Nonlinearity& g, const SolveConfig& cfg,
                             const WaveSolution* initial_guess = nullptr);

struct ResidualReport {
    double norm;
    double norm_M_form;
};

ResidualReport residual(const std::vector<double>& phi, double c, const ModelParams& p, const Nonlinearity& g,
                        const SolveConfig& cfg);

enum class ContinuationParameter { a, d, k };

struct ContinuationResult {
    std::vector<double> values;
    std::vector<WaveSolution> path;
    bool complete = true;
    /// Last parameter value reached and the value that failed, when incomplete.
    double frontier = 0.0;
    double failed_at = 0.0;
    std::string reason;
};

/// Natural-parameter continuation from `p0` to `to` in `steps` equal steps.
/// Each converged solution seeds the next; a failed step is bisected down to
/// 2^-10 of the nominal step before the frontier is reported.
ContinuationResult continue_in(ContinuationParameter which, double to, int steps, const ModelParams& p0,
                               const Nonlinearity& g, const SolveConfig& cfg);

} // namespace treewave
