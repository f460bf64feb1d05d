#pragma once

// Direct RK4 integration of the lattice equation on a finite window that
// follows the front, and wave-speed estimation from the tracked interface.

#include "treewave/model.hpp"

#include <cstdint>
#include <vector>

namespace treewave {

/// How the values just outside the window are chosen.
enum class LatticeBoundary {
    /// u = 0 left of the window and u = 1 right of it (front limits).
    clamped,
    /// u_{-1} = u_0 and u_N = u_{N-1}: the coupling of a truncated tree, where
    /// the root has no parent and the leaves have no children.
    reflecting,
};

/// Values u_i for i in [offset, offset + u.size()) at a given time.
struct LatticeState {
    std::vector<double> u;
    std::int64_t offset = 0;
    double time = 0.0;
};

struct SimConfig {
    std::size_t window = 512;
    /// Time step; 0 selects the stability bound.
    double dt = 0.0;
    double t_end = 200.0;
    double transient_fraction = 0.5;
    /// |c_hat| below this (sites per unit time) may be classified pinned.
    double pin_tol = 1e-4;
    std::size_t recenter_margin = 64;
    /// Spacing of the recorded front positions.
    double sample_interval = 0.25;
    LatticeBoundary boundary = LatticeBoundary::clamped;
    bool record_trajectory = false;
};

struct SpeedEstimate {
    /// Lattice sites per unit time. NaN when fewer than two samples exist.
    double c_hat = 0.0;
    double stderr_c = 0.0;
    double r_squared = 0.0;
    bool pinned = false;
    bool valid = false;
    std::size_t samples = 0;
    /// Front displacement over the post-transient samples.
    double displacement = 0.0;
    double intercept = 0.0;
};

struct TrajectoryRow {
    double time;
    double front_position;
    double u_min;
    double u_max;
};

struct SimResult {
    SpeedEstimate speed;
    std::vector<TrajectoryRow> trajectory;
    LatticeState final_state;
    double dt = 0.0;
};

/// dt <= 0.5 / (d (k+1) + max |g_u| on [-0.1, 1.1]).
double stability_bound(const ModelParams& p, const Nonlinearity& g);

/// Time derivative of every site of the window.
std::vector<double> rhs(const LatticeState& state, const ModelParams& p, const Nonlinearity& g,
                        LatticeBoundary boundary = LatticeBoundary::clamped);

/// One classical RK4 step. When `recenter_margin` > 0 and the front is within
/// that many sites of an edge, the window is shifted to centre the front.
/// Throws InstabilityError when any |u_i| exceeds 10.
LatticeState step(const LatticeState& state, const ModelParams& p, const Nonlinearity& g, double dt,
                  std::size_t recenter_margin = 0, LatticeBoundary boundary = LatticeBoundary::clamped);

/// Interpolated location of the leftmost upward crossing of 1/2, in sites.
/// Throws FrontLostError when the state does not cross 1/2.
double front_position(const LatticeState& state);

/// Window of `window` sites centred on site `centre`, filled with the tanh
/// front of the continuum limit.
LatticeState tanh_initial_state(const ModelParams& p, std::size_t window, std::int64_t centre = 0);

/// Integrates from `initial` (or the tanh front) to cfg.t_end and fits the
/// front position against time over the post-transient samples.
SimResult simulate(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg);
SimResult simulate(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg, LatticeState initial);

SpeedEstimate estimate_speed(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg);

/// Least-squares line through (t, x); also fills stderr and r^2.
SpeedEstimate fit_speed(const std::vector<double>& t, const std::vector<double>& x);

} // namespace treewave
