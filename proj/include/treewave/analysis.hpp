#pragma once

// Parameter-plane studies: classification of (a, d, k) by propagation
// direction, tracing of the reversal and pinning boundaries, the h -> 0
// convergence study of the wave speed, and the explicit bounds on the
// reversal region for the cubic.

#include "treewave/lde_sim.hpp"
#include "treewave/model.hpp"
#include "treewave/wave_solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace treewave {

enum class Direction { down, up, pinned };
enum class Method { simulation, mfde };

const char* to_string(Direction d);
const char* to_string(Method m);

struct RegionPoint {
    double a;
    double d;
    double k;
    Direction classification;
    /// Lattice sites per unit time.
    double c_hat;
    /// Backend that produced the classification.
    Method method;
};

struct ClassifyConfig {
    SimConfig sim = default_sim();
    SolveConfig solve = default_solve();
    /// Worker threads for sweeps; 0 uses the OpenMP default.
    int jobs = 0;

    static SimConfig default_sim() {
        SimConfig s;
        s.t_end = 2000.0;
        s.window = 256;
        s.recenter_margin = 32;
        s.sample_interval = 1.0;
        return s;
    }
    /// Finer sub-grid than the solver default: at small d the front is sharp
    /// on the scale of h and m = 8 biases c by up to 20%.
    static SolveConfig default_solve() {
        SolveConfig s;
        s.m = 32;
        return s;
    }
};

Direction classify_speed(const SpeedEstimate& e);

/// Simulation: sign of the fitted speed, pinned by the double criterion of the
/// estimator. MFDE: sign of c/h; Newton failure or |c/h| < pin_tol falls back
/// to simulation.
RegionPoint classify(double a, double d, double k, Method method, const Nonlinearity& g,
                     const ClassifyConfig& cfg = {});

/// Classifies every (a, d) of the product grid; output ordered by (a, d).
std::vector<RegionPoint> scan_region(const std::vector<double>& a_values, const std::vector<double>& d_values,
                                     double k, Method method, const Nonlinearity& g, const ClassifyConfig& cfg = {});

enum class BoundaryKind { pin_onset_lower, pin_exit, reversal };
const char* to_string(BoundaryKind k);

struct BoundaryCurve {
    double k = 0.0;
    BoundaryKind kind = BoundaryKind::reversal;
    /// (a, d_boundary), sorted by a.
    std::vector<std::pair<double, double>> points;
};

/// For each a, bisects in d on the sign of the simulated speed down to width
/// tol_d, starting from [d_crit/2, 4 d_crit] and widening geometrically when
/// that does not bracket a sign change. Requires k > 1.
BoundaryCurve trace_reversal(const std::vector<double>& a_values, double k, double tol_d, const Nonlinearity& g,
                             const ClassifyConfig& cfg = {});

struct PinningTrace {
    /// Scan and refinement points, ordered by (a, d).
    std::vector<RegionPoint> points;
    BoundaryCurve pin_onset_lower;
    BoundaryCurve pin_exit;
    std::vector<std::string> diagnostics;
};

/// Scans `resolution` log-spaced d in [d_lo, d_hi] for every a. Adjacent
/// down/up points are bisected until a pinned point separates them; every
/// pinned/moving edge is then bisected to relative width `rel_tol`.
PinningTrace trace_pinning(const std::vector<double>& a_values, double k, double d_lo, double d_hi, int resolution,
                           const Nonlinearity& g, const ClassifyConfig& cfg = {}, double rel_tol = 1e-3);

/// Collapses runs of equal classifications at one a into the ordered sequence.
std::vector<Direction> direction_sequence(const std::vector<RegionPoint>& points, double a);

struct ConvergenceRow {
    double h;
    double c = 0.0;
    /// c + 2(k-1)/(h(k+1)).
    double c_compare = 0.0;
    double err_c = 0.0;
    /// H1 distance between the discrete and continuum profiles.
    double err_profile = 0.0;
    bool ok = false;
    std::string message;
};

struct ConvergenceStudy {
    double a = 0.0;
    double k = 1.0;
    double sigma_star = 0.0;
    std::vector<ConvergenceRow> rows;
    /// Least-squares slope of log err_c against log h.
    double slope = 0.0;
    /// max err_c / h over successful rows.
    double empirical_K = 0.0;
};

ConvergenceStudy convergence_study(double a, double k, const std::vector<double>& h_list, const Nonlinearity& g,
                                   const SolveConfig& cfg = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
    double lo;
    double hi;
};

struct CorollaryReport {
    double a = 0.0;
    double k = 0.0;
    double K_used = 0.0;
    std::optional<double> h_diamond;
    double d_crit = 0.0;
    double gamma = 0.0;
    /// Index 0 is theta = -1, index 1 is theta = +1.
    double E[2] = {0.0, 0.0};
    double nu_minus[2] = {0.0, 0.0};
    double nu_plus[2] = {0.0, 0.0};
    double nu_diamond = 0.0;
    /// d with c < 0 guaranteed, and d with c > 0 guaranteed.
    Interval D_minus{0.0, 0.0};
    Interval D_plus{0.0, 0.0};
    /// d_crit >= 1 and gamma <= 1.
    bool d_crit_ge_1 = false;
    bool gamma_le_1 = false;
    bool real_valued = false;
    /// nu_+(-1)^2 <= d(1 + d^{-1/4}), nu_-(+1)^2 <= d/4, nu_+(+1)^2 >= d(1 - d^{-1/4}).
    bool check_upper = false;
    bool check_lower_minus = false;
    bool check_lower_plus = false;
    std::string reason;

    bool preconditions() const { return d_crit_ge_1 && gamma_le_1 && real_valued; }
    double nu_minus_sq(int theta) const { return sq(nu_minus[theta > 0 ? 1 : 0]); }
    double nu_plus_sq(int theta) const { return sq(nu_plus[theta > 0 ? 1 : 0]); }

private:
    static double sq(double x) { return x * x; }
};

/// Roots nu_-/+ of c_pred(nu^2) = theta K h(nu^2) and the intervals where the
/// sign of the lattice speed is guaranteed, for the cubic.
CorollaryReport corollary_report(double a, double k, double K, std::optional<double> h_diamond = std::nullopt);

/// sqrt(2)(a - 1/2) - sqrt(2d)(k-1)/sqrt(k+1): sigma* minus the advection
/// coefficient, i.e. the predicted speed in the rescaled frame.
double rescaled_speed_prediction(double d, double a, double k);

/// `n` points at fractions (i + 1)/(n + 1) of an interval, log-spaced.
std::vector<double> probe_points(Interval iv, int n);

} // namespace treewave
