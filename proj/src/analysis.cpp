#include "treewave/analysis.hpp"

#include "treewave/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

namespace treewave {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

/// Runs body(i) for i in [0, n) on `jobs` threads. The first exception by
/// index is rethrown so failures are reported deterministically.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(jobs))
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

RegionPoint simulate_point(double a, double d, double k, const Nonlinearity& g, const ClassifyConfig& cfg) {
    const SpeedEstimate e = estimate_speed(ModelParams(a, d, k), g, cfg.sim);
    return {a, d, k, classify_speed(e), e.c_hat, Method::simulation};
}

bool by_a_then_d(const RegionPoint& x, const RegionPoint& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.d < y.d;
}

bool moving(Direction c) { return c != Direction::pinned; }

} // namespace

const char* to_string(Direction d) {
    switch (d) {
    case Direction::down: return "down";
    case Direction::up: return "up";
    case Direction::pinned: return "pinned";
    }
    return "?";
}

const char* to_string(Method m) { return m == Method::simulation ? "simulation" : "mfde"; }

const char* to_string(BoundaryKind k) {
    switch (k) {
    case BoundaryKind::pin_onset_lower: return "pin-onset-lower";
    case BoundaryKind::pin_exit: return "pin-exit";
    case BoundaryKind::reversal: return "reversal";
    }
    return "?";
}

Direction classify_speed(const SpeedEstimate& e) {
    if (!e.valid || std::isnan(e.c_hat)) throw Error("speed estimate undefined: too few post-transient samples", true);
    if (e.pinned || e.c_hat == 0.0) return Direction::pinned;
    return e.c_hat > 0.0 ? Direction::down : Direction::up;
}

RegionPoint classify(double a, double d, double k, Method method, const Nonlinearity& g, const ClassifyConfig& cfg) {
    const ModelParams p(a, d, k);
    if (method == Method::simulation) return simulate_point(a, d, k, g, cfg);
    try {
        const WaveSolution w = solve_wave(p, g, cfg.solve);
        const double c = w.c_lattice();
        if (std::abs(c) >= cfg.sim.pin_tol)
            return {a, d, k, c > 0.0 ? Direction::down : Direction::up, c, Method::mfde};
    } catch (const NonConvergenceError&) {
        // Newton stalls near pinning; the simulation decides.
    }
    return simulate_point(a, d, k, g, cfg);
}

std::vector<RegionPoint> scan_region(const std::vector<double>& a_values, const std::vector<double>& d_values,
                                     double k, Method method, const Nonlinearity& g, const ClassifyConfig& cfg) {
    const std::size_t nd = d_values.size();
    std::vector<RegionPoint> out(a_values.size() * nd);
    parallel_for(out.size(), cfg.jobs, [&](std::size_t i) {
        out[i] = classify(a_values[i / nd], d_values[i % nd], k, method, g, cfg);
    });
    std::stable_sort(out.begin(), out.end(), by_a_then_d);
    return out;
}

BoundaryCurve trace_reversal(const std::vector<double>& a_values, double k, double tol_d, const Nonlinearity& g,
                             const ClassifyConfig& cfg) {
    if (!(tol_d > 0.0)) throw ParameterError("tol_d must be positive");
    BoundaryCurve curve;
    curve.k = k;
    curve.kind = BoundaryKind::reversal;
    curve.points.resize(a_values.size());

    parallel_for(a_values.size(), cfg.jobs, [&](std::size_t i) {
        const double a = a_values[i];
        const double dc = critical_diffusion(a, k);
        std::vector<double> probed;
        auto up = [&](double d) {
            probed.push_back(d);
            return simulate_point(a, d, k, g, cfg).c_hat < 0.0;
        };
        double lo = 0.5 * dc;
        double hi = 4.0 * dc;
        int widen = 0;
        while (up(lo) && widen++ < 12) lo *= 0.5;
        widen = 0;
        while (!up(hi) && widen++ < 12) hi *= 2.0;
        if (up(lo) || !up(hi)) {
            std::ostringstream os;
            os << "no sign change of the speed at a = " << a << ", k = " << k << "; probed d =";
            for (double d : probed) os << ' ' << d;
            throw BracketError(os.str());
        }
        while (hi - lo > tol_d) {
            const double mid = 0.5 * (lo + hi);
            (up(mid) ? hi : lo) = mid;
        }
        curve.points[i] = {a, 0.5 * (lo + hi)};
    });
    std::stable_sort(curve.points.begin(), curve.points.end());
    return curve;
}

PinningTrace trace_pinning(const std::vector<double>& a_values, double k, double d_lo, double d_hi, int resolution,
                           const Nonlinearity& g, const ClassifyConfig& cfg, double rel_tol) {
    if (!(d_lo > 0.0 && d_hi > d_lo)) throw ParameterError("d range must satisfy 0 < d_lo < d_hi");
    if (resolution < 2) throw ParameterError("resolution must be at least 2");
    if (!(rel_tol > 0.0)) throw ParameterError("rel_tol must be positive");

    std::vector<double> d_values(static_cast<std::size_t>(resolution));
    for (int j = 0; j < resolution; ++j)
        d_values[static_cast<std::size_t>(j)] =
            d_lo * std::pow(d_hi / d_lo, static_cast<double>(j) / static_cast<double>(resolution - 1));

    PinningTrace trace;
    trace.pin_onset_lower.k = trace.pin_exit.k = k;
    trace.pin_onset_lower.kind = BoundaryKind::pin_onset_lower;
    trace.pin_exit.kind = BoundaryKind::pin_exit;

    struct PerA {
        std::vector<RegionPoint> points;
        std::vector<std::pair<double, BoundaryKind>> edges;
    };
    const std::vector<RegionPoint> scan = scan_region(a_values, d_values, k, Method::simulation, g, cfg);
    std::vector<PerA> per_a(a_values.size());

    parallel_for(a_values.size(), cfg.jobs, [&](std::size_t i) {
        const double a = a_values[i];
        auto& pts = per_a[i].points;
        for (const auto& r : scan)
            if (r.a == a) pts.push_back(r);

        // A speed that changes sign between neighbours passes through zero;
        // bisect until a point inside the pinned band is hit.
        const std::size_t scanned = pts.size();
        for (std::size_t j = 0; j + 1 < scanned; ++j) {
            RegionPoint lo = pts[j], hi = pts[j + 1];
            if (!moving(lo.classification) || !moving(hi.classification) || lo.classification == hi.classification)
                continue;
            for (int it = 0; it < 60 && hi.d - lo.d > 1e-14 * hi.d; ++it) {
                const RegionPoint mid = simulate_point(a, 0.5 * (lo.d + hi.d), k, g, cfg);
                pts.push_back(mid);
                if (mid.classification == Direction::pinned) break;
                (mid.classification == lo.classification ? lo : hi) = mid;
            }
        }
        std::stable_sort(pts.begin(), pts.end(), by_a_then_d);

        // Edges between pinned and moving neighbours.
        const std::vector<RegionPoint> snapshot = pts;
        for (std::size_t j = 0; j + 1 < snapshot.size(); ++j) {
            const bool p0 = !moving(snapshot[j].classification);
            const bool p1 = !moving(snapshot[j + 1].classification);
            if (p0 == p1) continue;
            double lo = snapshot[j].d, hi = snapshot[j + 1].d;
            while (hi - lo > rel_tol * lo) {
                const double mid = 0.5 * (lo + hi);
                const RegionPoint r = simulate_point(a, mid, k, g, cfg);
                pts.push_back(r);
                ((r.classification == Direction::pinned) == p0 ? lo : hi) = mid;
            }
            per_a[i].edges.emplace_back(0.5 * (lo + hi), p0 ? BoundaryKind::pin_exit : BoundaryKind::pin_onset_lower);
        }
        std::stable_sort(pts.begin(), pts.end(), by_a_then_d);
    });

    for (std::size_t i = 0; i < a_values.size(); ++i) {
        const auto& pa = per_a[i];
        trace.points.insert(trace.points.end(), pa.points.begin(), pa.points.end());
        const bool any_pinned = std::any_of(pa.points.begin(), pa.points.end(),
                                            [](const RegionPoint& r) { return r.classification == Direction::pinned; });
        if (!any_pinned) {
            std::ostringstream os;
            os << "no pinned points for a = " << a_values[i] << " in d in [" << d_lo << ", " << d_hi << "]";
            trace.diagnostics.push_back(os.str());
        }
        for (const auto& [d, kind] : pa.edges)
            (kind == BoundaryKind::pin_exit ? trace.pin_exit : trace.pin_onset_lower).points.emplace_back(a_values[i], d);
    }
    std::stable_sort(trace.points.begin(), trace.points.end(), by_a_then_d);
    std::stable_sort(trace.pin_exit.points.begin(), trace.pin_exit.points.end());
    std::stable_sort(trace.pin_onset_lower.points.begin(), trace.pin_onset_lower.points.end());
    return trace;
}

std::vector<Direction> direction_sequence(const std::vector<RegionPoint>& points, double a) {
    std::vector<RegionPoint> at_a;
    for (const auto& r : points)
        if (r.a == a) at_a.push_back(r);
    std::stable_sort(at_a.begin(), at_a.end(), by_a_then_d);
    std::vector<Direction> seq;
    for (const auto& r : at_a)
        if (seq.empty() || seq.back() != r.classification) seq.push_back(r.classification);
    return seq;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    if (lx.size() < 2) return nan_v;
    return fit_speed(lx, ly).c_hat;
}

namespace {

/// H1 norm of phi - ref on the solution grid, trapezoid rule, with the
/// derivative of the difference taken by centred differences.
double h1_distance(const WaveSolution& w, const std::function<double(double)>& ref) {
    const std::size_t n = w.phi.size();
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = w.phi[j] - ref(w.xi(j));
    auto trap = [&](const std::vector<double>& f) {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < f.size(); ++j) s += 0.5 * (f[j] * f[j] + f[j + 1] * f[j + 1]);
        return s * w.dxi;
    };
    std::vector<double> de(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t l = j == 0 ? 0 : j - 1;
        const std::size_t r = j + 1 == n ? j : j + 1;
        de[j] = (e[r] - e[l]) / (static_cast<double>(r - l) * w.dxi);
    }
    return std::sqrt(trap(e) + trap(de));
}

} // namespace

ConvergenceStudy convergence_study(double a, double k, const std::vector<double>& h_list, const Nonlinearity& g,
                                   const SolveConfig& cfg) {
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1])) throw ParameterError("h list must be strictly decreasing");

    ConvergenceStudy study;
    study.a = a;
    study.k = k;

    std::function<double(double)> reference;
    if (g.kind() == Nonlinearity::Kind::cubic) {
        study.sigma_star = std::sqrt(2.0) * (a - 0.5);
        reference = [](double xi) { return 0.5 * (1.0 + std::tanh(xi / std::sqrt(8.0))); };
    } else {
        auto cont = std::make_shared<WaveSolution>(solve_continuum(a, g, cfg));
        study.sigma_star = cont->c;
        reference = [cont](double xi) {
            const double s = (xi - cont->origin) / cont->dxi;
            if (s <= 0.0) return cont->phi.front();
            const auto j = static_cast<std::size_t>(s);
            if (j + 1 >= cont->phi.size()) return cont->phi.back();
            const double f = s - static_cast<double>(j);
            return (1.0 - f) * cont->phi[j] + f * cont->phi[j + 1];
        };
    }

    std::vector<double> hs, errs;
    const WaveSolution* guess = nullptr;
    WaveSolution previous;
    for (double h : h_list) {
        ConvergenceRow row;
        row.h = h;
        try {
            const ModelParams p = ModelParams::from_grid_size(a, h, k);
            WaveSolution w = solve_wave(p, g, cfg, guess);
            row.c = w.c;
            row.c_compare = w.c_compare();
            row.err_c = std::abs(row.c_compare - study.sigma_star);
            row.err_profile = h1_distance(w, reference);
            row.ok = true;
            hs.push_back(h);
            errs.push_back(row.err_c);
            previous = std::move(w);
            guess = &previous;
        } catch (const Error& e) {
            row.message = e.what();
            row.c = row.c_compare = row.err_c = row.err_profile = nan_v;
        }
        study.rows.push_back(row);
    }
    study.slope = loglog_slope(hs, errs);
    for (std::size_t i = 0; i < hs.size(); ++i) study.empirical_K = std::max(study.empirical_K, errs[i] / hs[i]);
    return study;
}

double rescaled_speed_prediction(double d, double a, double k) {
    return std::sqrt(2.0) * (a - 0.5) - std::sqrt(2.0 * d) * (k - 1.0) / std::sqrt(k + 1.0);
}

CorollaryReport corollary_report(double a, double k, double K, std::optional<double> h_diamond) {
    CorollaryReport r;
    r.a = a;
    r.k = k;
    r.K_used = K;
    r.h_diamond = h_diamond;
    for (double* v : {&r.d_crit, &r.gamma, &r.E[0], &r.E[1], &r.nu_minus[0], &r.nu_minus[1], &r.nu_plus[0],
                      &r.nu_plus[1], &r.D_minus.lo, &r.D_minus.hi, &r.D_plus.lo, &r.D_plus.hi})
        *v = nan_v;

    std::vector<std::string> reasons;
    if (!(k > 1.0)) reasons.push_back("k must exceed 1");
    if (!(a > 0.5 && a < 1.0)) reasons.push_back("a must lie in (1/2, 1)");
    if (!(K > 0.0)) reasons.push_back("K must be positive");
    if (h_diamond && !(*h_diamond > 0.0)) reasons.push_back("h_diamond must be positive");
    if (!reasons.empty()) {
        for (std::size_t i = 0; i < reasons.size(); ++i) r.reason += (i ? "; " : "") + reasons[i];
        return r;
    }

    r.d_crit = critical_diffusion(a, k);
    r.gamma = 4.0 * K * std::sqrt(k - 1.0) / (std::pow(k + 1.0, 0.75) * std::pow(a - 0.5, 1.5));
    r.d_crit_ge_1 = r.d_crit >= 1.0;
    r.gamma_le_1 = r.gamma <= 1.0;
    r.nu_diamond = h_diamond ? std::sqrt(2.0) / (*h_diamond * std::sqrt(k + 1.0)) : 0.0;

    const double q = std::pow(r.d_crit, -0.25) * r.gamma;
    const double half_root = 0.5 * std::sqrt(r.d_crit);
    r.real_valued = true;
    for (int i = 0; i < 2; ++i) {
        const double theta = i == 0 ? -1.0 : 1.0;
        double disc = 1.0 - theta * q;
        // q = 1 is the edge of the real range; keep it real despite rounding.
        if (disc < 0.0 && disc > -1e-12) disc = 0.0;
        if (disc < 0.0) {
            r.real_valued = false;
            continue;
        }
        r.E[i] = 1.0 - std::sqrt(disc);
        r.nu_minus[i] = half_root * r.E[i];
        r.nu_plus[i] = half_root * (2.0 - r.E[i]);
    }

    r.D_minus = {std::pow(std::max(r.nu_diamond, r.nu_plus[0]), 2), std::numeric_limits<double>::infinity()};
    if (r.real_valued) r.D_plus = {std::pow(std::max(r.nu_diamond, r.nu_minus[1]), 2), r.nu_plus_sq(+1)};

    const double dc = r.d_crit;
    const double dq = std::pow(dc, -0.25);
    r.check_upper = r.nu_plus_sq(-1) <= dc * (1.0 + dq);
    r.check_lower_minus = r.real_valued && r.nu_minus_sq(+1) <= 0.25 * dc;
    r.check_lower_plus = r.real_valued && r.nu_plus_sq(+1) >= dc * (1.0 - dq);

    if (!r.real_valued) reasons.push_back("gamma d_crit^{-1/4} > 1: E(+1) is complex and D+ is empty");
    if (!r.d_crit_ge_1) reasons.push_back("precondition d_crit >= 1 fails");
    if (!r.gamma_le_1) reasons.push_back("precondition gamma <= 1 fails");
    for (std::size_t i = 0; i < reasons.size(); ++i) r.reason += (i ? "; " : "") + reasons[i];
    return r;
}

std::vector<double> probe_points(Interval iv, int n) {
    if (!(iv.lo > 0.0 && iv.hi > iv.lo && std::isfinite(iv.hi))) throw ParameterError("probe interval must be finite and positive");
    std::vector<double> out;
    const double ratio = std::log(iv.hi / iv.lo);
    for (int i = 0; i < n; ++i)
        out.push_back(iv.lo * std::exp(ratio * static_cast<double>(i + 1) / static_cast<double>(n + 1)));
    return out;
}

} // namespace treewave
