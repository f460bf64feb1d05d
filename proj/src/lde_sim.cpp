#include "treewave/lde_sim.hpp"

#include "treewave/errors.hpp"
#include "treewave/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace treewave {

namespace {

kernels::Ghosts ghosts_for(const std::vector<double>& u, LatticeBoundary boundary) {
    if (boundary == LatticeBoundary::reflecting) return {u.front(), u.back()};
    return {0.0, 1.0};
}

/// Reusable buffers for RK4 on one window.
class Stepper {
public:
    Stepper(const ModelParams& p, const Nonlinearity& g, LatticeBoundary boundary)
        : coupling_{p.d(), p.k(), p.a(), &g}, boundary_(boundary) {}

    void advance(LatticeState& s, double dt) {
        const std::size_t n = s.u.size();
        k1_.resize(n);
        k2_.resize(n);
        k3_.resize(n);
        k4_.resize(n);
        tmp_.resize(n);
        eval(s.u, k1_);
        kernels::axpy_into(s.u, 0.5 * dt, k1_, tmp_);
        eval(tmp_, k2_);
        kernels::axpy_into(s.u, 0.5 * dt, k2_, tmp_);
        eval(tmp_, k3_);
        kernels::axpy_into(s.u, dt, k3_, tmp_);
        eval(tmp_, k4_);
        kernels::rk4_combine(s.u, dt, k1_, k2_, k3_, k4_);
        s.time += dt;
        for (double v : s.u) {
            if (!(std::abs(v) <= 10.0)) {
                std::ostringstream os;
                os << "lattice integration blew up at t = " << s.time << " with dt = " << dt;
                throw InstabilityError(os.str(), dt);
            }
        }
    }

private:
    void eval(const std::vector<double>& u, std::vector<double>& du) {
        kernels::lattice_rhs(u, du, coupling_, ghosts_for(u, boundary_));
    }

    kernels::LatticeCoupling coupling_;
    LatticeBoundary boundary_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

/// Leftmost j with u_j < 1/2 <= u_{j+1}, or npos.
std::size_t crossing_index(const std::vector<double>& u) {
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
        if (u[j] < 0.5 && u[j + 1] >= 0.5) return j;
    }
    return static_cast<std::size_t>(-1);
}

void recenter(LatticeState& s, std::size_t margin, LatticeBoundary boundary) {
    const std::size_t n = s.u.size();
    if (margin == 0 || n < 2 * margin + 2) return;
    const std::size_t j = crossing_index(s.u);
    if (j == static_cast<std::size_t>(-1)) return;
    if (j >= margin && j + margin < n - 1) return;

    const auto shift = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(n / 2);
    const kernels::Ghosts pad = ghosts_for(s.u, boundary);
    std::vector<double> moved(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t src = static_cast<std::int64_t>(i) + shift;
        if (src < 0) moved[i] = pad.left;
        else if (src >= static_cast<std::int64_t>(n)) moved[i] = pad.right;
        else moved[i] = s.u[static_cast<std::size_t>(src)];
    }
    s.u = std::move(moved);
    s.offset += shift;
}

} // namespace

double stability_bound(const ModelParams& p, const Nonlinearity& g) {
    return 0.5 / (p.d() * (p.k() + 1.0) + g.lipschitz(p.a()));
}

std::vector<double> rhs(const LatticeState& state, const ModelParams& p, const Nonlinearity& g,
                        LatticeBoundary boundary) {
    std::vector<double> du(state.u.size());
    if (state.u.empty()) return du;
    const kernels::LatticeCoupling c{p.d(), p.k(), p.a(), &g};
    kernels::lattice_rhs(state.u, du, c, ghosts_for(state.u, boundary));
    return du;
}

LatticeState step(const LatticeState& state, const ModelParams& p, const Nonlinearity& g, double dt,
                  std::size_t recenter_margin, LatticeBoundary boundary) {
    if (!(dt > 0.0)) throw ParameterError("time step must be positive");
    const double bound = stability_bound(p, g);
    if (dt > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds the stability bound " << bound;
        throw ParameterError(os.str());
    }
    LatticeState next = state;
    if (next.u.empty()) {
        next.time += dt;
        return next;
    }
    Stepper stepper(p, g, boundary);
    stepper.advance(next, dt);
    recenter(next, recenter_margin, boundary);
    return next;
}

double front_position(const LatticeState& state) {
    const std::size_t j = crossing_index(state.u);
    if (j == static_cast<std::size_t>(-1)) {
        std::ostringstream os;
        os << "no upward crossing of 1/2 in the window starting at site " << state.offset << " (t = " << state.time
           << ")";
        throw FrontLostError(os.str());
    }
    const double lo = state.u[j];
    const double hi = state.u[j + 1];
    const double frac = (0.5 - lo) / (hi - lo);
    return static_cast<double>(state.offset + static_cast<std::int64_t>(j)) + frac;
}

LatticeState tanh_initial_state(const ModelParams& p, std::size_t window, std::int64_t centre) {
    const ContinuumCoeffs cc = continuum_coeffs(p);
    LatticeState s;
    s.offset = centre - static_cast<std::int64_t>(window / 2);
    s.u.resize(window);
    for (std::size_t i = 0; i < window; ++i) {
        const auto site = static_cast<std::int64_t>(i) + s.offset - centre;
        s.u[i] = tanh_front(static_cast<double>(site) * p.h(), 0.0, cc.nu, cc.beta, p.a());
    }
    return s;
}

SpeedEstimate fit_speed(const std::vector<double>& t, const std::vector<double>& x) {
    SpeedEstimate est;
    est.samples = t.size();
    if (t.size() < 2) {
        est.c_hat = std::numeric_limits<double>::quiet_NaN();
        est.stderr_c = std::numeric_limits<double>::quiet_NaN();
        est.intercept = x.empty() ? std::numeric_limits<double>::quiet_NaN() : x.front();
        return est;
    }
    const auto n = static_cast<double>(t.size());
    double tm = 0.0, xm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        xm += x[i];
    }
    tm /= n;
    xm /= n;
    double stt = 0.0, stx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        stx += (t[i] - tm) * (x[i] - xm);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    if (stt == 0.0) {
        est.c_hat = std::numeric_limits<double>::quiet_NaN();
        est.stderr_c = std::numeric_limits<double>::quiet_NaN();
        est.intercept = xm;
        return est;
    }
    est.valid = true;
    est.c_hat = stx / stt;
    est.intercept = xm - est.c_hat * tm;
    const double ss_res = std::max(0.0, sxx - est.c_hat * stx);
    est.stderr_c = t.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / stt) : 0.0;
    est.r_squared = sxx > 0.0 ? std::clamp(1.0 - ss_res / sxx, 0.0, 1.0) : 1.0;
    est.displacement = x.back() - x.front();
    return est;
}

SimResult simulate(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg) {
    return simulate(p, g, cfg, tanh_initial_state(p, cfg.window));
}

SimResult simulate(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg, LatticeState state) {
    if (state.u.size() < 64) throw ParameterError("simulation window must hold at least 64 sites");
    if (!(cfg.t_end >= 0.0)) throw ParameterError("t_end must be non-negative");
    if (!(cfg.transient_fraction > 0.0 && cfg.transient_fraction < 1.0))
        throw ParameterError("transient fraction must lie in (0, 1)");
    if (!(cfg.sample_interval > 0.0)) throw ParameterError("sample interval must be positive");

    const double bound = stability_bound(p, g);
    if (cfg.dt > bound) {
        std::ostringstream os;
        os << "time step " << cfg.dt << " exceeds the stability bound " << bound;
        throw ParameterError(os.str());
    }
    const double dt_max = cfg.dt > 0.0 ? cfg.dt : bound;
    // Sub-steps per sample interval, so that sample times do not depend on dt.
    const auto substeps = static_cast<std::size_t>(std::ceil(cfg.sample_interval / dt_max - 1e-12));
    const double dt = cfg.sample_interval / static_cast<double>(substeps);

    SimResult result;
    result.dt = dt;
    Stepper stepper(p, g, cfg.boundary);
    std::vector<double> times, positions;
    const double t0 = state.time;
    const double t_fit = t0 + cfg.transient_fraction * cfg.t_end;

    auto record = [&]() {
        const double pos = front_position(state);
        if (state.time >= t_fit - 1e-12 || cfg.t_end == 0.0) {
            times.push_back(state.time);
            positions.push_back(pos);
        }
        if (cfg.record_trajectory) {
            const auto [lo, hi] = std::minmax_element(state.u.begin(), state.u.end());
            result.trajectory.push_back({state.time, pos, *lo, *hi});
        }
    };

    record();
    const auto samples = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.sample_interval));
    for (std::size_t s = 1; s <= samples; ++s) {
        const double target = t0 + static_cast<double>(s) * cfg.sample_interval;
        for (std::size_t i = 0; i < substeps; ++i) {
            // Land exactly on the sample time to keep it independent of dt.
            const double h = i + 1 == substeps ? target - state.time : dt;
            stepper.advance(state, h);
            recenter(state, cfg.recenter_margin, cfg.boundary);
        }
        state.time = target;
        record();
    }

    result.speed = fit_speed(times, positions);
    result.speed.pinned =
        result.speed.valid && std::abs(result.speed.c_hat) < cfg.pin_tol && std::abs(result.speed.displacement) < 1.0;
    result.final_state = std::move(state);
    return result;
}

SpeedEstimate estimate_speed(const ModelParams& p, const Nonlinearity& g, const SimConfig& cfg) {
    return simulate(p, g, cfg).speed;
}

} // namespace treewave
