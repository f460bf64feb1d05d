#include "treewave/cli.hpp"

#include "treewave/analysis.hpp"
#include "treewave/errors.hpp"
#include "treewave/io.hpp"
#include "treewave/kary_tree.hpp"
#include "treewave/lde_sim.hpp"
#include "treewave/model.hpp"
#include "treewave/tree_sim.hpp"
#include "treewave/wave_solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace treewave::cli {

using nlohmann::json;

namespace {

struct Options {
    std::string out_dir = "out";
    int jobs = 0;
    std::uint64_t seed = 0;

    double a = 0.75;
    double d = 1.0;
    double k = 2.0;

    // simulate / tree
    double t_end = 200.0;
    double dt = 0.0;
    std::size_t window = 512;
    double transient = 0.5;
    double pin_tol = 1e-4;
    double sample_interval = 0.25;
    int depth = 12;

    // solve / converge
    bool continuum = false;
    double half_width = 30.0;
    int m = 8;
    double newton_tol = 1e-10;
    std::vector<double> h_list{0.4, 0.2, 0.1, 0.05};

    // trace
    std::string kind = "reversal";
    std::string method = "simulation";
    std::vector<double> a_list{0.7, 0.8};
    std::vector<double> d_list;
    double d_min = 1e-3;
    double d_max = 1.0;
    int resolution = 32;
    double tol_d = 1e-3;
    double rel_tol = 1e-3;

    // corollary
    double K = 0.0;
    double h_diamond = 0.0;
};

json params_json(const Options& o) {
    return {{"out", o.out_dir},
            {"jobs", o.jobs},
            {"seed", o.seed},
            {"a", o.a},
            {"d", o.d},
            {"k", o.k},
            {"t_end", o.t_end},
            {"dt", o.dt},
            {"window", o.window},
            {"transient", o.transient},
            {"pin_tol", o.pin_tol},
            {"sample_interval", o.sample_interval},
            {"depth", o.depth},
            {"continuum", o.continuum},
            {"half_width", o.half_width},
            {"m", o.m},
            {"newton_tol", o.newton_tol},
            {"h_list", o.h_list},
            {"kind", o.kind},
            {"method", o.method},
            {"a_list", o.a_list},
            {"d_list", o.d_list},
            {"d_min", o.d_min},
            {"d_max", o.d_max},
            {"resolution", o.resolution},
            {"tol_d", o.tol_d},
            {"rel_tol", o.rel_tol},
            {"K", o.K},
            {"h_diamond", o.h_diamond}};
}

SimConfig sim_config(const Options& o) {
    SimConfig s;
    s.t_end = o.t_end;
    s.dt = o.dt;
    s.window = o.window;
    s.transient_fraction = o.transient;
    s.pin_tol = o.pin_tol;
    s.sample_interval = o.sample_interval;
    return s;
}

SolveConfig solve_config(const Options& o) {
    SolveConfig s;
    s.half_width = o.half_width;
    s.m = o.m;
    s.newton_tol = o.newton_tol;
    s.validate();
    return s;
}

json predict(const Options& o) {
    const ModelParams p(o.a, o.d, o.k);
    const auto g = Nonlinearity::cubic();
    const ContinuumCoeffs cc = continuum_coeffs(p);
    const AStarPlus as = in_A_star_plus(g, o.a);
    json j = {{"a", o.a},
              {"d", o.d},
              {"k", o.k},
              {"h", p.h()},
              {"nu", cc.nu},
              {"beta", cc.beta},
              {"sigma_pde", cc.sigma},
              {"c_pred", speed_prediction(o.a, o.d, o.k)},
              {"in_A_star_plus", as.member},
              {"g_integral", as.integral}};
    try {
        j["d_crit"] = critical_diffusion(o.a, o.k);
    } catch (const ParameterError& e) {
        j["d_crit"] = nullptr;
        j["d_crit_error"] = e.what();
    }
    return j;
}

json simulate_cmd(const Options& o, OutputSink& sink) {
    SimConfig cfg = sim_config(o);
    cfg.record_trajectory = true;
    const SimResult r = simulate(ModelParams(o.a, o.d, o.k), Nonlinearity::cubic(), cfg);
    sink.write("trajectory.csv", trajectory_csv(r.trajectory).str());
    json j = speed_json(r.speed);
    j["dt"] = r.dt;
    j["classification"] = r.speed.valid ? json(to_string(classify_speed(r.speed))) : json(nullptr);
    sink.write("speed.json", dump(j));
    return j;
}

json solve_cmd(const Options& o, OutputSink& sink) {
    const auto g = Nonlinearity::cubic();
    const SolveConfig cfg = solve_config(o);
    const WaveSolution w = o.continuum ? solve_continuum(o.a, g, cfg) : solve_wave(ModelParams(o.a, o.d, o.k), g, cfg);
    sink.write("profile.csv", profile_csv(w).str());
    const json j = solution_json(w);
    sink.write("solution.json", dump(j));
    return j;
}

json tree_cmd(const Options& o, OutputSink& sink) {
    const double kr = std::round(o.k);
    if (kr != o.k || kr < 2) throw ParameterError("tree simulation needs an integer branching factor k >= 2");
    const KaryTree tree(static_cast<int>(kr), o.depth);
    const ModelParams p(o.a, o.d, o.k);
    const ContinuumCoeffs cc = continuum_coeffs(p);
    std::vector<double> layers(static_cast<std::size_t>(tree.layers()));
    const double centre = 0.5 * o.depth;
    for (std::size_t i = 0; i < layers.size(); ++i)
        layers[i] = tanh_front((static_cast<double>(i) - centre) * p.h(), 0.0, cc.nu, cc.beta, o.a);

    TreeSimConfig cfg;
    cfg.t_end = o.t_end;
    cfg.dt = o.dt;
    cfg.sample_interval = o.sample_interval;
    const TreeTrajectory tr =
        simulate_tree(tree, o.d, Nonlinearity::cubic(), o.a, layer_symmetric_state(tree, layers), cfg);
    sink.write("layers.csv", layer_csv(tr.samples).str());

    double spread = 0.0;
    for (const auto& s : tr.samples)
        for (double v : s.spread) spread = std::max(spread, v);
    json j = {{"nodes", tree.size()},      {"layers", tree.layers()}, {"dt", tr.dt},
              {"max_layer_spread", spread}, {"samples", tr.samples.size()}};
    try {
        const double x0 = layer_front_position(tr.samples.front().mean);
        const double x1 = layer_front_position(tr.samples.back().mean);
        j["front_start"] = x0;
        j["front_end"] = x1;
        j["direction"] = x1 > x0 ? "down" : (x1 < x0 ? "up" : "pinned");
    } catch (const FrontLostError& e) {
        j["front_error"] = e.what();
    }
    sink.write("tree.json", dump(j));
    return j;
}

json trace_cmd(const Options& o, OutputSink& sink) {
    const auto g = Nonlinearity::cubic();
    ClassifyConfig cfg;
    cfg.jobs = o.jobs;
    cfg.sim.t_end = o.t_end;
    cfg.sim.pin_tol = o.pin_tol;
    cfg.solve = solve_config(o);
    json j = {{"kind", o.kind}};
    if (o.kind == "reversal") {
        const BoundaryCurve c = trace_reversal(o.a_list, o.k, o.tol_d, g, cfg);
        sink.write("boundary.csv", boundary_csv({c}).str());
        j["points"] = c.points.size();
    } else if (o.kind == "pinning") {
        const PinningTrace t = trace_pinning(o.a_list, o.k, o.d_min, o.d_max, o.resolution, g, cfg, o.rel_tol);
        sink.write("region.csv", region_csv(t.points).str());
        sink.write("boundary.csv", boundary_csv({t.pin_onset_lower, t.pin_exit}).str());
        j["diagnostics"] = t.diagnostics;
        json seq = json::object();
        for (double a : o.a_list) {
            json s = json::array();
            for (Direction dir : direction_sequence(t.points, a)) s.push_back(to_string(dir));
            seq[format_double(a)] = s;
        }
        j["sequences"] = seq;
    } else if (o.kind == "scan") {
        std::vector<double> ds = o.d_list;
        if (ds.empty()) {
            for (int i = 0; i < o.resolution; ++i)
                ds.push_back(o.d_min * std::pow(o.d_max / o.d_min, static_cast<double>(i) / (o.resolution - 1)));
        }
        const Method m = o.method == "mfde" ? Method::mfde : Method::simulation;
        const auto pts = scan_region(o.a_list, ds, o.k, m, g, cfg);
        sink.write("region.csv", region_csv(pts).str());
        j["points"] = pts.size();
    }
    sink.write("trace.json", dump(j));
    return j;
}

json converge_cmd(const Options& o, OutputSink& sink) {
    const ConvergenceStudy s = convergence_study(o.a, o.k, o.h_list, Nonlinearity::cubic(), solve_config(o));
    sink.write("convergence.csv", convergence_csv(s).str());
    const json j = convergence_json(s);
    sink.write("convergence.json", dump(j));
    return j;
}

json corollary_cmd(const Options& o, OutputSink& sink) {
    double K = o.K;
    std::optional<double> h_diamond;
    if (o.h_diamond > 0.0) h_diamond = o.h_diamond;
    if (!(K > 0.0)) {
        const ConvergenceStudy s = convergence_study(o.a, o.k, o.h_list, Nonlinearity::cubic(), solve_config(o));
        K = s.empirical_K;
        if (!h_diamond) h_diamond = o.h_list.front();
    }
    const json j = corollary_json(corollary_report(o.a, o.k, K, h_diamond));
    sink.write("corollary.json", dump(j));
    return j;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Travelling fronts of bistable lattice equations on k-ary trees", "treewave"};
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "key=value file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    app.add_option("--jobs", o.jobs, "Worker threads for sweeps (0: all)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", o.seed, "Seed of the random test-function generators");
    app.add_option("--a", o.a, "Detuning a in (0,1)")->capture_default_str();
    app.add_option("--d", o.d, "Diffusion d > 0")->capture_default_str();
    app.add_option("--k", o.k, "Branching factor k >= 1")->capture_default_str();
    app.add_option("--t-end", o.t_end, "Integration time")->capture_default_str();
    app.add_option("--dt", o.dt, "Time step (0: stability bound)");
    app.add_option("--window", o.window, "Lattice sites in the moving window")->capture_default_str();
    app.add_option("--transient", o.transient, "Discarded fraction of the run")->capture_default_str();
    app.add_option("--pin-tol", o.pin_tol, "Speed below which a front may count as pinned")->capture_default_str();
    app.add_option("--sample-interval", o.sample_interval, "Time between recorded samples")->capture_default_str();
    app.add_option("--depth", o.depth, "Tree depth")->capture_default_str();
    app.add_flag("--continuum", o.continuum, "Solve the continuum limit instead");
    app.add_option("--half-width", o.half_width, "Half-width of the xi domain")->capture_default_str();
    app.add_option("--m", o.m, "Grid steps per shift h")->capture_default_str();
    app.add_option("--newton-tol", o.newton_tol, "Newton residual tolerance")->capture_default_str();
    app.add_option("--h-list", o.h_list, "Decreasing grid sizes")->delimiter(',');
    app.add_option("--kind", o.kind, "reversal | pinning | scan")
        ->check(CLI::IsMember({"reversal", "pinning", "scan"}));
    app.add_option("--method", o.method, "simulation | mfde")->check(CLI::IsMember({"simulation", "mfde"}));
    app.add_option("--a-list", o.a_list, "Detuning values")->delimiter(',');
    app.add_option("--d-list", o.d_list, "Diffusion values of a scan")->delimiter(',');
    app.add_option("--d-min", o.d_min, "Lower end of the d range")->capture_default_str();
    app.add_option("--d-max", o.d_max, "Upper end of the d range")->capture_default_str();
    app.add_option("--resolution", o.resolution, "d samples per a")->capture_default_str();
    app.add_option("--tol-d", o.tol_d, "Bisection width of the reversal trace")->capture_default_str();
    app.add_option("--rel-tol", o.rel_tol, "Relative width of pinning edges")->capture_default_str();
    app.add_option("--K", o.K, "Rate constant (0: empirical from a convergence study)");
    app.add_option("--h-diamond", o.h_diamond, "Largest h where the rate bound is assumed (0: none)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"predict", "Continuum-limit predictions at (a, d, k)"},
        {"simulate", "Integrate the lattice equation and fit the front speed"},
        {"solve", "Solve for the travelling front by Newton's method"},
        {"tree", "Integrate on a finite k-ary tree"},
        {"trace", "Classify and trace boundaries in the (a, d) plane"},
        {"converge", "Measure the h -> 0 convergence of the wave speed"},
        {"corollary", "Bounds on the reversal region from the rate constant"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", e.what()}, {"kind", "usage"}}.dump() << '\n';
        return usage_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    try {
        OutputSink sink(o.out_dir);
        json result;
        if (name == "predict") {
            result = predict(o);
            sink.write("predict.json", dump(result));
        } else if (name == "simulate") {
            result = simulate_cmd(o, sink);
        } else if (name == "solve") {
            result = solve_cmd(o, sink);
        } else if (name == "tree") {
            result = tree_cmd(o, sink);
        } else if (name == "trace") {
            result = trace_cmd(o, sink);
        } else if (name == "converge") {
            result = converge_cmd(o, sink);
        } else {
            result = corollary_cmd(o, sink);
        }

        RunManifest manifest;
        manifest.command = name;
        manifest.params = params_json(o);
        manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        manifest.outputs = sink.files();
        sink.write("manifest.json", dump(manifest.to_json()));
        out << result.dump(2) << '\n';
        return ok;
    } catch (const Error& e) {
        err << json{{"error", e.what()}, {"kind", e.numerical() ? "numerical" : "usage"}}.dump() << '\n';
        return e.numerical() ? numerical_failure : usage_error;
    } catch (const std::exception& e) {
        err << json{{"error", e.what()}, {"kind", "numerical"}}.dump() << '\n';
        return numerical_failure;
    }
}

} // namespace treewave::cli
