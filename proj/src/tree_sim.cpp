#include "treewave/tree_sim.hpp"

#include "treewave/errors.hpp"
#include "treewave/kernels.hpp"
#include "treewave/lde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treewave {

TreeState layer_symmetric_state(const KaryTree& tree, const std::vector<double>& layer_values) {
    if (layer_values.size() != static_cast<std::size_t>(tree.layers())) {
        throw ParameterError("layer profile length must equal the number of tree layers");
    }
    TreeState s;
    s.u.resize(tree.size());
    for (int layer = 0; layer < tree.layers(); ++layer) {
        const auto begin = s.u.begin() + static_cast<std::ptrdiff_t>(tree.layer_offset(layer));
        std::fill(begin, begin + static_cast<std::ptrdiff_t>(tree.layer_size(layer)),
                  layer_values[static_cast<std::size_t>(layer)]);
    }
    return s;
}

std::vector<double> tree_rhs(const TreeState& state, const KaryTree& tree, double d, const Nonlinearity& g,
                             double a) {
    if (state.u.size() != tree.size()) throw ParameterError("tree state does not match the tree");
    std::vector<double> du(tree.size());
    kernels::tree_rhs(tree, state.u, du, d, a, g);
    return du;
}

namespace {

LayerSample sample_layers(const KaryTree& tree, const TreeState& s) {
    LayerSample out{s.time, std::vector<double>(static_cast<std::size_t>(tree.layers())),
                    std::vector<double>(static_cast<std::size_t>(tree.layers()))};
    for (int layer = 0; layer < tree.layers(); ++layer) {
        const auto begin = s.u.begin() + static_cast<std::ptrdiff_t>(tree.layer_offset(layer));
        const auto end = begin + static_cast<std::ptrdiff_t>(tree.layer_size(layer));
        double sum = 0.0;
        for (auto it = begin; it != end; ++it) sum += *it;
        const auto [lo, hi] = std::minmax_element(begin, end);
        out.mean[static_cast<std::size_t>(layer)] = sum / static_cast<double>(tree.layer_size(layer));
        out.spread[static_cast<std::size_t>(layer)] = *hi - *lo;
    }
    return out;
}

} // namespace

TreeTrajectory simulate_tree(const KaryTree& tree, double d, const Nonlinearity& g, double a, TreeState state,
                             const TreeSimConfig& cfg) {
    if (state.u.size() != tree.size()) throw ParameterError("tree state does not match the tree");
    if (!(d > 0.0)) throw ParameterError("diffusion d must be positive");
    if (!(cfg.t_end >= 0.0) || !(cfg.sample_interval > 0.0)) throw ParameterError("invalid tree time settings");

    const double bound = 0.5 / (d * (tree.k() + 1.0) + g.lipschitz(a));
    if (cfg.dt > bound) {
        std::ostringstream os;
        os << "time step " << cfg.dt << " exceeds the stability bound " << bound;
        throw ParameterError(os.str());
    }
    const double dt_max = cfg.dt > 0.0 ? cfg.dt : bound;
    const auto substeps = static_cast<std::size_t>(std::ceil(cfg.sample_interval / dt_max - 1e-12));
    const double dt = cfg.sample_interval / static_cast<double>(substeps);

    const std::size_t n = tree.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto advance = [&](double h) {
        kernels::tree_rhs(tree, state.u, k1, d, a, g);
        kernels::axpy_into(state.u, 0.5 * h, k1, tmp);
        kernels::tree_rhs(tree, tmp, k2, d, a, g);
        kernels::axpy_into(state.u, 0.5 * h, k2, tmp);
        kernels::tree_rhs(tree, tmp, k3, d, a, g);
        kernels::axpy_into(state.u, h, k3, tmp);
        kernels::tree_rhs(tree, tmp, k4, d, a, g);
        kernels::rk4_combine(state.u, h, k1, k2, k3, k4);
        state.time += h;
        for (double v : state.u) {
            if (!(std::abs(v) <= 10.0)) {
                std::ostringstream os;
                os << "tree integration blew up at t = " << state.time << " with dt = " << h;
                throw InstabilityError(os.str(), h);
            }
        }
    };

    TreeTrajectory out;
    out.dt = dt;
    out.samples.push_back(sample_layers(tree, state));
    const double t0 = state.time;
    const auto samples = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.sample_interval));
    for (std::size_t s = 1; s <= samples; ++s) {
        const double target = t0 + static_cast<double>(s) * cfg.sample_interval;
        for (std::size_t i = 0; i < substeps; ++i) advance(i + 1 == substeps ? target - state.time : dt);
        state.time = target;
        out.samples.push_back(sample_layers(tree, state));
    }
    out.final_state = std::move(state);
    return out;
}

double layer_front_position(const std::vector<double>& layer_values) {
    LatticeState s;
    s.u = layer_values;
    return front_position(s);
}

} // namespace treewave
