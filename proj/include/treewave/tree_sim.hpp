#pragma once

// Reaction-diffusion dynamics on a finite complete k-ary tree. Layer-constant
// states form an invariant subspace on which the dynamics reduce to the
// lattice equation, with reflecting ends (the root has no parent, the leaves
// have no children).

#include "treewave/kary_tree.hpp"
#include "treewave/model.hpp"

#include <vector>

namespace treewave {

struct TreeState {
    std::vector<double> u;
    double time = 0.0;
};

/// Broadcasts one value per layer to every node of that layer.
TreeState layer_symmetric_state(const KaryTree& tree, const std::vector<double>& layer_values);

std::vector<double> tree_rhs(const TreeState& state, const KaryTree& tree, double d, const Nonlinearity& g,
                             double a);

struct TreeSimConfig {
    /// 0 selects 0.5 / (d (k+1) + max |g_u|).
    double dt = 0.0;
    double t_end = 10.0;
    double sample_interval = 0.5;
};

struct LayerSample {
    double time;
    std::vector<double> mean;
    /// max - min over the nodes of each layer.
    std::vector<double> spread;
};

struct TreeTrajectory {
    std::vector<LayerSample> samples;
    TreeState final_state;
    double dt = 0.0;
};

/// RK4 integration recording per-layer mean and spread every sample interval
/// (the initial state included).
TreeTrajectory simulate_tree(const KaryTree& tree, double d, const Nonlinearity& g, double a, TreeState init,
                             const TreeSimConfig& cfg);

/// Position of the 1/2 crossing in a layer profile, in layers. Throws
/// FrontLostError without a crossing.
double layer_front_position(const std::vector<double>& layer_values);

} // namespace treewave
