#include "treewave/kary_tree.hpp"

#include "treewave/errors.hpp"

#include <algorithm>
#include <sstream>

namespace treewave {

KaryTree::KaryTree(int k, int depth) : k_(k), depth_(depth) {
    if (k < 2) throw ParameterError("tree branching factor must be an integer >= 2");
    if (depth < 0) throw ParameterError("tree depth must be non-negative");
    offsets_.reserve(static_cast<std::size_t>(depth) + 2);
    offsets_.push_back(0);
    std::size_t width = 1;
    for (int i = 0; i <= depth; ++i) {
        offsets_.push_back(offsets_.back() + width);
        if (offsets_.back() > max_nodes) {
            std::ostringstream os;
            os << "tree with k = " << k << ", depth = " << depth << " exceeds " << max_nodes << " nodes";
            throw ParameterError(os.str());
        }
        width *= static_cast<std::size_t>(k);
    }
}

int KaryTree::layer_of(std::size_t node) const {
    if (node >= size()) throw ParameterError("node index out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), node);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

} // namespace treewave
