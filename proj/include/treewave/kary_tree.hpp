#pragma once

#include <cstddef>
#include <vector>

namespace treewave {

/// Complete k-ary tree of depth D stored in level order: layer i holds k^i
/// nodes starting at `layer_offset(i)`.
class KaryTree {
public:
    /// Largest tree accepted.
    static constexpr std::size_t max_nodes = 2'000'000;

    KaryTree(int k, int depth);

    int k() const noexcept { return k_; }
    int depth() const noexcept { return depth_; }
    int layers() const noexcept { return depth_ + 1; }
    std::size_t size() const noexcept { return offsets_.back(); }

    std::size_t layer_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
    std::size_t layer_size(int layer) const {
        return offsets_[static_cast<std::size_t>(layer) + 1] - offsets_[static_cast<std::size_t>(layer)];
    }

    /// Layer containing `node`.
    int layer_of(std::size_t node) const;
    /// First child of a node in `layer`; the children are consecutive.
    std::size_t first_child(std::size_t node, int layer) const {
        return static_cast<std::size_t>(k_) * (node - layer_offset(layer)) + layer_offset(layer + 1);
    }
    std::size_t parent(std::size_t node, int layer) const {
        return layer_offset(layer - 1) + (node - layer_offset(layer)) / static_cast<std::size_t>(k_);
    }

private:
    int k_;
    int depth_;
    std::vector<std::size_t> offsets_;
};

} // namespace treewave
