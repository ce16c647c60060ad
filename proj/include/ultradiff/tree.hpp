#pragma once
// Explicit finite realization of an ultrametric space: a rooted tree whose
// leaves are the points.  The distance between two leaves depends only on the
// height of their lowest common ancestor, and the "ball of a pair" is that
// ancestor's full subtree — exactly the data the brute-force oracle needs,
// including inhomogeneous (mixed-branching) shapes.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hierarchy.hpp"

namespace ultradiff {

// Nested shape description: a node is a list of child shapes; no children
// means a leaf.  uniform(p, L) builds the full p-ary shape of depth L.
struct TreeSpec {
    std::vector<TreeSpec> children;
    bool is_leaf() const { return children.empty(); }
    static TreeSpec leaf() { return TreeSpec{}; }
    static TreeSpec uniform(long branch, std::size_t depth) {
        if (branch < 1) throw std::invalid_argument("TreeSpec: branch must be >= 1");
        TreeSpec s;
        if (depth == 0) return s;
        s.children.reserve(static_cast<std::size_t>(branch));
        for (long c = 0; c < branch; ++c)
            s.children.push_back(uniform(branch, depth - 1));
        return s;
    }
};

class FiniteTree {
public:
    struct Node {
        std::size_t height;      // 0 = leaf level, L = root
        std::size_t leaf_begin;  // contiguous DFS leaf range of the subtree
        std::size_t leaf_end;
    };

    FiniteTree(const TreeSpec& spec, std::vector<double> level_distance) {
        if (spec.is_leaf())
            throw std::invalid_argument("FiniteTree: root has no children "
                                        "(need at least one internal level)");
        std::size_t next = 0;
        collect(spec, 0, next, nodes_, leaf_depth_);
        n_leaves_ = next;
        if (n_leaves_ == 0) throw std::invalid_argument("FiniteTree: no leaves");
        levels_ = leaf_depth_;

        if (level_distance.empty()) {
            level_distance.resize(levels_);
            for (std::size_t h = 1; h <= levels_; ++h)
                level_distance[h - 1] = static_cast<double>(h);
        }
        if (level_distance.size() < levels_)
            throw std::invalid_argument("FiniteTree: level_distance has " +
                                        std::to_string(level_distance.size()) +
                                        " entries, tree depth is " + std::to_string(levels_));
        level_distance.resize(levels_);
        double prev = 0.0;
        for (std::size_t h = 0; h < levels_; ++h) {
            if (!(level_distance[h] > prev))
                throw std::invalid_argument(
                    "FiniteTree: level_distance not strictly increasing at level " +
                    std::to_string(h + 1));
            prev = level_distance[h];
        }
        d_ = std::move(level_distance);

        // per-leaf subtree ranges by ancestor height (each pair covered once)
        range_.assign((levels_ + 1) * n_leaves_, {0, 0});
        for (const Node& nd : nodes_)
            for (std::size_t leaf = nd.leaf_begin; leaf < nd.leaf_end; ++leaf)
                range_[nd.height * n_leaves_ + leaf] = {nd.leaf_begin, nd.leaf_end};
        for (std::size_t leaf = 0; leaf < n_leaves_; ++leaf)
            range_[0 * n_leaves_ + leaf] = {leaf, leaf + 1};
    }

    std::size_t levels() const { return levels_; }
    std::size_t leaf_count() const { return n_leaves_; }
    std::size_t center() const { return 0; }
    const std::vector<Node>& nodes() const { return nodes_; }

    // d_h of the induced radial data; h in 1..levels().
    double level_distance(std::size_t h) const {
        if (h == 0) return 0.0;
        check_height(h);
        return d_[h - 1];
    }

    // Leaf range [begin, end) of the height-h subtree containing `leaf`.
    std::pair<std::size_t, std::size_t> ancestor_range(std::size_t leaf,
                                                       std::size_t h) const {
        check_leaf(leaf);
        check_height(h);
        return range_[h * n_leaves_ + leaf];
    }
    // Leaf population of that subtree.
    std::size_t ancestor_count(std::size_t leaf, std::size_t h) const {
        auto [b, e] = ancestor_range(leaf, h);
        return e - b;
    }

    // Height of the lowest common ancestor; 0 iff x == y.
    std::size_t lca_level(std::size_t x, std::size_t y) const {
        check_leaf(x);
        check_leaf(y);
        for (std::size_t h = 0; h <= levels_; ++h) {
            const auto& r = range_[h * n_leaves_ + x];
            if (y >= r.first && y < r.second) return h;
        }
        throw std::logic_error("FiniteTree: leaves share no ancestor");  // unreachable
    }

    double distance(std::size_t x, std::size_t y) const {
        const std::size_t h = lca_level(x, y);
        return h == 0 ? 0.0 : d_[h - 1];
    }

    // Leaf count of the smallest subtree containing both points (x != y).
    std::size_t pair_ball_count(std::size_t x, std::size_t y) const {
        const std::size_t h = lca_level(x, y);
        if (h == 0)
            throw std::invalid_argument("pair_ball_count: identical leaves");
        return ancestor_count(x, h);
    }

    // Sphere index of a leaf relative to the center (leftmost leaf).
    std::size_t sphere_index(std::size_t leaf) const { return lca_level(leaf, 0); }

    // Radial data induced at the center: N_h = population of the ball B_h.
    std::vector<double> induced_N() const {
        std::vector<double> N(levels_);
        for (std::size_t h = 1; h <= levels_; ++h)
            N[h - 1] = static_cast<double>(ancestor_count(0, h));
        return N;
    }
    std::vector<double> induced_d() const { return d_; }

    UltrametricHierarchy induced_hierarchy() const {
        return UltrametricHierarchy(induced_d(), induced_N(), AsymptoticParams{},
                                    /*finite_space=*/true);
    }

    // True when every leaf sees the same ball populations at every height
    // (fully regular tree); mixed-branching trees return false.
    bool level_homogeneous() const {
        for (std::size_t h = 1; h <= levels_; ++h) {
            const std::size_t ref = ancestor_count(0, h);
            for (std::size_t leaf = 1; leaf < n_leaves_; ++leaf)
                if (ancestor_count(leaf, h) != ref) return false;
        }
        return true;
    }

private:
    static void collect(const TreeSpec& spec, std::size_t depth, std::size_t& next,
                        std::vector<Node>& nodes, std::size_t& leaf_depth) {
        if (spec.is_leaf()) {
            if (leaf_depth == 0) leaf_depth = depth;
            else if (leaf_depth != depth)
                throw std::invalid_argument(
                    "FiniteTree: leaves at unequal depths (" + std::to_string(leaf_depth) +
                    " vs " + std::to_string(depth) + "); spheres undefined");
            ++next;
            return;
        }
        const std::size_t begin = next;
        for (const TreeSpec& c : spec.children)
            collect(c, depth + 1, next, nodes, leaf_depth);
        // height filled after the leaf depth is known; store depth for now
        nodes.push_back({depth, begin, next});
        if (depth == 0) {  // root closes the recursion: convert depths to heights
            for (Node& nd : nodes) nd.height = leaf_depth - nd.height;
        }
    }

    void check_leaf(std::size_t leaf) const {
        if (leaf >= n_leaves_)
            throw std::out_of_range("FiniteTree: leaf index " + std::to_string(leaf));
    }
    void check_height(std::size_t h) const {
        if (h > levels_)
            throw std::out_of_range("FiniteTree: height " + std::to_string(h));
    }

    std::vector<Node> nodes_;
    std::vector<double> d_;
    std::vector<std::pair<std::size_t, std::size_t>> range_;
    std::size_t n_leaves_ = 0, levels_ = 0, leaf_depth_ = 0;
};

inline FiniteTree make_tree(const TreeSpec& spec,
                            const std::vector<double>& level_distance) {
    return FiniteTree(spec, level_distance);
}

inline FiniteTree make_uniform_tree(long branch, std::size_t depth,
                                    const std::vector<double>& level_distance = {}) {
    if (branch < 2)
        throw std::invalid_argument("make_uniform_tree: branch must be >= 2");
    if (depth == 0)
        throw std::invalid_argument("make_uniform_tree: depth must be >= 1");
    return FiniteTree(TreeSpec::uniform(branch, depth), level_distance);
}

}  // namespace ultradiff
