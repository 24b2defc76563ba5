#pragma once

#include <span>
#include <vector>

#include "dtf/permutation.hpp"

namespace dtf {

// The set of category values each feature can take at a tree node,
// stored as sorted vectors. The root domain is the full configuration
// space; splits shrink only the split feature's set.
struct NodeDomain {
    std::vector<std::vector<int>> per_feature;

    int dims() const { return static_cast<int>(per_feature.size()); }

    static NodeDomain full(std::span<const int> cardinalities);

    bool contains(int feature, int value) const;

    // every per-feature set nonempty, sorted, without duplicates
    void validate() const;

    // image of the domain under an independent permutation, re-sorted
    NodeDomain mapped(const IndependentPermutation& p) const;

    bool operator==(const NodeDomain&) const = default;
};

} // namespace dtf
