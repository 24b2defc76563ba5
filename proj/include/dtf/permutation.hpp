#pragma once

#include <span>
#include <vector>

#include "dtf/dataset.hpp"

namespace dtf {

// d independent per-feature bijections, stored as dense lookup vectors:
// maps[j][a] is the image of category a on feature j. Row j has length k_j.
struct IndependentPermutation {
    std::vector<std::vector<int>> maps;

    int dims() const { return static_cast<int>(maps.size()); }
    bool empty() const { return maps.empty(); }

    static IndependentPermutation identity(std::span<const int> cardinalities);

    bool is_identity() const;

    // each row must be a bijection of {0..k_j-1}; throws std::invalid_argument
    void validate() const;
};

// output[j] = p.maps[j][x[j]]
Config apply_permutation(const IndependentPermutation& p, const Config& x);
void apply_permutation_in_place(const IndependentPermutation& p, std::span<int> x);

// result(x) = outer(inner(x))
IndependentPermutation compose(const IndependentPermutation& outer,
                               const IndependentPermutation& inner);

IndependentPermutation invert(const IndependentPermutation& p);

} // namespace dtf
