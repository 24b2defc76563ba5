#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtf/common.hpp"
#include "dtf/dataset.hpp"
#include "dtf/tsp.hpp"

namespace dtf {

// Lexicographic enumeration of the configuration space (first feature most
// significant). Exhaustive operations are guarded at 10^6 configurations.
struct ConfigSpace {
    std::vector<int> cardinalities;

    static constexpr uint64_t kExhaustiveGuard = 1000000;

    explicit ConfigSpace(std::vector<int> cards) : cardinalities(std::move(cards)) {}

    uint64_t size() const;
    uint64_t checked_size() const; // throws GuardExceeded above the guard
    Config config_at(uint64_t index) const;
    uint64_t index_of(const Config& x) const;
};

// Number of assignments of domain-respecting independent permutations over
// all nodes of a tree, saturating instead of overflowing.
uint64_t tree_assignment_count(const Tsp& structure);

// Enumerates every assignment of domain-respecting independent permutations
// to every node of the given identity-permutation structure tree, pushes each
// through the tree-equivalence construction, and returns the minimum mean
// train NLL (nats, unsmoothed). Guarded at 10^5 assignments.
double brute_force_optimal_nll(const Tsp& structure, const CategoricalDataset& data,
                               ExecPolicy policy = ExecPolicy::parallel);

// A TSP that transposes two configurations differing in exactly one feature
// and fixes every other configuration: a spine of splits pins each
// non-differing feature's value and a leaf carries the transposition.
Tsp single_feature_swap_tsp(const Config& a, const Config& b, std::span<const int> cardinalities);

// Ordering of all configurations where consecutive entries differ in exactly
// one feature, built by the inductive construction (fix the leading feature,
// recurse, reverse alternate blocks).
std::vector<Config> snake_path(std::span<const int> cardinalities);

// Decomposes a target permutation of the configuration space (given as
// lexicographic index -> lexicographic index) into snake-adjacent
// transpositions, one single-feature-swap TSP each. Composing the returned
// TSPs in order (index 0 first) realizes the target exactly. Guarded at 16
// configurations.
std::vector<Tsp> realize_arbitrary_permutation(const std::vector<uint64_t>& target,
                                               std::span<const int> cardinalities);

} // namespace dtf
