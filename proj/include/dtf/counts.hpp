#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtf/dataset.hpp"
#include "dtf/permutation.hpp"

namespace dtf {

// d x kmax matrix of per-feature category counts. Entries at a >= k_j are
// structurally zero; kmax = max_j k_j so heterogeneous cardinalities share
// one rectangular layout.
struct CountMatrix {
    int d = 0;
    int kmax = 0;
    std::vector<int64_t> c; // row-major d*kmax

    static CountMatrix zeros(int d, int kmax);

    int64_t at(int j, int a) const { return c[static_cast<size_t>(j) * kmax + a]; }
    int64_t& at(int j, int a) { return c[static_cast<size_t>(j) * kmax + a]; }

    int64_t row_sum(int j) const;

    CountMatrix& operator+=(const CountMatrix& other);
    friend CountMatrix operator+(CountMatrix lhs, const CountMatrix& rhs) {
        lhs += rhs;
        return lhs;
    }
    bool operator==(const CountMatrix&) const = default;
};

// Counts move with their categories: result(j, p.maps[j][a]) = c(j, a).
CountMatrix permute_counts(const IndependentPermutation& p, const CountMatrix& counts);

// Per-feature category counts of a dataset (optionally over a row subset).
CountMatrix marginal_counts(const CategoricalDataset& data);
CountMatrix marginal_counts(const CategoricalDataset& data, std::span<const int64_t> rows);

// Empirical NLL of one count row in nats, summed over samples:
// -sum_a c_a * ln(c_a / total). Zero rows contribute nothing.
double row_nll(std::span<const int64_t> row_counts);

// Mean per-sample NLL of the empirical independent fit, i.e. the sum of
// feature-wise empirical entropies in nats. Zero for n = 0.
double mean_marginal_nll(const CategoricalDataset& data);

} // namespace dtf
