#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dtf {

// One configuration: a length-d vector of category indices.
using Config = std::vector<int>;

// n x d matrix of category indices with per-feature cardinalities.
// Stored row-major. Immutable by convention once built.
struct CategoricalDataset {
    int64_t n = 0;
    int d = 0;
    std::vector<int> cardinalities;        // size d, cardinalities[j] >= 1
    std::vector<int> values;               // size n*d, row-major
    std::vector<std::string> column_names; // empty, or size d

    int at(int64_t i, int j) const { return values[static_cast<size_t>(i) * d + j]; }
    int& at(int64_t i, int j) { return values[static_cast<size_t>(i) * d + j]; }
    std::span<const int> row(int64_t i) const {
        return {values.data() + static_cast<size_t>(i) * d, static_cast<size_t>(d)};
    }
    Config row_config(int64_t i) const {
        auto r = row(i);
        return Config(r.begin(), r.end());
    }

    static CategoricalDataset with_cardinalities(std::vector<int> cards);
    void push_row(std::span<const int> r);

    // checks 0 <= values[i][j] < cardinalities[j], d >= 1; throws std::invalid_argument
    void validate() const;
};

} // namespace dtf
