#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtf/dataset.hpp"

namespace dtf {

// Per-column label <-> code mapping for string-categorical CSV columns.
// Integer columns pass through and keep an empty label list.
struct EncodingMap {
    std::vector<std::vector<std::string>> labels;
};

enum class HeaderMode { none, present, detect };

struct CsvLoadOptions {
    HeaderMode header = HeaderMode::detect;
    std::vector<int> cardinalities; // optional schema override; empty = infer
};

struct LoadedCsv {
    CategoricalDataset data;
    EncodingMap encoding;
};

// Rectangular comma-separated UTF-8 file. Integer columns pass through
// (cardinality = max value + 1); string columns are ordinally encoded by
// first appearance. Throws on ragged rows, empty files and schema/value
// mismatches.
LoadedCsv load_csv(const std::string& path, const CsvLoadOptions& options = {});

// Integer cells, no header.
void save_csv(const std::string& path, const CategoricalDataset& data);

struct TrainTest {
    CategoricalDataset train, test;
};

// Seeded shuffle then split; the two parts are disjoint and exhaustive.
TrainTest split_train_test(const CategoricalDataset& data, double fraction, uint64_t seed);

// Mixture of 8 Gaussians with means equally spaced on a circle of radius 4
// and component std 0.25, each coordinate discretized into 91 equal-width
// bins over [-6, 6]. Returns an 80/20 train/test split of n samples.
TrainTest gen_eight_gaussian(int64_t n, uint64_t seed);

inline constexpr int kEightGaussianBins = 91;
inline constexpr int64_t kEightGaussianDefaultN = 12800;

// Gaussian copula over a cycle graph with binary marginals.
struct CopulaSpec {
    int d = 4;
    double target_total_correlation = 100.0;
    std::vector<double> bernoulli_p = {0.5, 0.3, 0.5, 0.2};
    int64_t n = 10000;
    uint64_t seed = 0;
    double train_fraction = 0.8;

    void validate() const;
};

// Samples the cycle-graph Gaussian whose correlation matrix attains the
// target total correlation, standardizes each feature, pushes it through the
// standard normal CDF and applies the inverse Bernoulli CDF per dimension.
TrainTest gen_copula(const CopulaSpec& spec);

// Total correlation -0.5*ln(det R) of the cycle-graph Gaussian, as a
// function of the smallest precision eigenvalue eps = 1 - 2w in (0, 1].
double copula_total_correlation(int d, double eps);

// Solves copula_total_correlation(d, eps) = target by bisection on ln(eps).
// Throws when the target is not attainable for the cycle family.
double solve_copula_eps(int d, double target);

} // namespace dtf
