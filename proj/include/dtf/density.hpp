#pragma once

#include <cstdint>
#include <vector>

#include "dtf/common.hpp"
#include "dtf/dataset.hpp"
#include "dtf/learn.hpp"
#include "dtf/tsp.hpp"

namespace dtf {

// Per-feature categorical base distribution fitted in closed form from
// counts with additive smoothing: probs[j][a] = (count + alpha) / (n + alpha*k_j).
// Counts are retained so serialization can round-trip exactly.
struct IndependentBase {
    std::vector<std::vector<int64_t>> counts; // ragged, row j has length k_j
    int64_t n = 0;
    double alpha = 0.0;
    std::vector<std::vector<double>> probs;

    void recompute_probs();
    void validate() const;
};

IndependentBase fit_base(const CategoricalDataset& data, double alpha);

struct FitMetadata {
    SplitCriterion criterion = SplitCriterion::glp;
    uint64_t seed = 0;
    int max_depth = 0;
    int min_samples_split = 2;
    int num_tsps = 0;
    std::vector<double> train_nll_trace; // entry t = mean NLL after t TSPs, unsmoothed
};

// An ordered composition of TSPs plus the fitted base distribution.
struct DtfModel {
    std::vector<Tsp> tsps; // tsps[0] is applied first in the forward direction
    IndependentBase base;
    std::vector<int> cardinalities;
    FitMetadata fit_metadata;

    void validate() const;
};

// Exact log-likelihood: z = forward through all TSPs, then the base log
// probability. Permutations carry no Jacobian term. Returns -infinity for a
// zero-probability category under alpha = 0.
double log_likelihood(const DtfModel& model, const Config& x);
std::vector<double> log_likelihood_batch(const DtfModel& model, const CategoricalDataset& data,
                                         ExecPolicy policy = ExecPolicy::parallel);

// Greedy stagewise fit: each TSP is learned on the previous stage's
// transformed data; the base is fitted on the final transform. The metadata
// records the unsmoothed per-stage train NLL trace (num_tsps + 1 entries,
// starting from the raw data's marginal NLL).
DtfModel fit_dtf(const CategoricalDataset& train, const FitConfig& cfg, double alpha);

struct SampleResult {
    CategoricalDataset x; // model samples
    CategoricalDataset z; // the latent rows they were inverted from
};

// Draws z i.i.d. per feature from the base, then applies TSP inverses in
// reverse composition order. Requires every base entry to be positive.
SampleResult sample_with_latent(const DtfModel& model, int64_t count, uint64_t seed);
CategoricalDataset sample(const DtfModel& model, int64_t count, uint64_t seed);

// Non-identity permutation entries plus two per node (split feature and value).
int64_t parameter_count(const DtfModel& model);

} // namespace dtf
