#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dtf/common.hpp"
#include "dtf/counts.hpp"
#include "dtf/dataset.hpp"
#include "dtf/domain.hpp"
#include "dtf/rng.hpp"
#include "dtf/tsp.hpp"

namespace dtf {

enum class SplitCriterion { glp, random_split };

struct FitConfig {
    int max_depth = 2;          // M
    int min_samples_split = 2;  // n_min
    SplitCriterion criterion = SplitCriterion::glp;
    uint64_t seed = 0;
    int num_tsps = 1;           // T; 0 fits a pure base model
    bool parallel = true;       // GLP candidate scoring policy

    void validate() const;
};

struct SplitCandidate {
    int feature = -1;
    std::vector<int> left_values; // singleton under both built-in criteria
    double score = 0.0;           // -MinPermNLL; higher is better
};

struct FoundSplit {
    SplitCandidate candidate;
    std::vector<int64_t> left_rows, right_rows;
    NodeDomain left_domain, right_domain;
};

// Minimum permuted negative log likelihood of a candidate split, in nats,
// summed over samples. For every feature except the split feature the left
// and right count rows are sorted ascending over the node domain and added
// rank to rank (the optimal independent permutation); the split feature
// keeps the identity permutation and contributes the NLL of the combined
// row as-is.
double min_perm_nll(const CountMatrix& left, const CountMatrix& right, int split_feature,
                    const NodeDomain& domain);

// GLP enumerates all (feature, single left value) candidates and returns the
// argmax of -MinPermNLL with a deterministic tie-break (lowest feature, then
// lowest value). The random criterion draws a splittable feature uniformly
// and a value uniformly from its domain. Returns nullopt when no feature has
// a domain of size >= 2.
std::optional<FoundSplit> find_best_split(const CategoricalDataset& data,
                                          std::span<const int64_t> rows,
                                          const NodeDomain& domain, SplitCriterion criterion,
                                          Rng& rng,
                                          ExecPolicy policy = ExecPolicy::parallel);

// Builds the tree structure: all node permutations identity, recursion while
// the node holds at least min_samples_split rows, depth < max_depth and a
// valid split exists. Leaves store their per-dimension data counts.
Tsp construct_tree(const CategoricalDataset& data, const FitConfig& cfg);
Tsp construct_tree(const CategoricalDataset& data, const FitConfig& cfg, Rng& rng);

// Sorting permutation for one count row: ascending over the domain with
// stable ties (equal counts keep category order), identity off the domain.
std::vector<int> sort1d_permutation(std::span<const int64_t> counts,
                                    std::span<const int> domain_values, int cardinality);

// First pass: bottom-up, combines child counts, learns each node's local
// sorting permutation and the sorted local counts.
void learn_local_permutations(TspNode& node, std::span<const int> cardinalities);
void learn_local_permutations(Tsp& t);

// Second pass: top-down conjugation of the local permutations into valid
// node permutations, rewriting split values and domains so the result is a
// tree-equivalent, invertible TSP.
void construct_equivalent_tree(TspNode& node, const IndependentPermutation& ancestor_perm);
void construct_equivalent_tree(Tsp& t);

struct FitTspResult {
    Tsp tsp;                          // the learned, invertible TSP
    Tsp prepass;                      // identity-permutation structure tree
    CategoricalDataset transformed;   // forward of the training data
    std::vector<int> prepass_leaf_ids;
};

FitTspResult fit_tsp(const CategoricalDataset& data, const FitConfig& cfg);
FitTspResult fit_tsp(const CategoricalDataset& data, const FitConfig& cfg, Rng& rng);

// True iff a single global independent permutation aligns every node's
// counts to ascending order on its domain. Uses the order induced by the
// root's stably-sorted counts.
bool check_rank_consistency(const Tsp& t, const CategoricalDataset& data);

} // namespace dtf
