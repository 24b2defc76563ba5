#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dtf/common.hpp"
#include "dtf/counts.hpp"
#include "dtf/dataset.hpp"
#include "dtf/domain.hpp"
#include "dtf/permutation.hpp"

namespace dtf {

// One node of a tree-structured permutation. An input reaching the node is
// first permuted by node_perm; non-leaves then route it left when the
// permuted split-feature value lies in left_values (which are therefore
// stored in post-permutation coordinates).
struct TspNode {
    int node_id = -1; // breadth-first order, assigned by Tsp::finalize
    int depth = 0;
    int split_feature = -1; // -1 marks a leaf
    std::vector<int> left_values; // sorted; nonempty proper subset of the split domain
    IndependentPermutation node_perm;
    IndependentPermutation node_perm_inv; // cached by Tsp::finalize
    NodeDomain domain;
    std::unique_ptr<TspNode> left, right;

    // training-time state; empty outside of learning
    IndependentPermutation local_perm;  // the sorting permutation of the first pass
    CountMatrix local_counts_init;      // counts before local sorting
    CountMatrix local_counts;           // counts after local sorting

    bool is_leaf() const { return split_feature < 0; }
    bool routes_left(int permuted_split_value) const;
    std::unique_ptr<TspNode> clone() const;
};

struct Tsp {
    std::unique_ptr<TspNode> root;
    std::vector<int> cardinalities;
    int max_depth = 0;

    Tsp() = default;
    Tsp(Tsp&&) = default;
    Tsp& operator=(Tsp&&) = default;

    Tsp clone() const;

    // Assigns breadth-first node ids and caches inverse node permutations.
    // Must be called after any construction or mutation of the tree.
    void finalize();

    int node_count() const;
    std::vector<TspNode*> nodes_bfs();
    std::vector<const TspNode*> nodes_bfs() const;

    // Structural invariants: permutation rows are bijections of the right
    // width, child domains partition the parent domain on the split feature,
    // left_values is a nonempty proper subset. Throws std::invalid_argument.
    void validate_structure() const;
};

struct ForwardResult {
    Config z;
    int leaf_id = -1;
};

// Applies node permutations along the root-to-leaf path.
ForwardResult forward(const Tsp& t, const Config& x);

// Recovers the traversal path by routing on z's raw values (no permutations
// applied), then applies the inverted node permutations leaf-to-root.
Config inverse(const Tsp& t, const Config& z);

CategoricalDataset forward_dataset(const Tsp& t, const CategoricalDataset& data,
                                   ExecPolicy policy = ExecPolicy::parallel);
std::vector<int> forward_leaf_ids(const Tsp& t, const CategoricalDataset& data);

struct InvertibilityFinding {
    int node_id = -1;
    int feature = -1;
    std::string detail;
};

struct InvertibilityReport {
    bool pass = true;
    std::vector<InvertibilityFinding> findings;
};

// Audits, per node and feature, whether node_perm maps the node domain onto
// itself. Diagnostic: never throws on a failing tree.
InvertibilityReport check_invertibility(const Tsp& t);

// True iff forward over every configuration is a permutation of the
// configuration space. Guarded: throws GuardExceeded when the space
// exceeds 10^6 configurations.
bool check_bijection_exhaustive(const Tsp& t);

// Per-node counts of forward-transformed data, indexed by node_id:
// counts(j,a) over transformed rows that lie in the node's domain.
std::vector<CountMatrix> node_counts(const Tsp& t, const CategoricalDataset& data);

} // namespace dtf
