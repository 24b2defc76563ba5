#pragma once

#include <vector>

#include "dtf/dataset.hpp"
#include "dtf/learn.hpp"
#include "dtf/rng.hpp"
#include "dtf/tsp.hpp"

namespace dtf::testing {

// uniform random dataset
inline CategoricalDataset random_dataset(Rng& rng, std::vector<int> cards, int64_t n) {
    CategoricalDataset data = CategoricalDataset::with_cardinalities(std::move(cards));
    std::vector<int> row(data.d);
    for (int64_t i = 0; i < n; ++i) {
        for (int j = 0; j < data.d; ++j)
            row[j] = static_cast<int>(rng.next_below(static_cast<uint64_t>(data.cardinalities[j])));
        data.push_row(row);
    }
    return data;
}

// dataset with pairwise-dependent adjacent features: feature j copies a
// noisy function of feature j-1, giving structure for the learner to find
inline CategoricalDataset correlated_dataset(Rng& rng, std::vector<int> cards, int64_t n,
                                             double noise = 0.2) {
    CategoricalDataset data = CategoricalDataset::with_cardinalities(std::move(cards));
    std::vector<int> row(data.d);
    for (int64_t i = 0; i < n; ++i) {
        row[0] = static_cast<int>(rng.next_below(static_cast<uint64_t>(data.cardinalities[0])));
        for (int j = 1; j < data.d; ++j) {
            const int k = data.cardinalities[j];
            if (rng.next_double() < noise)
                row[j] = static_cast<int>(rng.next_below(static_cast<uint64_t>(k)));
            else
                row[j] = row[j - 1] % k;
        }
        data.push_row(row);
    }
    return data;
}

inline IndependentPermutation random_domain_perm(Rng& rng, const NodeDomain& domain,
                                                 std::span<const int> cards) {
    IndependentPermutation p = IndependentPermutation::identity(cards);
    for (int j = 0; j < domain.dims(); ++j) {
        std::vector<int> image = domain.per_feature[j];
        for (size_t i = image.size(); i > 1; --i)
            std::swap(image[i - 1], image[rng.next_below(i)]);
        for (size_t t = 0; t < image.size(); ++t) p.maps[j][domain.per_feature[j][t]] = image[t];
    }
    return p;
}

// A random valid TSP: random identity-permutation structure over random
// splits, random domain-respecting local permutations, then the
// tree-equivalence pass. Valid by construction.
inline Tsp random_valid_tsp(Rng& rng, const std::vector<int>& cards, int max_depth) {
    Tsp t;
    t.cardinalities = cards;
    t.max_depth = max_depth;
    t.root = std::make_unique<TspNode>();
    t.root->domain = NodeDomain::full(cards);
    t.root->node_perm = IndependentPermutation::identity(cards);

    const int kmax = *std::max_element(cards.begin(), cards.end());
    struct Grow {
        Rng& rng;
        const std::vector<int>& cards;
        int kmax;
        int max_depth;
        void operator()(TspNode& node) {
            node.local_counts_init = CountMatrix::zeros(static_cast<int>(cards.size()), kmax);
            if (node.depth >= max_depth || rng.next_double() < 0.3) return;
            std::vector<int> splittable;
            for (int j = 0; j < node.domain.dims(); ++j)
                if (node.domain.per_feature[j].size() >= 2) splittable.push_back(j);
            if (splittable.empty()) return;
            const int s = splittable[rng.next_below(splittable.size())];
            const auto& dom = node.domain.per_feature[s];
            node.split_feature = s;
            node.left_values = {dom[rng.next_below(dom.size())]};
            for (auto* childp : {&node.left, &node.right}) {
                *childp = std::make_unique<TspNode>();
                (*childp)->depth = node.depth + 1;
                (*childp)->node_perm = IndependentPermutation::identity(cards);
                (*childp)->domain = node.domain;
            }
            node.left->domain.per_feature[s] = node.left_values;
            auto& rest = node.right->domain.per_feature[s];
            rest.clear();
            for (int v : dom)
                if (v != node.left_values[0]) rest.push_back(v);
            (*this)(*node.left);
            (*this)(*node.right);
        }
    };
    Grow grow{rng, cards, kmax, max_depth};
    grow(*t.root);
    t.finalize();
    for (TspNode* node : t.nodes_bfs())
        node->local_perm = random_domain_perm(rng, node->domain, cards);
    construct_equivalent_tree(t);
    return t;
}

} // namespace dtf::testing
