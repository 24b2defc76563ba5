#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dtf/learn.hpp"

namespace dtf {

void FitConfig::validate() const {
    if (max_depth < 0) throw std::invalid_argument("fit config: max_depth must be >= 0");
    if (min_samples_split < 2)
        throw std::invalid_argument("fit config: min_samples_split must be >= 2");
    if (num_tsps < 0) throw std::invalid_argument("fit config: num_tsps must be >= 0");
}

double min_perm_nll(const CountMatrix& left, const CountMatrix& right, int split_feature,
                    const NodeDomain& domain) {
    if (left.d != right.d || left.kmax != right.kmax)
        throw std::invalid_argument("min_perm_nll: count shape mismatch");
    double total = 0.0;
    std::vector<int64_t> lv, rv, merged;
    for (int j = 0; j < left.d; ++j) {
        const auto& dom = domain.per_feature[j];
        merged.resize(dom.size());
        if (j == split_feature) {
            for (size_t t = 0; t < dom.size(); ++t)
                merged[t] = left.at(j, dom[t]) + right.at(j, dom[t]);
        } else {
            lv.resize(dom.size());
            rv.resize(dom.size());
            for (size_t t = 0; t < dom.size(); ++t) {
                lv[t] = left.at(j, dom[t]);
                rv[t] = right.at(j, dom[t]);
            }
            std::sort(lv.begin(), lv.end());
            std::sort(rv.begin(), rv.end());
            for (size_t t = 0; t < dom.size(); ++t) merged[t] = lv[t] + rv[t];
        }
        total += row_nll(merged);
    }
    return total;
}

namespace {

NodeDomain make_child_domain(const NodeDomain& parent, int split_feature,
                             const std::vector<int>& left_values, bool is_left) {
    NodeDomain out = parent;
    if (is_left) {
        out.per_feature[split_feature] = left_values;
    } else {
        std::vector<int> rest;
        const auto& ds = parent.per_feature[split_feature];
        std::set_difference(ds.begin(), ds.end(), left_values.begin(), left_values.end(),
                            std::back_inserter(rest));
        out.per_feature[split_feature] = std::move(rest);
    }
    return out;
}

FoundSplit split_rows(const CategoricalDataset& data, std::span<const int64_t> rows,
                      const NodeDomain& domain, SplitCandidate candidate) {
    FoundSplit out;
    const int s = candidate.feature;
    for (int64_t i : rows) {
        const bool goes_left = std::binary_search(candidate.left_values.begin(),
                                                  candidate.left_values.end(), data.at(i, s));
        (goes_left ? out.left_rows : out.right_rows).push_back(i);
    }
    out.left_domain = make_child_domain(domain, s, candidate.left_values, true);
    out.right_domain = make_child_domain(domain, s, candidate.left_values, false);
    out.candidate = std::move(candidate);
    return out;
}

} // namespace

std::optional<FoundSplit> find_best_split(const CategoricalDataset& data,
                                          std::span<const int64_t> rows,
                                          const NodeDomain& domain, SplitCriterion criterion,
                                          Rng& rng, ExecPolicy policy) {
    std::vector<int> splittable;
    for (int j = 0; j < data.d; ++j)
        if (domain.per_feature[j].size() >= 2) splittable.push_back(j);
    if (splittable.empty()) return std::nullopt;

    if (criterion == SplitCriterion::random_split) {
        const int s = splittable[rng.next_below(splittable.size())];
        const auto& ds = domain.per_feature[s];
        const int a = ds[rng.next_below(ds.size())];
        SplitCandidate cand;
        cand.feature = s;
        cand.left_values = {a};
        cand.score = 0.0;
        return split_rows(data, rows, domain, std::move(cand));
    }

    // GLP: counts once per node, then per-candidate left counts by value
    const int kmax = *std::max_element(data.cardinalities.begin(), data.cardinalities.end());
    const CountMatrix total = marginal_counts(data, rows);

    struct Candidate {
        int s;
        int a;
        int tensor_index; // into by_value matrices
    };
    std::vector<Candidate> candidates;
    std::vector<CountMatrix> by_value; // left counts for each (s, a)
    std::vector<int> tensor_base(data.d, -1);
    for (int s : splittable) {
        tensor_base[s] = static_cast<int>(by_value.size());
        const auto& ds = domain.per_feature[s];
        for (size_t t = 0; t < ds.size(); ++t) {
            candidates.push_back({s, ds[t], tensor_base[s] + static_cast<int>(t)});
            by_value.push_back(CountMatrix::zeros(data.d, kmax));
        }
    }
    // by_value index of (s, a): tensor_base[s] + position of a in the domain
    std::vector<std::vector<int>> value_pos(data.d);
    for (int s : splittable) {
        value_pos[s].assign(data.cardinalities[s], -1);
        const auto& ds = domain.per_feature[s];
        for (size_t t = 0; t < ds.size(); ++t) value_pos[s][ds[t]] = static_cast<int>(t);
    }
    for (int64_t i : rows) {
        const int* row = data.values.data() + static_cast<size_t>(i) * data.d;
        for (int s : splittable) {
            CountMatrix& m = by_value[tensor_base[s] + value_pos[s][row[s]]];
            for (int j = 0; j < data.d; ++j) ++m.at(j, row[j]);
        }
    }

    const int num_candidates = static_cast<int>(candidates.size());
    std::vector<double> scores(num_candidates);
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (int ci = 0; ci < num_candidates; ++ci) {
            const Candidate& cand = candidates[ci];
            const CountMatrix& left = by_value[cand.tensor_index];
            CountMatrix right = total;
            for (size_t idx = 0; idx < right.c.size(); ++idx) right.c[idx] -= left.c[idx];
            scores[ci] = -min_perm_nll(left, right, cand.s, domain);
        }
    } else {
        for (int ci = 0; ci < num_candidates; ++ci) {
            const Candidate& cand = candidates[ci];
            const CountMatrix& left = by_value[cand.tensor_index];
            CountMatrix right = total;
            for (size_t idx = 0; idx < right.c.size(); ++idx) right.c[idx] -= left.c[idx];
            scores[ci] = -min_perm_nll(left, right, cand.s, domain);
        }
    }

    // candidates are ordered by (feature, value); first strict maximum
    // realizes the lowest-s, lowest-a tie-break independent of schedule
    int best = 0;
    for (int ci = 1; ci < num_candidates; ++ci)
        if (scores[ci] > scores[best]) best = ci;

    SplitCandidate cand;
    cand.feature = candidates[best].s;
    cand.left_values = {candidates[best].a};
    cand.score = scores[best];
    return split_rows(data, rows, domain, std::move(cand));
}

namespace {

struct TreeBuilder {
    const CategoricalDataset& data;
    const FitConfig& cfg;
    Rng& rng;

    void build(TspNode& node, std::vector<int64_t>& rows) {
        if (static_cast<int64_t>(rows.size()) >= cfg.min_samples_split &&
            node.depth < cfg.max_depth) {
            auto found =
                find_best_split(data, rows, node.domain, cfg.criterion, rng,
                                cfg.parallel ? ExecPolicy::parallel : ExecPolicy::serial);
            if (found) {
                node.split_feature = found->candidate.feature;
                node.left_values = found->candidate.left_values;
                node.left = std::make_unique<TspNode>();
                node.right = std::make_unique<TspNode>();
                for (auto* child : {node.left.get(), node.right.get()}) {
                    child->depth = node.depth + 1;
                    child->node_perm = IndependentPermutation::identity(data.cardinalities);
                }
                node.left->domain = std::move(found->left_domain);
                node.right->domain = std::move(found->right_domain);
                rows.clear();
                rows.shrink_to_fit();
                build(*node.left, found->left_rows);
                build(*node.right, found->right_rows);
                return;
            }
        }
        node.local_counts_init = marginal_counts(data, rows);
    }
};

} // namespace

Tsp construct_tree(const CategoricalDataset& data, const FitConfig& cfg) {
    Rng rng(cfg.seed);
    return construct_tree(data, cfg, rng);
}

Tsp construct_tree(const CategoricalDataset& data, const FitConfig& cfg, Rng& rng) {
    cfg.validate();
    data.validate();
    if (data.n < 1) throw std::invalid_argument("construct_tree: empty dataset");

    Tsp t;
    t.cardinalities = data.cardinalities;
    t.max_depth = cfg.max_depth;
    t.root = std::make_unique<TspNode>();
    t.root->depth = 0;
    t.root->domain = NodeDomain::full(data.cardinalities);
    t.root->node_perm = IndependentPermutation::identity(data.cardinalities);

    std::vector<int64_t> all_rows(data.n);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    TreeBuilder builder{data, cfg, rng};
    builder.build(*t.root, all_rows);
    t.finalize();
    return t;
}

std::vector<int> sort1d_permutation(std::span<const int64_t> counts,
                                    std::span<const int> domain_values, int cardinality) {
    std::vector<int> map(cardinality);
    std::iota(map.begin(), map.end(), 0);
    std::vector<int> order(domain_values.begin(), domain_values.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return counts[a] < counts[b]; });
    // the category ranked t-th lowest moves to the t-th smallest domain slot
    for (size_t t = 0; t < order.size(); ++t) map[order[t]] = domain_values[t];
    return map;
}

void learn_local_permutations(TspNode& node, std::span<const int> cardinalities) {
    if (!node.is_leaf()) {
        learn_local_permutations(*node.left, cardinalities);
        learn_local_permutations(*node.right, cardinalities);
        node.local_counts_init = node.left->local_counts + node.right->local_counts;
    }
    node.local_perm.maps.resize(cardinalities.size());
    for (size_t j = 0; j < cardinalities.size(); ++j) {
        std::span<const int64_t> row(node.local_counts_init.c.data() +
                                         static_cast<size_t>(j) * node.local_counts_init.kmax,
                                     node.local_counts_init.kmax);
        node.local_perm.maps[j] =
            sort1d_permutation(row, node.domain.per_feature[j], cardinalities[j]);
    }
    node.local_counts = permute_counts(node.local_perm, node.local_counts_init);
}

void learn_local_permutations(Tsp& t) { learn_local_permutations(*t.root, t.cardinalities); }

void construct_equivalent_tree(TspNode& node, const IndependentPermutation& ancestor_perm) {
    node.node_perm =
        compose(ancestor_perm, compose(node.local_perm, invert(ancestor_perm)));
    if (!node.is_leaf()) {
        // split values move with the local permutation first, then into the
        // ancestors' coordinates; the child ancestor telescopes to anc . local
        const int s = node.split_feature;
        std::vector<int> new_left;
        new_left.reserve(node.left_values.size());
        for (int v : node.left_values)
            new_left.push_back(ancestor_perm.maps[s][node.local_perm.maps[s][v]]);
        std::sort(new_left.begin(), new_left.end());
        node.left_values = std::move(new_left);

        const IndependentPermutation child_anc = compose(node.node_perm, ancestor_perm);
        node.domain = node.domain.mapped(ancestor_perm);
        construct_equivalent_tree(*node.left, child_anc);
        construct_equivalent_tree(*node.right, child_anc);
    } else {
        node.domain = node.domain.mapped(ancestor_perm);
    }
}

void construct_equivalent_tree(Tsp& t) {
    construct_equivalent_tree(*t.root, IndependentPermutation::identity(t.cardinalities));
    t.finalize();
}

FitTspResult fit_tsp(const CategoricalDataset& data, const FitConfig& cfg) {
    Rng rng(cfg.seed);
    return fit_tsp(data, cfg, rng);
}

FitTspResult fit_tsp(const CategoricalDataset& data, const FitConfig& cfg, Rng& rng) {
    FitTspResult out;
    out.tsp = construct_tree(data, cfg, rng);
    out.prepass = out.tsp.clone();
    learn_local_permutations(out.tsp);
    construct_equivalent_tree(out.tsp);
    out.transformed = forward_dataset(out.tsp, data,
                                      cfg.parallel ? ExecPolicy::parallel : ExecPolicy::serial);
    out.prepass_leaf_ids = forward_leaf_ids(out.prepass, data);
    return out;
}

bool check_rank_consistency(const Tsp& t, const CategoricalDataset& data) {
    const std::vector<CountMatrix> counts = node_counts(t, data);
    if (counts.empty()) return true;
    const CountMatrix& root = counts[0];

    // global category order per feature: stable ascending sort of root counts
    std::vector<std::vector<int>> rank(data.d);
    for (int j = 0; j < data.d; ++j) {
        std::vector<int> order(data.cardinalities[j]);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return root.at(j, a) < root.at(j, b); });
        rank[j].assign(data.cardinalities[j], 0);
        for (size_t pos = 0; pos < order.size(); ++pos) rank[j][order[pos]] = static_cast<int>(pos);
    }

    for (const TspNode* node : t.nodes_bfs()) {
        const CountMatrix& m = counts[node->node_id];
        for (int j = 0; j < data.d; ++j) {
            std::vector<int> dom = node->domain.per_feature[j];
            std::sort(dom.begin(), dom.end(),
                      [&](int a, int b) { return rank[j][a] < rank[j][b]; });
            for (size_t pos = 1; pos < dom.size(); ++pos)
                if (m.at(j, dom[pos - 1]) > m.at(j, dom[pos])) return false;
        }
    }
    return true;
}

} // namespace dtf
