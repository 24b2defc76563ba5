#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dtf/counts.hpp"
#include "dtf/learn.hpp"
#include "dtf/oracle.hpp"

namespace dtf {

uint64_t ConfigSpace::size() const {
    uint64_t s = 1;
    for (int k : cardinalities) {
        if (k <= 0) throw std::invalid_argument("config space: cardinality must be >= 1");
        if (s > UINT64_MAX / static_cast<uint64_t>(k)) return UINT64_MAX;
        s *= static_cast<uint64_t>(k);
    }
    return s;
}

uint64_t ConfigSpace::checked_size() const {
    const uint64_t s = size();
    if (s > kExhaustiveGuard)
        throw GuardExceeded("config space exceeds the exhaustive guard of 10^6");
    return s;
}

Config ConfigSpace::config_at(uint64_t index) const {
    Config x(cardinalities.size());
    for (int j = static_cast<int>(cardinalities.size()) - 1; j >= 0; --j) {
        x[j] = static_cast<int>(index % static_cast<uint64_t>(cardinalities[j]));
        index /= static_cast<uint64_t>(cardinalities[j]);
    }
    return x;
}

uint64_t ConfigSpace::index_of(const Config& x) const {
    uint64_t index = 0;
    for (size_t j = 0; j < cardinalities.size(); ++j)
        index = index * static_cast<uint64_t>(cardinalities[j]) + static_cast<uint64_t>(x[j]);
    return index;
}

namespace {

uint64_t factorial(size_t m) {
    uint64_t f = 1;
    for (size_t i = 2; i <= m; ++i) {
        if (f > UINT64_MAX / i) return UINT64_MAX; // saturate instead of wrapping
        f *= i;
    }
    return f;
}

// all permutations of one feature's domain, identity off the domain,
// in lexicographic order of the domain images
std::vector<std::vector<int>> domain_feature_maps(const std::vector<int>& domain_values,
                                                  int cardinality) {
    std::vector<int> image = domain_values;
    std::vector<std::vector<int>> out;
    do {
        std::vector<int> map(cardinality);
        std::iota(map.begin(), map.end(), 0);
        for (size_t t = 0; t < domain_values.size(); ++t) map[domain_values[t]] = image[t];
        out.push_back(std::move(map));
    } while (std::next_permutation(image.begin(), image.end()));
    return out;
}

struct NodeChoices {
    std::vector<std::vector<std::vector<int>>> feature_maps; // j -> list of maps
    uint64_t count = 1;

    IndependentPermutation decode(uint64_t index) const {
        IndependentPermutation p;
        p.maps.resize(feature_maps.size());
        for (int j = static_cast<int>(feature_maps.size()) - 1; j >= 0; --j) {
            const uint64_t m = feature_maps[j].size();
            p.maps[j] = feature_maps[j][index % m];
            index /= m;
        }
        return p;
    }
};

} // namespace

uint64_t tree_assignment_count(const Tsp& structure) {
    uint64_t total = 1;
    for (const TspNode* node : structure.nodes_bfs()) {
        uint64_t node_count = 1;
        for (const auto& dom : node->domain.per_feature) {
            const uint64_t f = factorial(dom.size());
            if (node_count > UINT64_MAX / f) return UINT64_MAX;
            node_count *= f;
        }
        if (total > UINT64_MAX / node_count) return UINT64_MAX;
        total *= node_count;
    }
    return total;
}

double brute_force_optimal_nll(const Tsp& structure, const CategoricalDataset& data,
                               ExecPolicy policy) {
    constexpr uint64_t kAssignmentGuard = 100000;
    const uint64_t total = tree_assignment_count(structure);
    if (total > kAssignmentGuard)
        throw GuardExceeded("brute force: permutation assignment count exceeds 10^5");

    std::vector<const TspNode*> nodes = structure.nodes_bfs();
    std::vector<NodeChoices> choices(nodes.size());
    for (size_t ni = 0; ni < nodes.size(); ++ni) {
        for (int j = 0; j < nodes[ni]->domain.dims(); ++j) {
            choices[ni].feature_maps.push_back(domain_feature_maps(
                nodes[ni]->domain.per_feature[j], structure.cardinalities[j]));
            choices[ni].count *= choices[ni].feature_maps.back().size();
        }
    }

    auto evaluate = [&](uint64_t assignment) {
        Tsp candidate = structure.clone();
        std::vector<TspNode*> cand_nodes = candidate.nodes_bfs();
        uint64_t rest = assignment;
        for (int ni = static_cast<int>(cand_nodes.size()) - 1; ni >= 0; --ni) {
            cand_nodes[ni]->local_perm = choices[ni].decode(rest % choices[ni].count);
            rest /= choices[ni].count;
        }
        construct_equivalent_tree(candidate);
        return mean_marginal_nll(forward_dataset(candidate, data, ExecPolicy::serial));
    };

    std::vector<double> nll(total);
    const int64_t total_signed = static_cast<int64_t>(total);
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (int64_t a = 0; a < total_signed; ++a) nll[a] = evaluate(static_cast<uint64_t>(a));
    } else {
        for (int64_t a = 0; a < total_signed; ++a) nll[a] = evaluate(static_cast<uint64_t>(a));
    }
    double best = nll[0];
    for (double v : nll) best = std::min(best, v);
    return best;
}

Tsp single_feature_swap_tsp(const Config& a, const Config& b,
                            std::span<const int> cardinalities) {
    const int d = static_cast<int>(cardinalities.size());
    if (static_cast<int>(a.size()) != d || static_cast<int>(b.size()) != d)
        throw std::invalid_argument("single_feature_swap: dimension mismatch");
    int diff_feature = -1;
    for (int j = 0; j < d; ++j) {
        if (a[j] < 0 || a[j] >= cardinalities[j] || b[j] < 0 || b[j] >= cardinalities[j])
            throw std::invalid_argument("single_feature_swap: configuration out of range");
        if (a[j] != b[j]) {
            if (diff_feature >= 0)
                throw std::invalid_argument(
                    "single_feature_swap: configurations differ in more than one feature");
            diff_feature = j;
        }
    }
    if (diff_feature < 0)
        throw std::invalid_argument("single_feature_swap: configurations are equal");

    Tsp t;
    t.cardinalities.assign(cardinalities.begin(), cardinalities.end());
    t.root = std::make_unique<TspNode>();
    t.root->depth = 0;
    t.root->domain = NodeDomain::full(cardinalities);
    t.root->node_perm = IndependentPermutation::identity(cardinalities);

    auto make_child = [&](const TspNode& parent) {
        auto child = std::make_unique<TspNode>();
        child->depth = parent.depth + 1;
        child->node_perm = IndependentPermutation::identity(cardinalities);
        return child;
    };
    auto split_node = [&](TspNode& node, int feature, std::vector<int> left_values) {
        node.split_feature = feature;
        std::sort(left_values.begin(), left_values.end());
        node.left_values = left_values;
        node.left = make_child(node);
        node.right = make_child(node);
        node.left->domain = node.domain;
        node.left->domain.per_feature[feature] = node.left_values;
        node.right->domain = node.domain;
        auto& rest = node.right->domain.per_feature[feature];
        rest.clear();
        for (int v : node.domain.per_feature[feature])
            if (!std::binary_search(node.left_values.begin(), node.left_values.end(), v))
                rest.push_back(v);
    };

    // leftmost spine pins each non-differing feature's value; the right
    // sibling at every level is an identity leaf
    TspNode* current = t.root.get();
    for (int j = 0; j < d; ++j) {
        if (j == diff_feature || cardinalities[j] < 2) continue;
        split_node(*current, j, {a[j]});
        current = current->left.get();
    }
    // isolate the two swapped categories when the feature has room for a
    // proper split; for a binary feature the spine leaf already has exactly
    // the two categories in its domain
    if (cardinalities[diff_feature] > 2) {
        split_node(*current, diff_feature, {a[diff_feature], b[diff_feature]});
        current = current->left.get();
    }
    current->node_perm.maps[diff_feature][a[diff_feature]] = b[diff_feature];
    current->node_perm.maps[diff_feature][b[diff_feature]] = a[diff_feature];

    t.max_depth = current->depth;
    t.finalize();
    return t;
}

namespace {

void build_snake(std::span<const int> cards, size_t feature, std::vector<Config>& out,
                 Config& prefix) {
    if (feature == cards.size()) {
        out.push_back(prefix);
        return;
    }
    // recurse over the remaining features, reversing alternate blocks
    for (int v = 0; v < cards[feature]; ++v) {
        prefix.push_back(v);
        const size_t begin = out.size();
        build_snake(cards, feature + 1, out, prefix);
        if (v % 2 == 1) std::reverse(out.begin() + begin, out.end());
        prefix.pop_back();
    }
}

} // namespace

std::vector<Config> snake_path(std::span<const int> cardinalities) {
    ConfigSpace space(std::vector<int>(cardinalities.begin(), cardinalities.end()));
    space.checked_size();
    std::vector<Config> out;
    Config prefix;
    build_snake(cardinalities, 0, out, prefix);
    return out;
}

std::vector<Tsp> realize_arbitrary_permutation(const std::vector<uint64_t>& target,
                                               std::span<const int> cardinalities) {
    ConfigSpace space(std::vector<int>(cardinalities.begin(), cardinalities.end()));
    const uint64_t size = space.size();
    if (size > 16) throw GuardExceeded("realize permutation: space exceeds 16 configurations");
    if (target.size() != size)
        throw std::invalid_argument("realize permutation: target size mismatch");
    {
        std::vector<char> seen(size, 0);
        for (uint64_t v : target) {
            if (v >= size || seen[v])
                throw std::invalid_argument("realize permutation: target is not a bijection");
            seen[v] = 1;
        }
    }

    const std::vector<Config> snake = snake_path(cardinalities);
    std::vector<uint64_t> snake_pos(size);
    for (uint64_t p = 0; p < size; ++p) snake_pos[space.index_of(snake[p])] = p;

    // target in snake coordinates
    std::vector<uint64_t> tau(size);
    for (uint64_t p = 0; p < size; ++p) tau[p] = snake_pos[target[space.index_of(snake[p])]];

    // bubble sort tau to the identity; the recorded adjacent swaps, applied
    // first-to-last, compose to tau
    std::vector<Tsp> out;
    std::vector<uint64_t> work = tau;
    bool changed = true;
    while (changed) {
        changed = false;
        for (uint64_t q = 0; q + 1 < size; ++q) {
            if (work[q] > work[q + 1]) {
                std::swap(work[q], work[q + 1]);
                out.push_back(single_feature_swap_tsp(snake[q], snake[q + 1], cardinalities));
                changed = true;
            }
        }
    }
    return out;
}

} // namespace dtf
