#include <algorithm>
#include <deque>
#include <stdexcept>

#include "dtf/tsp.hpp"

namespace dtf {

bool TspNode::routes_left(int permuted_split_value) const {
    return std::binary_search(left_values.begin(), left_values.end(), permuted_split_value);
}

std::unique_ptr<TspNode> TspNode::clone() const {
    auto out = std::make_unique<TspNode>();
    out->node_id = node_id;
    out->depth = depth;
    out->split_feature = split_feature;
    out->left_values = left_values;
    out->node_perm = node_perm;
    out->node_perm_inv = node_perm_inv;
    out->domain = domain;
    out->local_perm = local_perm;
    out->local_counts_init = local_counts_init;
    out->local_counts = local_counts;
    if (left) out->left = left->clone();
    if (right) out->right = right->clone();
    return out;
}

Tsp Tsp::clone() const {
    Tsp out;
    out.cardinalities = cardinalities;
    out.max_depth = max_depth;
    if (root) out.root = root->clone();
    return out;
}

void Tsp::finalize() {
    int next_id = 0;
    std::deque<TspNode*> queue;
    if (root) queue.push_back(root.get());
    while (!queue.empty()) {
        TspNode* node = queue.front();
        queue.pop_front();
        node->node_id = next_id++;
        node->node_perm_inv = invert(node->node_perm);
        if (node->left) queue.push_back(node->left.get());
        if (node->right) queue.push_back(node->right.get());
    }
}

int Tsp::node_count() const { return static_cast<int>(nodes_bfs().size()); }

std::vector<TspNode*> Tsp::nodes_bfs() {
    std::vector<TspNode*> out;
    std::deque<TspNode*> queue;
    if (root) queue.push_back(root.get());
    while (!queue.empty()) {
        TspNode* node = queue.front();
        queue.pop_front();
        out.push_back(node);
        if (node->left) queue.push_back(node->left.get());
        if (node->right) queue.push_back(node->right.get());
    }
    return out;
}

std::vector<const TspNode*> Tsp::nodes_bfs() const {
    std::vector<const TspNode*> out;
    std::deque<const TspNode*> queue;
    if (root) queue.push_back(root.get());
    while (!queue.empty()) {
        const TspNode* node = queue.front();
        queue.pop_front();
        out.push_back(node);
        if (node->left) queue.push_back(node->left.get());
        if (node->right) queue.push_back(node->right.get());
    }
    return out;
}

void Tsp::validate_structure() const {
    if (!root) throw std::invalid_argument("tsp: missing root");
    const int d = static_cast<int>(cardinalities.size());
    const NodeDomain full = NodeDomain::full(cardinalities);
    if (root->domain != full) throw std::invalid_argument("tsp: root domain must be full");

    for (const TspNode* node : nodes_bfs()) {
        if (node->node_perm.dims() != d)
            throw std::invalid_argument("tsp: node permutation dimension mismatch");
        for (int j = 0; j < d; ++j)
            if (static_cast<int>(node->node_perm.maps[j].size()) != cardinalities[j])
                throw std::invalid_argument("tsp: node permutation width mismatch");
        node->node_perm.validate();
        node->domain.validate();

        const bool has_children = node->left || node->right;
        if (node->is_leaf()) {
            if (has_children)
                throw std::invalid_argument("tsp: leaf node with children");
            continue;
        }
        if (!node->left || !node->right)
            throw std::invalid_argument("tsp: internal node must have both children");
        const int s = node->split_feature;
        if (s < 0 || s >= d) throw std::invalid_argument("tsp: split feature out of range");
        if (node->left_values.empty())
            throw std::invalid_argument("tsp: empty left_values");
        const auto& ds = node->domain.per_feature[s];
        if (!std::includes(ds.begin(), ds.end(), node->left_values.begin(),
                           node->left_values.end()))
            throw std::invalid_argument("tsp: left_values not within split domain");
        if (node->left_values.size() == ds.size())
            throw std::invalid_argument("tsp: left_values must be a proper subset");

        // children partition the parent domain on the split feature and
        // match it on every other feature
        std::vector<int> right_set;
        std::set_difference(ds.begin(), ds.end(), node->left_values.begin(),
                            node->left_values.end(), std::back_inserter(right_set));
        if (node->left->domain.per_feature[s] != node->left_values ||
            node->right->domain.per_feature[s] != right_set)
            throw std::invalid_argument("tsp: child domains do not partition on split feature");
        for (int j = 0; j < d; ++j) {
            if (j == s) continue;
            if (node->left->domain.per_feature[j] != node->domain.per_feature[j] ||
                node->right->domain.per_feature[j] != node->domain.per_feature[j])
                throw std::invalid_argument("tsp: child domain changed off the split feature");
        }
        if (node->left->depth != node->depth + 1 || node->right->depth != node->depth + 1)
            throw std::invalid_argument("tsp: child depth mismatch");
    }
}

ForwardResult forward(const Tsp& t, const Config& x) {
    ForwardResult out;
    out.z = x;
    const TspNode* node = t.root.get();
    while (true) {
        apply_permutation_in_place(node->node_perm, out.z);
        if (node->is_leaf()) {
            out.leaf_id = node->node_id;
            return out;
        }
        node = node->routes_left(out.z[node->split_feature]) ? node->left.get()
                                                             : node->right.get();
    }
}

Config inverse(const Tsp& t, const Config& z) {
    // path recovery: route on raw values without applying permutations
    std::vector<const TspNode*> path;
    const TspNode* node = t.root.get();
    while (true) {
        path.push_back(node);
        if (node->is_leaf()) break;
        node = node->routes_left(z[node->split_feature]) ? node->left.get() : node->right.get();
    }
    Config x = z;
    for (auto it = path.rbegin(); it != path.rend(); ++it)
        apply_permutation_in_place((*it)->node_perm_inv, x);
    return x;
}

CategoricalDataset forward_dataset(const Tsp& t, const CategoricalDataset& data,
                                   ExecPolicy policy) {
    CategoricalDataset out = data;
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < out.n; ++i) {
            std::span<int> row(out.values.data() + static_cast<size_t>(i) * out.d,
                               static_cast<size_t>(out.d));
            const TspNode* node = t.root.get();
            while (true) {
                apply_permutation_in_place(node->node_perm, row);
                if (node->is_leaf()) break;
                node = node->routes_left(row[node->split_feature]) ? node->left.get()
                                                                   : node->right.get();
            }
        }
        return out;
    }
    for (int64_t i = 0; i < out.n; ++i) {
        std::span<int> row(out.values.data() + static_cast<size_t>(i) * out.d,
                           static_cast<size_t>(out.d));
        const TspNode* node = t.root.get();
        while (true) {
            apply_permutation_in_place(node->node_perm, row);
            if (node->is_leaf()) break;
            node = node->routes_left(row[node->split_feature]) ? node->left.get()
                                                               : node->right.get();
        }
    }
    return out;
}

std::vector<int> forward_leaf_ids(const Tsp& t, const CategoricalDataset& data) {
    std::vector<int> out(data.n);
    for (int64_t i = 0; i < data.n; ++i) out[i] = forward(t, data.row_config(i)).leaf_id;
    return out;
}

InvertibilityReport check_invertibility(const Tsp& t) {
    InvertibilityReport report;
    for (const TspNode* node : t.nodes_bfs()) {
        for (int j = 0; j < node->domain.dims(); ++j) {
            const auto& dom = node->domain.per_feature[j];
            std::vector<int> image;
            image.reserve(dom.size());
            for (int v : dom) image.push_back(node->node_perm.maps[j][v]);
            std::sort(image.begin(), image.end());
            if (image != dom) {
                report.pass = false;
                report.findings.push_back(
                    {node->node_id, j, "node permutation does not map the domain onto itself"});
            }
        }
    }
    return report;
}

bool check_bijection_exhaustive(const Tsp& t) {
    uint64_t size = 1;
    for (int k : t.cardinalities) {
        size *= static_cast<uint64_t>(k);
        if (size > 1000000ULL)
            throw GuardExceeded("bijection check: configuration space exceeds 10^6");
    }
    std::vector<char> seen(size, 0);
    const int d = static_cast<int>(t.cardinalities.size());
    Config x(d, 0);
    for (uint64_t idx = 0; idx < size; ++idx) {
        ForwardResult r = forward(t, x);
        uint64_t out_idx = 0;
        for (int j = 0; j < d; ++j)
            out_idx = out_idx * static_cast<uint64_t>(t.cardinalities[j]) +
                      static_cast<uint64_t>(r.z[j]);
        if (seen[out_idx]) return false;
        seen[out_idx] = 1;
        // next configuration in lexicographic order
        for (int j = d - 1; j >= 0; --j) {
            if (++x[j] < t.cardinalities[j]) break;
            x[j] = 0;
        }
    }
    return true;
}

namespace {

void accumulate_node_counts(const TspNode* node, const CategoricalDataset& transformed,
                            const std::vector<std::vector<int64_t>>& rows_by_leaf,
                            std::vector<CountMatrix>& out, int kmax) {
    if (node->is_leaf()) {
        CountMatrix m = CountMatrix::zeros(transformed.d, kmax);
        auto it = rows_by_leaf[node->node_id];
        for (int64_t i : it)
            for (int j = 0; j < transformed.d; ++j) ++m.at(j, transformed.at(i, j));
        out[node->node_id] = std::move(m);
        return;
    }
    accumulate_node_counts(node->left.get(), transformed, rows_by_leaf, out, kmax);
    accumulate_node_counts(node->right.get(), transformed, rows_by_leaf, out, kmax);
    out[node->node_id] = out[node->left->node_id] + out[node->right->node_id];
}

} // namespace

std::vector<CountMatrix> node_counts(const Tsp& t, const CategoricalDataset& data) {
    const int total_nodes = t.node_count();
    const int kmax = data.d ? *std::max_element(data.cardinalities.begin(),
                                                data.cardinalities.end())
                            : 0;
    // transformed points land in exactly one leaf; ancestors sum their children
    CategoricalDataset transformed = data;
    std::vector<std::vector<int64_t>> rows_by_leaf(total_nodes);
    for (int64_t i = 0; i < data.n; ++i) {
        std::span<int> row(transformed.values.data() + static_cast<size_t>(i) * transformed.d,
                           static_cast<size_t>(transformed.d));
        const TspNode* node = t.root.get();
        while (true) {
            apply_permutation_in_place(node->node_perm, row);
            if (node->is_leaf()) break;
            node = node->routes_left(row[node->split_feature]) ? node->left.get()
                                                               : node->right.get();
        }
        rows_by_leaf[node->node_id].push_back(i);
    }
    std::vector<CountMatrix> out(total_nodes);
    accumulate_node_counts(t.root.get(), transformed, rows_by_leaf, out, kmax);
    return out;
}

} // namespace dtf
