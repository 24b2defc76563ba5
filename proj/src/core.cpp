#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dtf/counts.hpp"
#include "dtf/dataset.hpp"
#include "dtf/domain.hpp"
#include "dtf/permutation.hpp"

namespace dtf {

// --- CategoricalDataset ---

CategoricalDataset CategoricalDataset::with_cardinalities(std::vector<int> cards) {
    CategoricalDataset ds;
    ds.d = static_cast<int>(cards.size());
    ds.cardinalities = std::move(cards);
    return ds;
}

void CategoricalDataset::push_row(std::span<const int> r) {
    if (static_cast<int>(r.size()) != d)
        throw std::invalid_argument("push_row: row width does not match d");
    values.insert(values.end(), r.begin(), r.end());
    ++n;
}

void CategoricalDataset::validate() const {
    if (d < 1) throw std::invalid_argument("dataset: d must be >= 1");
    if (static_cast<int>(cardinalities.size()) != d)
        throw std::invalid_argument("dataset: cardinalities size mismatch");
    for (int j = 0; j < d; ++j)
        if (cardinalities[j] < 1) throw std::invalid_argument("dataset: cardinality must be >= 1");
    if (values.size() != static_cast<size_t>(n) * d)
        throw std::invalid_argument("dataset: values size mismatch");
    if (!column_names.empty() && static_cast<int>(column_names.size()) != d)
        throw std::invalid_argument("dataset: column_names size mismatch");
    for (int64_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
            const int v = at(i, j);
            if (v < 0 || v >= cardinalities[j])
                throw std::invalid_argument("dataset: value out of range at row " +
                                            std::to_string(i) + ", column " + std::to_string(j));
        }
}

// --- IndependentPermutation ---

IndependentPermutation IndependentPermutation::identity(std::span<const int> cardinalities) {
    IndependentPermutation p;
    p.maps.resize(cardinalities.size());
    for (size_t j = 0; j < cardinalities.size(); ++j) {
        p.maps[j].resize(cardinalities[j]);
        std::iota(p.maps[j].begin(), p.maps[j].end(), 0);
    }
    return p;
}

bool IndependentPermutation::is_identity() const {
    for (const auto& row : maps)
        for (size_t a = 0; a < row.size(); ++a)
            if (row[a] != static_cast<int>(a)) return false;
    return true;
}

void IndependentPermutation::validate() const {
    for (const auto& row : maps) {
        const int k = static_cast<int>(row.size());
        std::vector<char> seen(k, 0);
        for (int v : row) {
            if (v < 0 || v >= k || seen[v])
                throw std::invalid_argument("permutation: row is not a bijection");
            seen[v] = 1;
        }
    }
}

Config apply_permutation(const IndependentPermutation& p, const Config& x) {
    Config out = x;
    apply_permutation_in_place(p, out);
    return out;
}

void apply_permutation_in_place(const IndependentPermutation& p, std::span<int> x) {
    if (x.size() != p.maps.size())
        throw std::invalid_argument("apply_permutation: dimension mismatch");
    for (size_t j = 0; j < x.size(); ++j) x[j] = p.maps[j][x[j]];
}

IndependentPermutation compose(const IndependentPermutation& outer,
                               const IndependentPermutation& inner) {
    if (outer.maps.size() != inner.maps.size())
        throw std::invalid_argument("compose: dimension mismatch");
    IndependentPermutation out;
    out.maps.resize(outer.maps.size());
    for (size_t j = 0; j < outer.maps.size(); ++j) {
        if (outer.maps[j].size() != inner.maps[j].size())
            throw std::invalid_argument("compose: cardinality mismatch on feature " +
                                        std::to_string(j));
        out.maps[j].resize(inner.maps[j].size());
        for (size_t a = 0; a < inner.maps[j].size(); ++a)
            out.maps[j][a] = outer.maps[j][inner.maps[j][a]];
    }
    return out;
}

IndependentPermutation invert(const IndependentPermutation& p) {
    IndependentPermutation out;
    out.maps.resize(p.maps.size());
    for (size_t j = 0; j < p.maps.size(); ++j) {
        out.maps[j].resize(p.maps[j].size());
        for (size_t a = 0; a < p.maps[j].size(); ++a)
            out.maps[j][p.maps[j][a]] = static_cast<int>(a);
    }
    return out;
}

// --- CountMatrix ---

CountMatrix CountMatrix::zeros(int d, int kmax) {
    CountMatrix m;
    m.d = d;
    m.kmax = kmax;
    m.c.assign(static_cast<size_t>(d) * kmax, 0);
    return m;
}

int64_t CountMatrix::row_sum(int j) const {
    int64_t s = 0;
    for (int a = 0; a < kmax; ++a) s += at(j, a);
    return s;
}

CountMatrix& CountMatrix::operator+=(const CountMatrix& other) {
    if (d != other.d || kmax != other.kmax)
        throw std::invalid_argument("count matrix shape mismatch");
    for (size_t i = 0; i < c.size(); ++i) c[i] += other.c[i];
    return *this;
}

CountMatrix permute_counts(const IndependentPermutation& p, const CountMatrix& counts) {
    if (p.dims() != counts.d)
        throw std::invalid_argument("permute_counts: shape mismatch");
    CountMatrix out = CountMatrix::zeros(counts.d, counts.kmax);
    for (int j = 0; j < counts.d; ++j) {
        const int kj = static_cast<int>(p.maps[j].size());
        if (kj > counts.kmax)
            throw std::invalid_argument("permute_counts: permutation wider than counts");
        for (int a = 0; a < kj; ++a) out.at(j, p.maps[j][a]) = counts.at(j, a);
    }
    return out;
}

CountMatrix marginal_counts(const CategoricalDataset& data) {
    const int kmax = data.d ? *std::max_element(data.cardinalities.begin(),
                                                data.cardinalities.end())
                            : 0;
    CountMatrix m = CountMatrix::zeros(data.d, kmax);
    for (int64_t i = 0; i < data.n; ++i)
        for (int j = 0; j < data.d; ++j) ++m.at(j, data.at(i, j));
    return m;
}

CountMatrix marginal_counts(const CategoricalDataset& data, std::span<const int64_t> rows) {
    const int kmax = data.d ? *std::max_element(data.cardinalities.begin(),
                                                data.cardinalities.end())
                            : 0;
    CountMatrix m = CountMatrix::zeros(data.d, kmax);
    for (int64_t i : rows)
        for (int j = 0; j < data.d; ++j) ++m.at(j, data.at(i, j));
    return m;
}

double row_nll(std::span<const int64_t> row_counts) {
    int64_t total = 0;
    for (int64_t v : row_counts) total += v;
    if (total == 0) return 0.0;
    double nll = 0.0;
    for (int64_t v : row_counts)
        if (v > 0) nll -= static_cast<double>(v) * std::log(static_cast<double>(v) / total);
    return nll;
}

double mean_marginal_nll(const CategoricalDataset& data) {
    if (data.n == 0) return 0.0;
    const CountMatrix m = marginal_counts(data);
    double total = 0.0;
    for (int j = 0; j < m.d; ++j)
        total += row_nll(std::span<const int64_t>(m.c.data() + static_cast<size_t>(j) * m.kmax,
                                                  m.kmax));
    return total / static_cast<double>(data.n);
}

// --- NodeDomain ---

NodeDomain NodeDomain::full(std::span<const int> cardinalities) {
    NodeDomain dom;
    dom.per_feature.resize(cardinalities.size());
    for (size_t j = 0; j < cardinalities.size(); ++j) {
        dom.per_feature[j].resize(cardinalities[j]);
        std::iota(dom.per_feature[j].begin(), dom.per_feature[j].end(), 0);
    }
    return dom;
}

bool NodeDomain::contains(int feature, int value) const {
    const auto& s = per_feature[feature];
    return std::binary_search(s.begin(), s.end(), value);
}

void NodeDomain::validate() const {
    for (const auto& s : per_feature) {
        if (s.empty()) throw std::invalid_argument("node domain: empty feature set");
        for (size_t i = 1; i < s.size(); ++i)
            if (s[i - 1] >= s[i])
                throw std::invalid_argument("node domain: set not sorted/unique");
        if (s.front() < 0) throw std::invalid_argument("node domain: negative category");
    }
}

NodeDomain NodeDomain::mapped(const IndependentPermutation& p) const {
    NodeDomain out;
    out.per_feature.resize(per_feature.size());
    for (size_t j = 0; j < per_feature.size(); ++j) {
        out.per_feature[j].reserve(per_feature[j].size());
        for (int v : per_feature[j]) out.per_feature[j].push_back(p.maps[j][v]);
        std::sort(out.per_feature[j].begin(), out.per_feature[j].end());
    }
    return out;
}

} // namespace dtf
