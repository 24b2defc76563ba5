#include <cmath>
#include <limits>
#include <stdexcept>

#include "dtf/density.hpp"
#include "dtf/rng.hpp"

namespace dtf {

void IndependentBase::recompute_probs() {
    probs.resize(counts.size());
    for (size_t j = 0; j < counts.size(); ++j) {
        const double kj = static_cast<double>(counts[j].size());
        const double denom = static_cast<double>(n) + alpha * kj;
        probs[j].resize(counts[j].size());
        for (size_t a = 0; a < counts[j].size(); ++a)
            probs[j][a] = (static_cast<double>(counts[j][a]) + alpha) / denom;
    }
}

void IndependentBase::validate() const {
    if (alpha < 0.0) throw std::invalid_argument("base: alpha must be >= 0");
    if (probs.size() != counts.size())
        throw std::invalid_argument("base: probs not computed");
    for (size_t j = 0; j < probs.size(); ++j) {
        double sum = 0.0;
        for (double p : probs[j]) {
            if (p < 0.0) throw std::invalid_argument("base: negative probability");
            if (alpha > 0.0 && p <= 0.0)
                throw std::invalid_argument("base: zero probability despite smoothing");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("base: row does not sum to 1");
    }
}

IndependentBase fit_base(const CategoricalDataset& data, double alpha) {
    if (data.n < 1) throw std::invalid_argument("fit_base: empty dataset");
    if (alpha < 0.0) throw std::invalid_argument("fit_base: alpha must be >= 0");
    IndependentBase base;
    base.n = data.n;
    base.alpha = alpha;
    base.counts.resize(data.d);
    for (int j = 0; j < data.d; ++j) base.counts[j].assign(data.cardinalities[j], 0);
    for (int64_t i = 0; i < data.n; ++i)
        for (int j = 0; j < data.d; ++j) ++base.counts[j][data.at(i, j)];
    base.recompute_probs();
    return base;
}

void DtfModel::validate() const {
    base.validate();
    if (static_cast<int>(base.counts.size()) != static_cast<int>(cardinalities.size()))
        throw std::invalid_argument("model: base dimension mismatch");
    for (size_t j = 0; j < cardinalities.size(); ++j)
        if (static_cast<int>(base.counts[j].size()) != cardinalities[j])
            throw std::invalid_argument("model: base cardinality mismatch");
    for (const Tsp& t : tsps) {
        if (t.cardinalities != cardinalities)
            throw std::invalid_argument("model: tsp cardinality mismatch");
        t.validate_structure();
        const InvertibilityReport report = check_invertibility(t);
        if (!report.pass)
            throw std::invalid_argument("model: tsp violates the invertibility constraint");
    }
}

namespace {

double base_log_prob(const IndependentBase& base, const Config& z) {
    double ll = 0.0;
    for (size_t j = 0; j < z.size(); ++j) {
        const double p = base.probs[j][z[j]];
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += std::log(p);
    }
    return ll;
}

} // namespace

double log_likelihood(const DtfModel& model, const Config& x) {
    Config z = x;
    for (const Tsp& t : model.tsps) z = forward(t, z).z;
    return base_log_prob(model.base, z);
}

std::vector<double> log_likelihood_batch(const DtfModel& model, const CategoricalDataset& data,
                                         ExecPolicy policy) {
    std::vector<double> out(data.n);
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < data.n; ++i) out[i] = log_likelihood(model, data.row_config(i));
    } else {
        for (int64_t i = 0; i < data.n; ++i) out[i] = log_likelihood(model, data.row_config(i));
    }
    return out;
}

DtfModel fit_dtf(const CategoricalDataset& train, const FitConfig& cfg, double alpha) {
    cfg.validate();
    train.validate();
    if (train.n < 1) throw std::invalid_argument("fit_dtf: empty dataset");

    DtfModel model;
    model.cardinalities = train.cardinalities;
    model.fit_metadata.criterion = cfg.criterion;
    model.fit_metadata.seed = cfg.seed;
    model.fit_metadata.max_depth = cfg.max_depth;
    model.fit_metadata.min_samples_split = cfg.min_samples_split;
    model.fit_metadata.num_tsps = cfg.num_tsps;

    Rng rng(cfg.seed);
    CategoricalDataset current = train;
    model.fit_metadata.train_nll_trace.push_back(mean_marginal_nll(current));
    for (int stage = 0; stage < cfg.num_tsps; ++stage) {
        FitTspResult fitted = fit_tsp(current, cfg, rng);
        current = std::move(fitted.transformed);
        model.tsps.push_back(std::move(fitted.tsp));
        model.fit_metadata.train_nll_trace.push_back(mean_marginal_nll(current));
    }
    model.base = fit_base(current, alpha);
    return model;
}

SampleResult sample_with_latent(const DtfModel& model, int64_t count, uint64_t seed) {
    for (size_t j = 0; j < model.base.probs.size(); ++j)
        for (double p : model.base.probs[j])
            if (p <= 0.0)
                throw std::invalid_argument(
                    "sample: base has zero-probability categories (alpha = 0); refusing");

    const int d = static_cast<int>(model.cardinalities.size());
    SampleResult out;
    out.x = CategoricalDataset::with_cardinalities(model.cardinalities);
    out.z = CategoricalDataset::with_cardinalities(model.cardinalities);
    Rng rng(seed);
    Config z(d), x(d);
    for (int64_t i = 0; i < count; ++i) {
        for (int j = 0; j < d; ++j) {
            const double u = rng.next_double();
            double cum = 0.0;
            int value = model.cardinalities[j] - 1;
            for (int a = 0; a < model.cardinalities[j]; ++a) {
                cum += model.base.probs[j][a];
                if (u < cum) {
                    value = a;
                    break;
                }
            }
            z[j] = value;
        }
        x = z;
        for (auto it = model.tsps.rbegin(); it != model.tsps.rend(); ++it) x = inverse(*it, x);
        out.z.push_row(z);
        out.x.push_row(x);
    }
    return out;
}

CategoricalDataset sample(const DtfModel& model, int64_t count, uint64_t seed) {
    return sample_with_latent(model, count, seed).x;
}

int64_t parameter_count(const DtfModel& model) {
    int64_t total = 0;
    for (const Tsp& t : model.tsps) {
        for (const TspNode* node : t.nodes_bfs()) {
            total += 2;
            for (const auto& row : node->node_perm.maps)
                for (size_t a = 0; a < row.size(); ++a)
                    if (row[a] != static_cast<int>(a)) ++total;
        }
    }
    return total;
}

} // namespace dtf
