#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dtf/datagen.hpp"
#include "dtf/rng.hpp"

namespace dtf {

namespace {

// eigenvalue of the cycle precision I - w*A at Fourier mode m, with
// w = (1-eps)/2; written as (1-c) + eps*c so the smallest eigenvalue is
// exactly eps even when eps is far below machine epsilon
double cycle_eigenvalue(int d, int m, double eps) {
    const double c = std::cos(2.0 * M_PI * m / d);
    return (1.0 - c) + eps * c;
}

bool parse_nonneg_int(const std::string& cell, long long& out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(cell.c_str(), &end, 10);
    if (errno != 0 || end != cell.c_str() + cell.size() || v < 0) return false;
    out = v;
    return true;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

LoadedCsv load_csv(const std::string& path, const CsvLoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && rows.empty()) continue;
        if (line.empty()) break; // trailing blank line
        rows.push_back(split_line(line));
    }
    if (rows.empty()) throw std::runtime_error("load_csv: empty file " + path);

    const size_t width = rows[0].size();
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != width)
            throw std::runtime_error("load_csv: ragged row " + std::to_string(i + 1));

    // a column is integer-typed when every data cell parses as a
    // nonnegative integer
    auto column_is_integer = [&](size_t col, size_t first_row) {
        long long v;
        for (size_t i = first_row; i < rows.size(); ++i)
            if (!parse_nonneg_int(rows[i][col], v)) return false;
        return true;
    };

    bool has_header = options.header == HeaderMode::present;
    if (options.header == HeaderMode::detect && rows.size() > 1) {
        // header detected when some column is integer-typed except for its
        // first cell; all-string columns stay indistinguishable and are
        // treated as data
        long long v;
        for (size_t col = 0; col < width && !has_header; ++col)
            if (!parse_nonneg_int(rows[0][col], v) && column_is_integer(col, 1))
                has_header = true;
    }

    const size_t first_data = has_header ? 1 : 0;
    if (first_data >= rows.size()) throw std::runtime_error("load_csv: no data rows");
    const int64_t n = static_cast<int64_t>(rows.size() - first_data);
    const int d = static_cast<int>(width);

    LoadedCsv out;
    out.data.d = d;
    out.data.n = n;
    out.data.cardinalities.assign(d, 0);
    out.data.values.assign(static_cast<size_t>(n) * d, 0);
    out.encoding.labels.resize(d);
    if (has_header) {
        out.data.column_names.resize(d);
        for (int j = 0; j < d; ++j) out.data.column_names[j] = rows[0][j];
    }

    for (int j = 0; j < d; ++j) {
        if (column_is_integer(j, first_data)) {
            long long maxv = 0;
            for (int64_t i = 0; i < n; ++i) {
                long long v;
                parse_nonneg_int(rows[first_data + i][j], v);
                if (v > 1000000)
                    throw std::runtime_error("load_csv: integer category too large in column " +
                                             std::to_string(j));
                out.data.at(i, j) = static_cast<int>(v);
                maxv = std::max(maxv, v);
            }
            out.data.cardinalities[j] = static_cast<int>(maxv) + 1;
        } else {
            std::unordered_map<std::string, int> codes;
            for (int64_t i = 0; i < n; ++i) {
                const std::string& cell = rows[first_data + i][j];
                auto it = codes.find(cell);
                if (it == codes.end()) {
                    const int code = static_cast<int>(out.encoding.labels[j].size());
                    out.encoding.labels[j].push_back(cell);
                    it = codes.emplace(cell, code).first;
                }
                out.data.at(i, j) = it->second;
            }
            out.data.cardinalities[j] = static_cast<int>(out.encoding.labels[j].size());
        }
    }

    if (!options.cardinalities.empty()) {
        if (static_cast<int>(options.cardinalities.size()) != d)
            throw std::runtime_error("load_csv: schema width mismatch");
        for (int j = 0; j < d; ++j) {
            if (options.cardinalities[j] < out.data.cardinalities[j])
                throw std::runtime_error("load_csv: schema cardinality below observed values " +
                                         std::string("in column ") + std::to_string(j));
            out.data.cardinalities[j] = options.cardinalities[j];
        }
    }
    out.data.validate();
    return out;
}

void save_csv(const std::string& path, const CategoricalDataset& data) {
    std::ofstream outfile(path);
    if (!outfile) throw std::runtime_error("save_csv: cannot open " + path);
    for (int64_t i = 0; i < data.n; ++i) {
        for (int j = 0; j < data.d; ++j) {
            if (j) outfile << ',';
            outfile << data.at(i, j);
        }
        outfile << '\n';
    }
    if (!outfile) throw std::runtime_error("save_csv: write failed for " + path);
}

TrainTest split_train_test(const CategoricalDataset& data, double fraction, uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split: fraction must be in (0, 1)");
    if (data.n < 2) throw std::invalid_argument("split: need at least 2 rows");
    int64_t n_train = std::llround(static_cast<double>(data.n) * fraction);
    n_train = std::clamp<int64_t>(n_train, 1, data.n - 1);

    std::vector<int64_t> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (int64_t i = data.n - 1; i > 0; --i) {
        const int64_t j = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }

    TrainTest out;
    out.train = CategoricalDataset::with_cardinalities(data.cardinalities);
    out.test = CategoricalDataset::with_cardinalities(data.cardinalities);
    out.train.column_names = data.column_names;
    out.test.column_names = data.column_names;
    for (int64_t i = 0; i < data.n; ++i)
        (i < n_train ? out.train : out.test).push_row(data.row(order[i]));
    return out;
}

TrainTest gen_eight_gaussian(int64_t n, uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_eight_gaussian: n must be >= 2");
    constexpr double kRadius = 4.0;
    constexpr double kStd = 0.25;
    constexpr double kLo = -6.0, kHi = 6.0;
    constexpr int kBins = kEightGaussianBins;
    const double bin_width = (kHi - kLo) / kBins;

    CategoricalDataset full = CategoricalDataset::with_cardinalities({kBins, kBins});
    Rng rng(seed);
    int row[2];
    for (int64_t i = 0; i < n; ++i) {
        const int component = static_cast<int>(rng.next_below(8));
        const double angle = 2.0 * M_PI * component / 8.0;
        const double coords[2] = {kRadius * std::cos(angle) + kStd * rng.next_normal(),
                                  kRadius * std::sin(angle) + kStd * rng.next_normal()};
        for (int j = 0; j < 2; ++j) {
            int bin = static_cast<int>(std::floor((coords[j] - kLo) / bin_width));
            row[j] = std::clamp(bin, 0, kBins - 1);
        }
        full.push_row(row);
    }
    return split_train_test(full, 0.8, seed ^ 0xDA7A5EEDULL);
}

void CopulaSpec::validate() const {
    if (d < 1) throw std::invalid_argument("copula: d must be >= 1");
    if (static_cast<int>(bernoulli_p.size()) != d)
        throw std::invalid_argument("copula: bernoulli_p size must equal d");
    for (double p : bernoulli_p)
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("copula: bernoulli parameters must be in (0, 1)");
    if (n < 2) throw std::invalid_argument("copula: n must be >= 2");
    if (target_total_correlation < 0.0)
        throw std::invalid_argument("copula: total correlation must be >= 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("copula: train_fraction must be in (0, 1)");
}

double copula_total_correlation(int d, double eps) {
    // precision Theta = I - w*A over the cycle, w = (1-eps)/2; circulant
    // eigenvalues lambda_m = 1 - (1-eps)*cos(2*pi*m/d)
    double sum_log_lambda = 0.0;
    double sum_inv_lambda = 0.0;
    for (int m = 0; m < d; ++m) {
        const double lambda = cycle_eigenvalue(d, m, eps);
        sum_log_lambda += std::log(lambda);
        sum_inv_lambda += 1.0 / lambda;
    }
    const double sigma_diag = sum_inv_lambda / d;
    return 0.5 * sum_log_lambda + 0.5 * d * std::log(sigma_diag);
}

double solve_copula_eps(int d, double target) {
    if (target == 0.0) return 1.0;
    if (d < 2)
        throw std::domain_error("copula: positive total correlation needs d >= 2");
    double lo = std::log(1e-300), hi = 0.0; // bisect on ln(eps); TC is decreasing
    if (copula_total_correlation(d, std::exp(lo)) < target)
        throw std::domain_error("copula: target total correlation not attainable");
    for (int iter = 0; iter < 500 && hi - lo > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (copula_total_correlation(d, std::exp(mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

TrainTest gen_copula(const CopulaSpec& spec) {
    spec.validate();
    const int d = spec.d;
    const double eps = solve_copula_eps(d, spec.target_total_correlation);

    // real Fourier eigenbasis of the circulant precision; sampling
    // y = sum_m u_m / sqrt(lambda_m) * q_m gives covariance Theta^{-1}
    std::vector<std::vector<double>> basis;   // rows are eigenvectors
    std::vector<double> inv_sqrt_lambda;
    auto lambda_of = [&](int m) { return cycle_eigenvalue(d, m, eps); };
    {
        std::vector<double> q(d, 1.0 / std::sqrt(static_cast<double>(d)));
        basis.push_back(q);
        inv_sqrt_lambda.push_back(1.0 / std::sqrt(lambda_of(0)));
    }
    for (int m = 1; 2 * m < d; ++m) {
        std::vector<double> qc(d), qs(d);
        const double norm = std::sqrt(2.0 / d);
        for (int i = 0; i < d; ++i) {
            qc[i] = norm * std::cos(2.0 * M_PI * m * i / d);
            qs[i] = norm * std::sin(2.0 * M_PI * m * i / d);
        }
        basis.push_back(qc);
        inv_sqrt_lambda.push_back(1.0 / std::sqrt(lambda_of(m)));
        basis.push_back(qs);
        inv_sqrt_lambda.push_back(1.0 / std::sqrt(lambda_of(m)));
    }
    if (d % 2 == 0 && d > 1) {
        std::vector<double> q(d);
        for (int i = 0; i < d; ++i)
            q[i] = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(d));
        basis.push_back(q);
        inv_sqrt_lambda.push_back(1.0 / std::sqrt(lambda_of(d / 2)));
    }

    Rng rng(spec.seed);
    std::vector<double> y(static_cast<size_t>(spec.n) * d, 0.0);
    std::vector<double> u(basis.size());
    for (int64_t i = 0; i < spec.n; ++i) {
        for (size_t m = 0; m < basis.size(); ++m) u[m] = rng.next_normal() * inv_sqrt_lambda[m];
        for (int j = 0; j < d; ++j) {
            double v = 0.0;
            for (size_t m = 0; m < basis.size(); ++m) v += u[m] * basis[m][j];
            y[static_cast<size_t>(i) * d + j] = v;
        }
    }

    // standardize each feature, then apply the standard normal CDF and the
    // inverse Bernoulli CDF
    CategoricalDataset full = CategoricalDataset::with_cardinalities(std::vector<int>(d, 2));
    std::vector<double> mean(d, 0.0), stddev(d, 0.0);
    for (int j = 0; j < d; ++j) {
        for (int64_t i = 0; i < spec.n; ++i) mean[j] += y[static_cast<size_t>(i) * d + j];
        mean[j] /= static_cast<double>(spec.n);
        for (int64_t i = 0; i < spec.n; ++i) {
            const double delta = y[static_cast<size_t>(i) * d + j] - mean[j];
            stddev[j] += delta * delta;
        }
        stddev[j] = std::sqrt(stddev[j] / static_cast<double>(spec.n));
        if (stddev[j] <= 0.0) throw std::runtime_error("copula: degenerate feature variance");
    }
    std::vector<int> row(d);
    for (int64_t i = 0; i < spec.n; ++i) {
        for (int j = 0; j < d; ++j) {
            const double z = (y[static_cast<size_t>(i) * d + j] - mean[j]) / stddev[j];
            const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
            row[j] = cdf > 1.0 - spec.bernoulli_p[j] ? 1 : 0;
        }
        full.push_row(row);
    }
    return split_train_test(full, spec.train_fraction, spec.seed ^ 0xDA7A5EEDULL);
}

} // namespace dtf
