#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dtf/counts.hpp"
#include "dtf/datagen.hpp"

using namespace dtf;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {}
    ~TempFile() { std::filesystem::remove(path); }
    void write(const std::string& content) {
        std::ofstream out(path);
        out << content;
    }
};

double empirical_correlation(const CategoricalDataset& data, int a, int b) {
    double ma = 0, mb = 0;
    for (int64_t i = 0; i < data.n; ++i) {
        ma += data.at(i, a);
        mb += data.at(i, b);
    }
    ma /= data.n;
    mb /= data.n;
    double cov = 0, va = 0, vb = 0;
    for (int64_t i = 0; i < data.n; ++i) {
        cov += (data.at(i, a) - ma) * (data.at(i, b) - mb);
        va += (data.at(i, a) - ma) * (data.at(i, a) - ma);
        vb += (data.at(i, b) - mb) * (data.at(i, b) - mb);
    }
    return cov / std::sqrt(va * vb);
}

double empirical_mutual_information(const CategoricalDataset& data, int a, int b) {
    double joint[2][2] = {{0, 0}, {0, 0}};
    for (int64_t i = 0; i < data.n; ++i) joint[data.at(i, a)][data.at(i, b)] += 1.0;
    double mi = 0.0;
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
            const double pxy = joint[u][v] / data.n;
            if (pxy <= 0) continue;
            const double px = (joint[u][0] + joint[u][1]) / data.n;
            const double py = (joint[0][v] + joint[1][v]) / data.n;
            mi += pxy * std::log(pxy / (px * py));
        }
    return mi;
}

} // namespace

TEST_CASE("load_csv integers") {
    TempFile f("dtf_test_int.csv");
    f.write("0,1\n1,0\n");
    const LoadedCsv loaded = load_csv(f.path.string());
    CHECK(loaded.data.n == 2);
    CHECK(loaded.data.d == 2);
    CHECK(loaded.data.cardinalities == std::vector<int>{2, 2});
    CHECK(loaded.data.values == std::vector<int>{0, 1, 1, 0});
    CHECK(loaded.encoding.labels[0].empty());
}

TEST_CASE("load_csv strings encode by first appearance") {
    TempFile f("dtf_test_str.csv");
    f.write("a,x\nb,x\na,y\n");
    const LoadedCsv loaded = load_csv(f.path.string());
    CHECK(loaded.data.cardinalities == std::vector<int>{2, 2});
    CHECK(loaded.data.values == std::vector<int>{0, 0, 1, 0, 0, 1});
    CHECK(loaded.encoding.labels[0] == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_csv header handling") {
    SUBCASE("detected header over integer columns") {
        TempFile f("dtf_test_hdr.csv");
        f.write("alpha,beta\n0,1\n1,2\n");
        const LoadedCsv loaded = load_csv(f.path.string());
        CHECK(loaded.data.n == 2);
        CHECK(loaded.data.column_names == std::vector<std::string>{"alpha", "beta"});
        CHECK(loaded.data.cardinalities == std::vector<int>{2, 3});
    }
    SUBCASE("forced no-header keeps the first row as data") {
        TempFile f("dtf_test_nohdr.csv");
        f.write("0,1\n1,0\n");
        CsvLoadOptions options;
        options.header = HeaderMode::none;
        CHECK(load_csv(f.path.string(), options).data.n == 2);
    }
}

TEST_CASE("load_csv errors") {
    SUBCASE("ragged rows") {
        TempFile f("dtf_test_ragged.csv");
        f.write("0,1\n1\n");
        CHECK_THROWS_AS(load_csv(f.path.string()), std::runtime_error);
    }
    SUBCASE("empty file") {
        TempFile f("dtf_test_empty.csv");
        f.write("");
        CHECK_THROWS_AS(load_csv(f.path.string()), std::runtime_error);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_csv("/nonexistent.csv"), std::runtime_error); }
    SUBCASE("schema below observed values") {
        TempFile f("dtf_test_schema.csv");
        f.write("0,3\n1,0\n");
        CsvLoadOptions options;
        options.cardinalities = {2, 2};
        CHECK_THROWS_AS(load_csv(f.path.string(), options), std::runtime_error);
        options.cardinalities = {2, 5};
        CHECK(load_csv(f.path.string(), options).data.cardinalities ==
              std::vector<int>{2, 5});
    }
}

TEST_CASE("a 22-column string-categorical table loads") {
    // mushroom-shaped: 22 string columns, mixed cardinalities up to 12
    TempFile f("dtf_test_wide.csv");
    std::string content;
    const int n = 60;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 22; ++j) {
            const int k = (j == 5) ? 12 : 2 + (j % 4);
            content += static_cast<char>('a' + (i + j) % k);
            content += (j + 1 < 22) ? ',' : '\n';
        }
    }
    f.write(content);
    const LoadedCsv loaded = load_csv(f.path.string());
    CHECK(loaded.data.d == 22);
    CHECK(loaded.data.n == n);
    CHECK(*std::max_element(loaded.data.cardinalities.begin(),
                            loaded.data.cardinalities.end()) == 12);
}

TEST_CASE("csv round trip") {
    TempFile f("dtf_test_rt.csv");
    const TrainTest parts = gen_eight_gaussian(100, 3);
    save_csv(f.path.string(), parts.train);
    const LoadedCsv loaded = load_csv(f.path.string());
    CHECK(loaded.data.values == parts.train.values);
}

TEST_CASE("split_train_test") {
    CategoricalDataset data = CategoricalDataset::with_cardinalities({11});
    for (int i = 0; i < 10; ++i) data.push_row(std::vector<int>{i});

    const TrainTest parts = split_train_test(data, 0.8, 4);
    CHECK(parts.train.n == 8);
    CHECK(parts.test.n == 2);

    // same seed reproduces, union is the input multiset
    const TrainTest again = split_train_test(data, 0.8, 4);
    CHECK(parts.train.values == again.train.values);
    std::multiset<int> in(data.values.begin(), data.values.end());
    std::multiset<int> out(parts.train.values.begin(), parts.train.values.end());
    out.insert(parts.test.values.begin(), parts.test.values.end());
    CHECK(in == out);

    CHECK_THROWS_AS(split_train_test(data, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split_train_test(data, 1.0, 1), std::invalid_argument);
}

TEST_CASE("eight gaussian generator") {
    const TrainTest parts = gen_eight_gaussian(kEightGaussianDefaultN, 1);
    CHECK(parts.train.cardinalities == std::vector<int>{91, 91});
    CHECK(parts.train.n == 10240);
    CHECK(parts.test.n == 2560);

    SUBCASE("deterministic per seed") {
        const TrainTest again = gen_eight_gaussian(kEightGaussianDefaultN, 1);
        CHECK(parts.train.values == again.train.values);
        const TrainTest other = gen_eight_gaussian(kEightGaussianDefaultN, 2);
        CHECK(parts.train.values != other.train.values);
    }

    SUBCASE("the empirical grid shows 8 separated modes") {
        // flood fill cells holding at least 1% of the heaviest cell count
        std::vector<int> grid(91 * 91, 0);
        for (int64_t i = 0; i < parts.train.n; ++i)
            ++grid[parts.train.at(i, 0) * 91 + parts.train.at(i, 1)];
        const int peak = *std::max_element(grid.begin(), grid.end());
        std::vector<char> occupied(91 * 91, 0);
        for (size_t c = 0; c < grid.size(); ++c) occupied[c] = grid[c] * 20 >= peak;
        std::vector<char> seen(91 * 91, 0);
        int components = 0;
        for (int start = 0; start < 91 * 91; ++start) {
            if (!occupied[start] || seen[start]) continue;
            ++components;
            std::vector<int> stack = {start};
            seen[start] = 1;
            while (!stack.empty()) {
                const int cell = stack.back();
                stack.pop_back();
                const int r = cell / 91, c = cell % 91;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = r + dr, nc = c + dc;
                        if (nr < 0 || nr >= 91 || nc < 0 || nc >= 91) continue;
                        const int idx = nr * 91 + nc;
                        if (occupied[idx] && !seen[idx]) {
                            seen[idx] = 1;
                            stack.push_back(idx);
                        }
                    }
            }
        }
        CHECK(components == 8);
    }
}

TEST_CASE("copula total correlation solver") {
    CHECK(solve_copula_eps(4, 0.0) == 1.0);
    for (double target : {1.0, 10.0, 100.0}) {
        const double eps = solve_copula_eps(4, target);
        CHECK(std::abs(copula_total_correlation(4, eps) - target) < 1e-6);
    }
    CHECK_THROWS_AS(solve_copula_eps(4, 2000.0), std::domain_error);
}

TEST_CASE("copula generator") {
    CopulaSpec spec;
    spec.seed = 9;

    SUBCASE("zero total correlation gives independent features") {
        spec.target_total_correlation = 0.0;
        const TrainTest parts = gen_copula(spec);
        CHECK(parts.train.cardinalities == std::vector<int>{2, 2, 2, 2});
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                CHECK(std::abs(empirical_correlation(parts.train, a, b)) < 0.05);
    }

    SUBCASE("marginals match the Bernoulli parameters within 3 standard errors") {
        for (double tc : {0.0, 10.0}) {
            spec.target_total_correlation = tc;
            const TrainTest parts = gen_copula(spec);
            const CountMatrix counts = marginal_counts(parts.train);
            for (int j = 0; j < 4; ++j) {
                const double p = spec.bernoulli_p[j];
                const double freq =
                    static_cast<double>(counts.at(j, 1)) / static_cast<double>(parts.train.n);
                const double se = std::sqrt(p * (1 - p) / static_cast<double>(parts.train.n));
                CHECK(std::abs(freq - p) < 3.0 * se);
            }
        }
    }

    SUBCASE("extreme total correlation makes features nearly functionally related") {
        spec.target_total_correlation = 100.0;
        const TrainTest parts = gen_copula(spec);
        CHECK(empirical_mutual_information(parts.train, 0, 1) > 0.2);
        CHECK(empirical_mutual_information(parts.train, 0, 2) > 0.4);
    }

    SUBCASE("deterministic per seed") {
        spec.target_total_correlation = 1.0;
        const TrainTest a = gen_copula(spec);
        const TrainTest b = gen_copula(spec);
        CHECK(a.train.values == b.train.values);
    }

    SUBCASE("spec validation") {
        spec.bernoulli_p = {0.5, 0.0, 0.5, 0.2};
        CHECK_THROWS_AS(gen_copula(spec), std::invalid_argument);
    }
}
