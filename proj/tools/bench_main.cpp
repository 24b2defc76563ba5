// Benchmarks the OpenMP kernels against their serial reference paths and
// verifies both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "dtf/datagen.hpp"
#include "dtf/density.hpp"
#include "dtf/learn.hpp"
#include "dtf/oracle.hpp"
#include "dtf/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double timed(F&& fn, int repeats = 3) {
    double best = 1e100;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, seconds_since(start));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; parallel paths run serially\n");
#endif

    // GLP split scoring on a wide node
    {
        const dtf::TrainTest parts = dtf::gen_eight_gaussian(12800, 1);
        const dtf::CategoricalDataset& data = parts.train;
        std::vector<int64_t> rows(data.n);
        std::iota(rows.begin(), rows.end(), 0);
        const dtf::NodeDomain domain = dtf::NodeDomain::full(data.cardinalities);

        std::optional<dtf::FoundSplit> serial_split, parallel_split;
        const double ts = timed([&] {
            dtf::Rng rng(7);
            serial_split = dtf::find_best_split(data, rows, domain, dtf::SplitCriterion::glp,
                                                rng, dtf::ExecPolicy::serial);
        });
        const double tp = timed([&] {
            dtf::Rng rng(7);
            parallel_split = dtf::find_best_split(data, rows, domain, dtf::SplitCriterion::glp,
                                                  rng, dtf::ExecPolicy::parallel);
        });
        const bool same = serial_split->candidate.feature == parallel_split->candidate.feature &&
                          serial_split->candidate.left_values ==
                              parallel_split->candidate.left_values &&
                          serial_split->candidate.score == parallel_split->candidate.score;
        report("glp split scoring", ts, tp, same);
    }

    // batch forward and log-likelihood
    {
        const dtf::TrainTest parts = dtf::gen_eight_gaussian(12800, 2);
        dtf::FitConfig cfg;
        cfg.num_tsps = 4;
        cfg.max_depth = 4;
        cfg.seed = 3;
        const dtf::DtfModel model = dtf::fit_dtf(parts.train, cfg, 1.0);

        dtf::CategoricalDataset fwd_serial, fwd_parallel;
        const double fs = timed([&] {
            fwd_serial = dtf::forward_dataset(model.tsps[0], parts.train, dtf::ExecPolicy::serial);
        });
        const double fp = timed([&] {
            fwd_parallel =
                dtf::forward_dataset(model.tsps[0], parts.train, dtf::ExecPolicy::parallel);
        });
        report("tsp forward (10240 rows)", fs, fp, fwd_serial.values == fwd_parallel.values);

        std::vector<double> ll_serial, ll_parallel;
        const double ls = timed([&] {
            ll_serial = dtf::log_likelihood_batch(model, parts.test, dtf::ExecPolicy::serial);
        });
        const double lp = timed([&] {
            ll_parallel = dtf::log_likelihood_batch(model, parts.test, dtf::ExecPolicy::parallel);
        });
        report("log-likelihood (2560 rows)", ls, lp, ll_serial == ll_parallel);
    }

    // brute-force tree-equivalent enumeration
    {
        dtf::Rng rng(11);
        dtf::CategoricalDataset data =
            dtf::CategoricalDataset::with_cardinalities({3, 3});
        for (int i = 0; i < 400; ++i) {
            const int row[2] = {static_cast<int>(rng.next_below(3)),
                                static_cast<int>(rng.next_below(3))};
            data.push_row(row);
        }
        dtf::FitConfig cfg;
        cfg.max_depth = 1;
        const dtf::Tsp structure = dtf::construct_tree(data, cfg);

        double serial_nll = 0, parallel_nll = 0;
        const double ts = timed(
            [&] { serial_nll = dtf::brute_force_optimal_nll(structure, data,
                                                            dtf::ExecPolicy::serial); });
        const double tp = timed(
            [&] { parallel_nll = dtf::brute_force_optimal_nll(structure, data,
                                                              dtf::ExecPolicy::parallel); });
        report("oracle enumeration", ts, tp, serial_nll == parallel_nll);
    }
    return 0;
}
