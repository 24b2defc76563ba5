#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtf/datagen.hpp"
#include "dtf/density.hpp"
#include "dtf/model_io.hpp"
#include "dtf/oracle.hpp"

namespace {

uint64_t resolve_seed(const CLI::Option* opt, uint64_t value) {
    if (opt->count() > 0) return value;
    if (const char* env = std::getenv("DTF_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

std::string format_nll(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string cardinalities_string(const std::vector<int>& cards) {
    std::string out = "[";
    for (size_t j = 0; j < cards.size(); ++j) {
        if (j) out += ",";
        out += std::to_string(cards[j]);
    }
    return out + "]";
}

dtf::SplitCriterion parse_criterion(const std::string& name) {
    if (name == "glp") return dtf::SplitCriterion::glp;
    if (name == "random") return dtf::SplitCriterion::random_split;
    throw CLI::ValidationError("--criterion", "expected glp or random");
}

int run_gen(const std::string& dataset, double tc, const std::vector<double>& p, int64_t n,
            bool n_given, uint64_t seed, const std::string& out_train,
            const std::string& out_test) {
    dtf::TrainTest parts;
    if (dataset == "8gauss") {
        parts = dtf::gen_eight_gaussian(n_given ? n : dtf::kEightGaussianDefaultN, seed);
    } else if (dataset == "copula") {
        dtf::CopulaSpec spec;
        spec.target_total_correlation = tc;
        spec.bernoulli_p = p;
        spec.d = static_cast<int>(p.size());
        spec.n = n_given ? n : spec.n;
        spec.seed = seed;
        parts = dtf::gen_copula(spec);
    } else {
        throw CLI::ValidationError("--dataset", "expected 8gauss or copula");
    }
    dtf::save_csv(out_train, parts.train);
    dtf::save_csv(out_test, parts.test);
    std::printf("train: %" PRId64 " rows, test: %" PRId64 " rows, d=%d, k=%s\n", parts.train.n,
                parts.test.n, parts.train.d,
                cardinalities_string(parts.train.cardinalities).c_str());
    return 0;
}

int run_fit(const std::string& train_path, const std::string& criterion, int num_tsps,
            int max_depth, int min_split, double pseudocount, uint64_t seed,
            const std::string& model_path) {
    dtf::LoadedCsv loaded = dtf::load_csv(train_path);
    dtf::FitConfig cfg;
    cfg.criterion = parse_criterion(criterion);
    cfg.num_tsps = num_tsps;
    cfg.max_depth = max_depth;
    cfg.min_samples_split = min_split;
    cfg.seed = seed;
    dtf::DtfModel model = dtf::fit_dtf(loaded.data, cfg, pseudocount);
    dtf::save_model(model_path, model);
    for (size_t stage = 0; stage < model.fit_metadata.train_nll_trace.size(); ++stage)
        std::printf("stage %zu train NLL (nats): %s\n", stage,
                    format_nll(model.fit_metadata.train_nll_trace[stage]).c_str());
    std::printf("parameters: %" PRId64 "\n", dtf::parameter_count(model));
    std::printf("model written to %s\n", model_path.c_str());
    return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path, bool per_row,
             bool bits) {
    const dtf::DtfModel model = dtf::load_model(model_path);
    dtf::LoadedCsv loaded = dtf::load_csv(data_path);
    if (loaded.data.d != static_cast<int>(model.cardinalities.size()))
        throw std::runtime_error("eval: data dimension does not match the model");
    for (int j = 0; j < loaded.data.d; ++j)
        if (loaded.data.cardinalities[j] > model.cardinalities[j])
            throw std::runtime_error("eval: data cardinality exceeds the model on column " +
                                     std::to_string(j));
    loaded.data.cardinalities = model.cardinalities;

    const std::vector<double> ll = dtf::log_likelihood_batch(model, loaded.data);
    const double scale = bits ? 1.0 / std::log(2.0) : 1.0;
    const char* unit = bits ? "bits" : "nats";
    if (per_row) {
        for (size_t i = 0; i < ll.size(); ++i)
            std::printf("%zu,%s\n", i, format_nll(-ll[i] * scale).c_str());
    }
    int64_t infinite_rows = 0;
    double finite_sum = 0.0;
    for (double v : ll) {
        if (std::isinf(v))
            ++infinite_rows;
        else
            finite_sum += -v;
    }
    const int64_t finite_rows = static_cast<int64_t>(ll.size()) - infinite_rows;
    if (infinite_rows == 0) {
        std::printf("mean NLL (%s): %s\n", unit,
                    format_nll(finite_sum * scale / static_cast<double>(finite_rows)).c_str());
    } else {
        std::printf("rows with zero probability: %" PRId64 " of %zu\n", infinite_rows,
                    ll.size());
        if (finite_rows > 0)
            std::printf("mean NLL over finite rows (%s): %s\n", unit,
                        format_nll(finite_sum * scale / static_cast<double>(finite_rows))
                            .c_str());
    }
    return 0;
}

int run_sample(const std::string& model_path, int64_t n, uint64_t seed,
               const std::string& out_path) {
    const dtf::DtfModel model = dtf::load_model(model_path);
    const dtf::CategoricalDataset samples = dtf::sample(model, n, seed);
    dtf::save_csv(out_path, samples);
    std::printf("wrote %" PRId64 " samples to %s\n", n, out_path.c_str());
    return 0;
}

int run_check(const std::string& model_path, const std::string& data_path, bool exhaustive) {
    const dtf::DtfModel model = dtf::load_model(model_path);
    bool all_pass = true;

    dtf::CategoricalDataset stage_data;
    bool have_data = false;
    if (!data_path.empty()) {
        dtf::LoadedCsv loaded = dtf::load_csv(data_path);
        if (loaded.data.d != static_cast<int>(model.cardinalities.size()))
            throw std::runtime_error("check: data dimension does not match the model");
        for (int j = 0; j < loaded.data.d; ++j)
            if (loaded.data.cardinalities[j] > model.cardinalities[j])
                throw std::runtime_error("check: data cardinality exceeds the model");
        stage_data = loaded.data;
        stage_data.cardinalities = model.cardinalities;
        have_data = true;
    }

    std::printf("tsp  invertibility%s%s\n", exhaustive ? "  bijection" : "",
                have_data ? "  rank-consistency" : "");
    for (size_t t = 0; t < model.tsps.size(); ++t) {
        const dtf::Tsp& tsp = model.tsps[t];
        const dtf::InvertibilityReport report = dtf::check_invertibility(tsp);
        std::string line = "  " + std::to_string(t) + "  " +
                           (report.pass ? "pass" : "FAIL");
        all_pass = all_pass && report.pass;
        if (exhaustive) {
            const bool bijective = dtf::check_bijection_exhaustive(tsp); // may throw GuardExceeded
            line += bijective ? "  pass" : "  FAIL";
            all_pass = all_pass && bijective;
        }
        if (have_data) {
            const bool rank_ok = dtf::check_rank_consistency(tsp, stage_data);
            line += rank_ok ? "  pass" : "  FAIL";
            all_pass = all_pass && rank_ok;
            stage_data = dtf::forward_dataset(tsp, stage_data);
        }
        std::printf("%s\n", line.c_str());
        for (const auto& finding : report.findings)
            std::printf("    node %d feature %d: %s\n", finding.node_id, finding.feature,
                        finding.detail.c_str());
    }
    std::printf("overall: %s\n", all_pass ? "pass" : "FAIL");
    return all_pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete tree flows: density estimation over categorical data"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    std::string gen_dataset;
    double gen_tc = 100.0;
    std::vector<double> gen_p = {0.5, 0.3, 0.5, 0.2};
    int64_t gen_n = 0;
    uint64_t gen_seed = 0;
    std::string gen_out_train, gen_out_test;
    gen->add_option("--dataset", gen_dataset, "8gauss or copula")->required();
    gen->add_option("--tc", gen_tc, "copula target total correlation");
    gen->add_option("--p", gen_p, "copula Bernoulli parameters")->delimiter(',');
    auto* gen_n_opt = gen->add_option("--n", gen_n, "total samples before the 80/20 split");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "rng seed (env DTF_SEED fallback)");
    gen->add_option("--out-train", gen_out_train, "training CSV path")->required();
    gen->add_option("--out-test", gen_out_test, "test CSV path")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model to a training CSV");
    std::string fit_train, fit_criterion = "glp", fit_model;
    int fit_num_tsps = 1, fit_max_depth = 2, fit_min_split = 2;
    double fit_pseudocount = 1.0;
    uint64_t fit_seed = 0;
    fit->add_option("--train", fit_train, "training CSV path")->required();
    fit->add_option("--criterion", fit_criterion, "glp or random");
    fit->add_option("--num-tsps", fit_num_tsps, "number of composed TSPs");
    fit->add_option("--max-depth", fit_max_depth, "maximum tree depth");
    fit->add_option("--min-split", fit_min_split, "minimum samples to split a node");
    fit->add_option("--pseudocount", fit_pseudocount, "base smoothing pseudocount");
    auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "rng seed (env DTF_SEED fallback)");
    fit->add_option("--model", fit_model, "output model path")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate mean NLL of a model on a CSV");
    std::string eval_model, eval_data;
    bool eval_per_row = false, eval_bits = false;
    eval->add_option("--model", eval_model, "model path")->required();
    eval->add_option("--data", eval_data, "data CSV path")->required();
    eval->add_flag("--per-row", eval_per_row, "print per-row NLL as CSV");
    eval->add_flag("--bits", eval_bits, "report NLL in bits instead of nats");

    // sample
    auto* smp = app.add_subcommand("sample", "draw samples from a fitted model");
    std::string smp_model, smp_out;
    int64_t smp_n = 1;
    uint64_t smp_seed = 0;
    smp->add_option("--model", smp_model, "model path")->required();
    smp->add_option("--n", smp_n, "number of samples")->required();
    auto* smp_seed_opt = smp->add_option("--seed", smp_seed, "rng seed (env DTF_SEED fallback)");
    smp->add_option("--out", smp_out, "output CSV path")->required();

    // check
    auto* chk = app.add_subcommand("check", "audit invertibility of a model");
    std::string chk_model, chk_data;
    bool chk_exhaustive = false;
    chk->add_option("--model", chk_model, "model path")->required();
    chk->add_option("--data", chk_data, "training CSV for rank-consistency checks");
    chk->add_flag("--exhaustive", chk_exhaustive,
                  "verify bijectivity over the whole configuration space");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return code;
        return 2;
    }

    try {
        if (gen->parsed())
            return run_gen(gen_dataset, gen_tc, gen_p, gen_n, gen_n_opt->count() > 0,
                           resolve_seed(gen_seed_opt, gen_seed), gen_out_train, gen_out_test);
        if (fit->parsed())
            return run_fit(fit_train, fit_criterion, fit_num_tsps, fit_max_depth, fit_min_split,
                           fit_pseudocount, resolve_seed(fit_seed_opt, fit_seed), fit_model);
        if (eval->parsed()) return run_eval(eval_model, eval_data, eval_per_row, eval_bits);
        if (smp->parsed())
            return run_sample(smp_model, smp_n, resolve_seed(smp_seed_opt, smp_seed), smp_out);
        if (chk->parsed()) return run_check(chk_model, chk_data, chk_exhaustive);
    } catch (const dtf::GuardExceeded& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
