#include <fstream>
#include <stdexcept>

#include "dtf/model_io.hpp"

namespace dtf {

namespace {

using json = nlohmann::ordered_json;

json node_to_json(const TspNode& node) {
    json j;
    j["node_id"] = node.node_id;
    j["perm"] = node.node_perm.maps;
    j["domain"] = node.domain.per_feature;
    if (!node.is_leaf()) {
        j["split_feature"] = node.split_feature;
        j["left_values"] = node.left_values;
        j["left"] = node_to_json(*node.left);
        j["right"] = node_to_json(*node.right);
    }
    return j;
}

std::unique_ptr<TspNode> node_from_json(const json& j, const std::vector<int>& cards,
                                        int depth) {
    auto node = std::make_unique<TspNode>();
    node->depth = depth;
    node->node_perm.maps = j.at("perm").get<std::vector<std::vector<int>>>();
    node->domain.per_feature = j.at("domain").get<std::vector<std::vector<int>>>();
    if (node->node_perm.dims() != static_cast<int>(cards.size()) ||
        node->domain.dims() != static_cast<int>(cards.size()))
        throw std::runtime_error("model file: node dimension mismatch");
    for (size_t f = 0; f < cards.size(); ++f) {
        if (static_cast<int>(node->node_perm.maps[f].size()) != cards[f])
            throw std::runtime_error("model file: permutation width mismatch");
        for (int v : node->node_perm.maps[f])
            if (v < 0 || v >= cards[f])
                throw std::runtime_error("model file: permutation entry out of range");
    }
    node->domain.validate();
    if (j.contains("split_feature")) {
        node->split_feature = j.at("split_feature").get<int>();
        node->left_values = j.at("left_values").get<std::vector<int>>();
        node->left = node_from_json(j.at("left"), cards, depth + 1);
        node->right = node_from_json(j.at("right"), cards, depth + 1);
    }
    return node;
}

std::string criterion_name(SplitCriterion c) {
    return c == SplitCriterion::glp ? "glp" : "random";
}

SplitCriterion criterion_from_name(const std::string& name) {
    if (name == "glp") return SplitCriterion::glp;
    if (name == "random") return SplitCriterion::random_split;
    throw std::runtime_error("model file: unknown criterion '" + name + "'");
}

} // namespace

nlohmann::ordered_json model_to_json(const DtfModel& model) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["cardinalities"] = model.cardinalities;
    j["base"] = {{"alpha", model.base.alpha}, {"n", model.base.n},
                 {"counts", model.base.counts}};
    json tsps = json::array();
    for (const Tsp& t : model.tsps)
        tsps.push_back({{"max_depth", t.max_depth}, {"root", node_to_json(*t.root)}});
    j["tsps"] = std::move(tsps);
    j["fit_metadata"] = {{"criterion", criterion_name(model.fit_metadata.criterion)},
                         {"seed", model.fit_metadata.seed},
                         {"max_depth", model.fit_metadata.max_depth},
                         {"min_samples_split", model.fit_metadata.min_samples_split},
                         {"num_tsps", model.fit_metadata.num_tsps},
                         {"train_nll_trace", model.fit_metadata.train_nll_trace}};
    return j;
}

DtfModel model_from_json(const nlohmann::ordered_json& j) {
    const int version = j.at("format_version").get<int>();
    if (version > kModelFormatVersion)
        throw std::runtime_error("model file: format_version " + std::to_string(version) +
                                 " is newer than supported version " +
                                 std::to_string(kModelFormatVersion));
    DtfModel model;
    model.cardinalities = j.at("cardinalities").get<std::vector<int>>();

    const json& base = j.at("base");
    model.base.alpha = base.at("alpha").get<double>();
    model.base.n = base.at("n").get<int64_t>();
    model.base.counts = base.at("counts").get<std::vector<std::vector<int64_t>>>();
    if (model.base.counts.size() != model.cardinalities.size())
        throw std::runtime_error("model file: base dimension mismatch");
    for (size_t f = 0; f < model.cardinalities.size(); ++f)
        if (static_cast<int>(model.base.counts[f].size()) != model.cardinalities[f])
            throw std::runtime_error("model file: base cardinality mismatch");
    model.base.recompute_probs();

    for (const json& jt : j.at("tsps")) {
        Tsp t;
        t.cardinalities = model.cardinalities;
        t.max_depth = jt.at("max_depth").get<int>();
        t.root = node_from_json(jt.at("root"), model.cardinalities, 0);
        t.finalize();
        model.tsps.push_back(std::move(t));
    }

    const json& meta = j.at("fit_metadata");
    model.fit_metadata.criterion = criterion_from_name(meta.at("criterion").get<std::string>());
    model.fit_metadata.seed = meta.at("seed").get<uint64_t>();
    model.fit_metadata.max_depth = meta.at("max_depth").get<int>();
    model.fit_metadata.min_samples_split = meta.at("min_samples_split").get<int>();
    model.fit_metadata.num_tsps = meta.at("num_tsps").get<int>();
    model.fit_metadata.train_nll_trace = meta.at("train_nll_trace").get<std::vector<double>>();
    return model;
}

void save_model(const std::string& path, const DtfModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

DtfModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error("load_model: invalid JSON in " + path + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace dtf
