#include <fstream>
#include <set>

#include "pcclsm/error.hpp"
#include "pcclsm/pipeline.hpp"

namespace pcclsm {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw UsageError("config: '" + where + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known) ok = ok || it.key() == k;
        if (!ok) throw UsageError("config: unknown key '" + where + (where.empty() ? "" : ".") + it.key() + "'");
    }
}

template <typename T>
T read(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError("config: '" + where + "." + key + "' has the wrong type (" + e.what() + ")");
    }
}

template <typename T>
void maybe(const json& obj, const std::string& key, const std::string& where, T& out) {
    if (obj.contains(key)) out = read<T>(obj, key, where);
}

std::uint64_t read_seed(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) throw UsageError("config: '" + where + "." + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string_view policy_name(CategoricalPolicy p) { return p == CategoricalPolicy::drop ? "drop" : "encode"; }

}  // namespace

std::vector<ClassifierSpec> PipelineConfig::default_classifiers(std::uint64_t seed) {
    std::vector<ClassifierSpec> out;
    for (auto kind : {ClassifierKind::knn, ClassifierKind::naive_bayes, ClassifierKind::decision_tree,
                      ClassifierKind::random_forest, ClassifierKind::svm}) {
        out.push_back(ClassifierSpec::defaults(kind, seed));
    }
    return out;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    reject_unknown(j, "", {"dataset", "selection", "split", "sample", "classifiers", "configurations", "evaluation",
                           "output_dir"});

    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        reject_unknown(d, "dataset", {"path", "sha256", "drop_columns", "label_column", "category_column",
                                      "categorical_columns", "min_max_scale"});
        if (d.contains("path")) c.dataset.path = read<std::string>(d, "path", "dataset");
        if (d.contains("sha256") && !d["sha256"].is_null()) c.dataset.sha256 = read<std::string>(d, "sha256", "dataset");
        maybe(d, "drop_columns", "dataset", c.dataset.drop_columns);
        maybe(d, "label_column", "dataset", c.dataset.label_column);
        if (d.contains("category_column")) {
            if (d["category_column"].is_null()) {
                c.dataset.category_column.reset();
            } else {
                c.dataset.category_column = read<std::string>(d, "category_column", "dataset");
            }
        }
        if (d.contains("categorical_columns") && !d["categorical_columns"].is_null()) {
            c.dataset.categorical_columns = read<std::vector<std::string>>(d, "categorical_columns", "dataset");
        }
        maybe(d, "min_max_scale", "dataset", c.dataset.min_max_scale);
    }

    if (j.contains("selection")) {
        const auto& s = j["selection"];
        reject_unknown(s, "selection", {"pcc_threshold", "categorical"});
        maybe(s, "pcc_threshold", "selection", c.selection.pcc_threshold);
        if (s.contains("categorical")) {
            const auto name = read<std::string>(s, "categorical", "selection");
            if (name == "drop") {
                c.selection.categorical = CategoricalPolicy::drop;
            } else if (name == "encode") {
                c.selection.categorical = CategoricalPolicy::encode;
            } else {
                throw UsageError("config: 'selection.categorical' must be \"drop\" or \"encode\", got \"" + name + "\"");
            }
        }
    }

    if (j.contains("split")) {
        const auto& s = j["split"];
        reject_unknown(s, "split", {"test_fraction", "seed"});
        maybe(s, "test_fraction", "split", c.split.test_fraction);
        if (s.contains("seed")) c.split.seed = read_seed(s, "seed", "split");
    }

    if (j.contains("sample")) {
        const auto& s = j["sample"];
        reject_unknown(s, "sample", {"rows", "seed"});
        if (s.contains("rows") && !s["rows"].is_null()) {
            if (!s["rows"].is_number_unsigned()) throw UsageError("config: 'sample.rows' must be a positive integer");
            c.sample.rows = s["rows"].get<std::size_t>();
        }
        if (s.contains("seed")) c.sample.seed = read_seed(s, "seed", "sample");
    }

    if (j.contains("classifiers")) {
        const auto& list = j["classifiers"];
        if (!list.is_array()) throw UsageError("config: 'classifiers' must be an array");
        c.classifiers.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& e = list[i];
            const std::string where = "classifiers[" + std::to_string(i) + "]";
            reject_unknown(e, where, {"kind", "hyperparameters", "seed"});
            if (!e.contains("kind")) throw UsageError("config: '" + where + ".kind' is required");
            const auto name = read<std::string>(e, "kind", where);
            const auto kind = parse_classifier_kind(name);
            if (!kind) throw UsageError("config: unknown classifier kind '" + name + "' in " + where);
            ClassifierSpec spec = ClassifierSpec::defaults(*kind);
            if (e.contains("hyperparameters")) {
                spec.hyperparameters = read<std::map<std::string, double>>(e, "hyperparameters", where);
            }
            if (e.contains("seed")) spec.seed = read_seed(e, "seed", where);
            c.classifiers.push_back(std::move(spec));
        }
    }
    if (c.classifiers.empty()) c.classifiers = default_classifiers();

    if (j.contains("configurations")) {
        const auto names = read<std::vector<std::string>>(j, "configurations", "");
        c.configurations.clear();
        for (const auto& n : names) {
            const auto tag = parse_configuration_tag(n);
            if (!tag) throw UsageError("config: unknown configuration '" + n + "'");
            c.configurations.push_back(*tag);
        }
    }

    if (j.contains("evaluation")) {
        const auto& e = j["evaluation"];
        reject_unknown(e, "evaluation", {"timing_repeats", "threads", "save_models"});
        maybe(e, "timing_repeats", "evaluation", c.evaluation.timing_repeats);
        maybe(e, "threads", "evaluation", c.evaluation.threads);
        maybe(e, "save_models", "evaluation", c.evaluation.save_models);
    }

    if (j.contains("output_dir")) c.output_dir = read<std::string>(j, "output_dir", "");

    c.validate();
    return c;
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    using nlohmann::ordered_json;
    ordered_json classifiers_json = ordered_json::array();
    for (const auto& s : classifiers) {
        ordered_json hp = ordered_json::object();
        for (const auto& [k, v] : s.effective()) hp[k] = v;
        classifiers_json.push_back({{"kind", std::string(pcclsm::to_string(s.kind))}, {"hyperparameters", hp}, {"seed", s.seed}});
    }
    ordered_json tags = ordered_json::array();
    for (auto t : configurations) tags.push_back(std::string(pcclsm::to_string(t)));

    return {{"dataset",
             {{"path", dataset.path.string()},
              {"sha256", dataset.sha256 ? ordered_json(*dataset.sha256) : ordered_json(nullptr)},
              {"drop_columns", dataset.drop_columns},
              {"label_column", dataset.label_column},
              {"category_column", dataset.category_column ? ordered_json(*dataset.category_column) : ordered_json(nullptr)},
              {"categorical_columns",
               dataset.categorical_columns ? ordered_json(*dataset.categorical_columns) : ordered_json(nullptr)},
              {"min_max_scale", dataset.min_max_scale}}},
            {"selection",
             {{"pcc_threshold", selection.pcc_threshold},
              {"categorical", std::string(policy_name(selection.categorical))}}},
            {"split", {{"test_fraction", split.test_fraction}, {"seed", split.seed}}},
            {"sample", {{"rows", sample.rows ? ordered_json(*sample.rows) : ordered_json(nullptr)}, {"seed", sample.seed}}},
            {"classifiers", std::move(classifiers_json)},
            {"configurations", std::move(tags)},
            {"evaluation",
             {{"timing_repeats", evaluation.timing_repeats},
              {"threads", evaluation.threads},
              {"save_models", evaluation.save_models}}},
            {"output_dir", output_dir.string()}};
}

void PipelineConfig::validate() const {
    if (!(selection.pcc_threshold > 0.0 && selection.pcc_threshold <= 1.0)) {
        throw UsageError("config: selection.pcc_threshold must be in (0, 1]");
    }
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
        throw UsageError("config: split.test_fraction must be in (0, 1)");
    }
    if (sample.rows && *sample.rows == 0) throw UsageError("config: sample.rows must be positive");
    if (classifiers.empty()) throw UsageError("config: at least one classifier is required");
    for (const auto& s : classifiers) s.validate();
    if (configurations.empty()) throw UsageError("config: at least one configuration is required");
    std::set<ConfigurationTag> seen;
    for (auto t : configurations) {
        if (!seen.insert(t).second) {
            throw UsageError("config: configuration '" + std::string(pcclsm::to_string(t)) + "' listed twice");
        }
    }
    if (evaluation.timing_repeats == 0) throw UsageError("config: evaluation.timing_repeats must be at least 1");
    if (output_dir.empty()) throw UsageError("config: output_dir must not be empty");
    if (dataset.label_column.empty()) throw UsageError("config: dataset.label_column must not be empty");
}

void PipelineConfig::override_seed(std::uint64_t seed) {
    split.seed = seed;
    sample.seed = seed;
    for (auto& s : classifiers) s.seed = seed;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto config = PipelineConfig::from_json(j);
    // A relative dataset path is taken relative to the config file.
    if (!config.dataset.path.empty() && config.dataset.path.is_relative()) {
        config.dataset.path = path.parent_path() / config.dataset.path;
    }
    return config;
}

}  // namespace pcclsm
