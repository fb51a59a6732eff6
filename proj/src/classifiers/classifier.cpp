#include <chrono>
#include <cmath>

#include "detail.hpp"
#include "pcclsm/error.hpp"

namespace pcclsm {

namespace {

struct Default {
    const char* name;
    double value;
};

std::vector<Default> defaults_for(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn:
            return {{"k", 5}};
        case ClassifierKind::naive_bayes:
            return {{"var_floor", 1e-9}};
        case ClassifierKind::decision_tree:
            return {{"max_depth", 12}, {"min_samples_split", 2}};
        case ClassifierKind::random_forest:
            return {{"n_trees", 100}, {"max_depth", 12}, {"min_samples_split", 2}};
        case ClassifierKind::svm:
            return {{"epochs", 20}, {"lambda", 1e-4}, {"learning_rate", 0.1}};
    }
    return {};
}

bool is_positive_integer(double v) { return v >= 1.0 && v == std::floor(v) && v < 1e9; }

}  // namespace

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn:
            return "knn";
        case ClassifierKind::naive_bayes:
            return "naive_bayes";
        case ClassifierKind::decision_tree:
            return "decision_tree";
        case ClassifierKind::random_forest:
            return "random_forest";
        case ClassifierKind::svm:
            return "svm";
    }
    return "unknown";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view name) {
    for (auto kind : {ClassifierKind::knn, ClassifierKind::naive_bayes, ClassifierKind::decision_tree,
                      ClassifierKind::random_forest, ClassifierKind::svm}) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind, std::uint64_t seed) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    return spec;
}

double ClassifierSpec::get(const std::string& name) const {
    for (const auto& d : defaults_for(kind)) {
        if (name == d.name) {
            const auto it = hyperparameters.find(name);
            return it == hyperparameters.end() ? d.value : it->second;
        }
    }
    throw UsageError("classifier '" + std::string(to_string(kind)) + "' has no hyperparameter '" + name + "'");
}

std::map<std::string, double> ClassifierSpec::effective() const {
    std::map<std::string, double> out;
    for (const auto& d : defaults_for(kind)) out[d.name] = get(d.name);
    return out;
}

void ClassifierSpec::validate() const {
    for (const auto& [name, value] : hyperparameters) {
        (void)get(name);
        if (!std::isfinite(value)) throw UsageError("hyperparameter '" + name + "' must be finite");
    }
    const auto require_count = [&](const char* name) {
        if (!is_positive_integer(get(name))) {
            throw UsageError(std::string(to_string(kind)) + "." + name + " must be an integer >= 1");
        }
    };
    switch (kind) {
        case ClassifierKind::knn:
            require_count("k");
            break;
        case ClassifierKind::naive_bayes:
            if (!(get("var_floor") > 0.0)) throw UsageError("naive_bayes.var_floor must be > 0");
            break;
        case ClassifierKind::random_forest:
            require_count("n_trees");
            [[fallthrough]];
        case ClassifierKind::decision_tree:
            require_count("max_depth");
            if (!(get("min_samples_split") >= 2.0 && get("min_samples_split") == std::floor(get("min_samples_split")))) {
                throw UsageError(std::string(to_string(kind)) + ".min_samples_split must be an integer >= 2");
            }
            break;
        case ClassifierKind::svm:
            require_count("epochs");
            if (!(get("lambda") > 0.0)) throw UsageError("svm.lambda must be > 0");
            if (!(get("learning_rate") > 0.0)) throw UsageError("svm.learning_rate must be > 0");
            break;
    }
}

TrainedModel::TrainedModel(ClassifierSpec spec, std::vector<std::string> training_columns, ModelParams params,
                           double train_time_s)
    : spec_(std::move(spec)), columns_(std::move(training_columns)), params_(std::move(params)),
      train_time_s_(train_time_s) {}

TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y, unsigned threads) {
    spec.validate();
    if (x.empty()) throw UsageError("cannot fit a classifier on an empty matrix");
    if (x.rows() != y.size()) throw UsageError("feature and label row counts differ");
    if (spec.kind != ClassifierKind::knn) {
        if (x.rows() < 2) throw DataError(std::string(to_string(spec.kind)) + " needs at least two training rows");
        if (y.count(0) == 0 || y.count(1) == 0) {
            throw DataError(std::string(to_string(spec.kind)) + " needs both classes in the training labels");
        }
    }

    const auto start = std::chrono::steady_clock::now();
    ModelParams params;
    switch (spec.kind) {
        case ClassifierKind::knn:
            params = detail::fit_knn(spec, x, y);
            break;
        case ClassifierKind::naive_bayes:
            params = detail::fit_naive_bayes(spec, x, y);
            break;
        case ClassifierKind::decision_tree: {
            detail::TreeOptions options;
            options.max_depth = static_cast<std::size_t>(spec.get("max_depth"));
            options.min_samples_split = static_cast<std::size_t>(spec.get("min_samples_split"));
            std::vector<std::size_t> rows(x.rows());
            for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
            Rng rng(spec.seed);
            params = detail::grow_tree(x, y, std::move(rows), options, rng);
            break;
        }
        case ClassifierKind::random_forest:
            params = detail::fit_forest(spec, x, y, threads);
            break;
        case ClassifierKind::svm:
            params = detail::fit_svm(spec, x, y);
            break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return TrainedModel(spec, x.column_names(), std::move(params), elapsed.count());
}

LabelVector predict(const TrainedModel& model, const FeatureMatrix& x) {
    if (x.column_names() != model.training_columns()) {
        throw UsageError("prediction matrix columns do not match the model's training columns");
    }
    std::vector<std::uint8_t> out(x.rows());
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                if constexpr (std::is_same_v<T, KnnParams>) {
                    out[r] = detail::predict_knn(p, x.row(r));
                } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
                    out[r] = detail::predict_naive_bayes(p, x.row(r));
                } else if constexpr (std::is_same_v<T, DecisionTreeParams>) {
                    out[r] = detail::predict_tree(p, x.row(r));
                } else if constexpr (std::is_same_v<T, RandomForestParams>) {
                    out[r] = detail::predict_forest(p, x.row(r));
                } else {
                    out[r] = detail::predict_svm(p, x.row(r));
                }
            }
        },
        model.params());
    return LabelVector(std::move(out));
}

}  // namespace pcclsm
