#include "pcclsm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pcclsm/error.hpp"

namespace pcclsm {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

template <typename F>
double seconds_of(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count();
}

}  // namespace

ConfusionCounts confusion(const LabelVector& truth, const LabelVector& predicted) {
    if (truth.size() != predicted.size()) {
        throw UsageError("confusion counts need label vectors of equal length (" + std::to_string(truth.size()) +
                         " vs " + std::to_string(predicted.size()) + ")");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) {
            predicted[i] ? ++c.tp : ++c.fn;
        } else {
            predicted[i] ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw UsageError("metrics need at least one evaluated row");
    Metrics m;
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.specificity = ratio(c.tn, c.tn + c.fp);
    m.accuracy = ratio(c.tp + c.tn, c.total());
    if (m.recall && m.precision && *m.precision + *m.recall > 0.0) {
        m.f_score = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    }
    return m;
}

std::string_view to_string(ConfigurationTag tag) {
    switch (tag) {
        case ConfigurationTag::baseline:
            return "baseline";
        case ConfigurationTag::pcc_only:
            return "pcc_only";
        case ConfigurationTag::lsm_only:
            return "lsm_only";
        case ConfigurationTag::pcc_lsm:
            return "pcc_lsm";
    }
    return "unknown";
}

std::optional<ConfigurationTag> parse_configuration_tag(std::string_view name) {
    for (auto tag : {ConfigurationTag::baseline, ConfigurationTag::pcc_only, ConfigurationTag::lsm_only,
                     ConfigurationTag::pcc_lsm}) {
        if (to_string(tag) == name) return tag;
    }
    return std::nullopt;
}

bool uses_selection(ConfigurationTag tag) {
    return tag == ConfigurationTag::pcc_only || tag == ConfigurationTag::pcc_lsm;
}

bool uses_distortion(ConfigurationTag tag) {
    return tag == ConfigurationTag::lsm_only || tag == ConfigurationTag::pcc_lsm;
}

EvaluationReport run_configuration(ConfigurationTag tag, const FeatureMatrix& train_x, const LabelVector& train_y,
                                   const FeatureMatrix& test_x, const LabelVector& test_y,
                                   const std::vector<ClassifierSpec>& specs, const RunOptions& options) {
    if (specs.empty()) throw UsageError("no classifiers requested");
    if (options.timing_repeats == 0) throw UsageError("timing_repeats must be >= 1");
    if (test_x.rows() == 0) throw UsageError("empty test set");

    EvaluationReport report;
    report.tag = tag;
    report.train_rows = train_x.rows();
    report.test_rows = test_x.rows();
    report.columns = train_x.column_names();

    for (const auto& spec : specs) {
        std::vector<double> train_times;
        std::vector<double> test_times;
        std::optional<TrainedModel> model;
        std::optional<LabelVector> predicted;
        for (std::size_t rep = 0; rep < options.timing_repeats; ++rep) {
            TrainedModel fitted = fit(spec, train_x, train_y, options.threads);
            train_times.push_back(fitted.train_time_s());
            LabelVector out;
            test_times.push_back(seconds_of([&] { out = predict(fitted, test_x); }));
            if (!model) {
                model = std::move(fitted);
                predicted = std::move(out);
            }
        }
        ClassifierResult result;
        result.spec = spec;
        result.counts = confusion(test_y, *predicted);
        result.scores = metrics(result.counts);
        result.train_time_s = median(train_times);
        result.test_time_s = median(test_times);
        report.results.push_back(std::move(result));
    }
    return report;
}

UtilityComparison compare_utility(const EvaluationReport& before, const EvaluationReport& after) {
    if (before.results.size() != after.results.size()) {
        throw UsageError("utility comparison needs the same classifiers in both reports");
    }
    if (before.test_rows != after.test_rows) {
        throw UsageError("utility comparison needs both reports evaluated on the same test split");
    }
    UtilityComparison out;
    out.before = before.tag;
    out.after = after.tag;
    for (std::size_t i = 0; i < before.results.size(); ++i) {
        const auto& b = before.results[i];
        const auto& a = after.results[i];
        if (b.spec.kind != a.spec.kind) {
            throw UsageError("utility comparison needs the same classifiers in both reports");
        }
        UtilityDelta d;
        d.classifier = std::string(to_string(b.spec.kind));
        d.accuracy_before = b.scores.accuracy.value_or(0.0);
        d.accuracy_after = a.scores.accuracy.value_or(0.0);
        d.delta = d.accuracy_after - d.accuracy_before;
        out.max_abs_delta = std::max(out.max_abs_delta, std::abs(d.delta));
        out.deltas.push_back(std::move(d));
    }
    return out;
}

}  // namespace pcclsm
