#include "pcclsm/reports.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "pcclsm/error.hpp"

namespace pcclsm::reports {

namespace {

constexpr int kModelFormatVersion = 1;

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json tree_json(const DecisionTreeParams& t) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes) {
        if (n.feature < 0) {
            nodes.push_back({{"label", n.label}});
        } else {
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
        }
    }
    return {{"depth", t.depth()}, {"nodes", std::move(nodes)}};
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
    return out;
}

ordered_json to_json(const SelectionReport& r) {
    ordered_json dropped = ordered_json::array();
    for (const auto& d : r.dropped) {
        dropped.push_back({{"feature", d.name}, {"correlated_with", d.correlated_with}, {"pcc", d.coefficient}});
    }
    ordered_json ranking = ordered_json::array();
    for (const auto& f : r.ranking) ranking.push_back({{"feature", f.name}, {"mean_abs_pcc", optional_json(f.score)}});
    return {{"threshold", r.threshold},
            {"kept", r.kept},
            {"dropped", std::move(dropped)},
            {"undefined", r.undefined},
            {"ranking", std::move(ranking)}};
}

ordered_json to_json(const DistortionModel& m) {
    ordered_json beta = ordered_json::object();
    for (std::size_t i = 0; i < m.beta.size(); ++i) beta[m.fitted_on[i]] = m.beta[i];
    return {{"intercept", m.intercept}, {"residual_mse", m.residual}, {"shift", m.shift()}, {"beta", std::move(beta)}};
}

ordered_json to_json(const PrivacyReport& p) {
    return {{"vd", p.vd},         {"rp", p.rp},         {"rk", p.rk},
            {"cp", p.cp},         {"ck", p.ck},         {"distortion_time_s", p.distortion_time_s},
            {"n", p.n},           {"m", p.m},           {"rp_sum", p.rp_sum},
            {"cp_sum", p.cp_sum}};
}

ordered_json to_json(const ClassifierSpec& s) {
    ordered_json hp = ordered_json::object();
    for (const auto& [k, v] : s.effective()) hp[k] = v;
    return {{"kind", std::string(to_string(s.kind))}, {"hyperparameters", std::move(hp)}, {"seed", s.seed}};
}

ordered_json to_json(const Metrics& m) {
    return {{"accuracy", optional_json(m.accuracy)},
            {"precision", optional_json(m.precision)},
            {"recall", optional_json(m.recall)},
            {"specificity", optional_json(m.specificity)},
            {"f_score", optional_json(m.f_score)}};
}

ordered_json to_json(const EvaluationReport& r) {
    ordered_json results = ordered_json::array();
    for (const auto& c : r.results) {
        results.push_back({{"classifier", to_json(c.spec)},
                           {"confusion", {{"tp", c.counts.tp}, {"fn", c.counts.fn}, {"fp", c.counts.fp}, {"tn", c.counts.tn}}},
                           {"metrics", to_json(c.scores)},
                           {"train_time_s", c.train_time_s},
                           {"test_time_s", c.test_time_s}});
    }
    return {{"configuration", std::string(to_string(r.tag))},
            {"positive_class", "attack (label 1)"},
            {"train_rows", r.train_rows},
            {"test_rows", r.test_rows},
            {"columns", r.columns},
            {"results", std::move(results)}};
}

ordered_json to_json(const UtilityComparison& u) {
    ordered_json deltas = ordered_json::array();
    for (const auto& d : u.deltas) {
        deltas.push_back({{"classifier", d.classifier},
                          {"accuracy_before", d.accuracy_before},
                          {"accuracy_after", d.accuracy_after},
                          {"delta", d.delta}});
    }
    return {{"before", std::string(to_string(u.before))},
            {"after", std::string(to_string(u.after))},
            {"deltas", std::move(deltas)},
            {"max_abs_delta", u.max_abs_delta}};
}

ordered_json to_json(const TrainedModel& m) {
    ordered_json j = {{"format_version", kModelFormatVersion},
                      {"spec", to_json(m.spec())},
                      {"columns", m.training_columns()},
                      {"train_time_s", m.train_time_s()}};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, KnnParams>) {
                j["params"] = {{"k", p.k},
                               {"rows", p.train_x.rows()},
                               {"train_x", p.train_x.data()},
                               {"train_y", p.train_y.values()}};
            } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
                j["params"] = {{"log_prior", {p.log_prior[0], p.log_prior[1]}},
                               {"mean", {p.mean[0], p.mean[1]}},
                               {"variance", {p.variance[0], p.variance[1]}}};
            } else if constexpr (std::is_same_v<T, DecisionTreeParams>) {
                j["params"] = tree_json(p);
            } else if constexpr (std::is_same_v<T, RandomForestParams>) {
                ordered_json trees = ordered_json::array();
                for (const auto& t : p.trees) trees.push_back(tree_json(t));
                j["params"] = {{"trees", std::move(trees)}};
            } else {
                j["params"] = {{"mean", p.mean}, {"scale", p.scale}, {"weights", p.weights}, {"bias", p.bias}};
            }
        },
        m.params());
    return j;
}

std::string correlation_csv(const CorrelationMatrix& c) {
    std::vector<std::string> header{"feature"};
    header.insert(header.end(), c.column_names().begin(), c.column_names().end());
    std::string out = csv_row(header);
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::vector<std::string> row{c.column_names()[i]};
        for (std::size_t j = 0; j < c.size(); ++j) row.push_back(format_optional(c(i, j)));
        out += csv_row(row);
    }
    return out;
}

std::string ranking_csv(const std::vector<FeatureScore>& ranking) {
    std::string out = csv_row({"rank", "feature", "mean_abs_pcc"});
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        out += csv_row({std::to_string(i + 1), ranking[i].name, format_optional(ranking[i].score)});
    }
    return out;
}

std::string matrix_csv(const FeatureMatrix& x, const LabelVector& y, const std::string& label_column) {
    std::vector<std::string> header = x.column_names();
    header.push_back(label_column);
    std::string out = csv_row(header);
    std::vector<std::string> row(header.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) row[c] = format_double(x(r, c));
        row.back() = std::to_string(y[r]);
        out += csv_row(row);
    }
    return out;
}

std::string privacy_table_csv(const std::vector<std::pair<ConfigurationTag, PrivacyReport>>& rows) {
    std::string out = csv_row({"configuration", "VD", "RP", "RK", "CP", "CK", "Time", "n", "m", "rp_sum", "cp_sum"});
    for (const auto& [tag, p] : rows) {
        out += csv_row({std::string(to_string(tag)), format_double(p.vd), format_double(p.rp), format_double(p.rk),
                        format_double(p.cp), format_double(p.ck), format_double(p.distortion_time_s),
                        std::to_string(p.n), std::to_string(p.m), format_double(p.rp_sum), format_double(p.cp_sum)});
    }
    return out;
}

std::string evaluation_csv(const std::vector<EvaluationReport>& reports) {
    std::string out = csv_row({"configuration", "classifier", "train_rows", "test_rows", "features", "tp", "fn", "fp",
                               "tn", "accuracy", "precision", "recall", "specificity", "f_score", "train_time_s",
                               "test_time_s"});
    for (const auto& r : reports) {
        for (const auto& c : r.results) {
            out += csv_row({std::string(to_string(r.tag)), std::string(to_string(c.spec.kind)),
                            std::to_string(r.train_rows), std::to_string(r.test_rows), std::to_string(r.columns.size()),
                            std::to_string(c.counts.tp), std::to_string(c.counts.fn), std::to_string(c.counts.fp),
                            std::to_string(c.counts.tn), format_optional(c.scores.accuracy),
                            format_optional(c.scores.precision), format_optional(c.scores.recall),
                            format_optional(c.scores.specificity), format_optional(c.scores.f_score),
                            format_double(c.train_time_s), format_double(c.test_time_s)});
        }
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw DataError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json without_timings(ordered_json j) {
    if (j.is_object()) {
        ordered_json out = ordered_json::object();
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            if (key.size() >= 2 && key.compare(key.size() - 2, 2, "_s") == 0) continue;
            out[key] = without_timings(it.value());
        }
        return out;
    }
    if (j.is_array()) {
        for (auto& e : j) e = without_timings(e);
    }
    return j;
}

}  // namespace pcclsm::reports
