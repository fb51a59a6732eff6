#include "pcclsm/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "pcclsm/dataset.hpp"
#include "pcclsm/distortion.hpp"
#include "pcclsm/error.hpp"
#include "pcclsm/feature_selection.hpp"
#include "pcclsm/privacy_metrics.hpp"
#include "pcclsm/reports.hpp"
#include "pcclsm/unsw_nb15.hpp"

#ifndef PCCLSM_VERSION
#define PCCLSM_VERSION "0.0.0"
#endif

namespace pcclsm {

namespace fs = std::filesystem;
using reports::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void log(const std::string& line) { std::clog << "[pcclsm] " << line << '\n'; }

// Everything a command derives from the config, computed on first use.
class Workspace {
public:
    explicit Workspace(const PipelineConfig& config) : cfg_(config) {}

    const PipelineConfig& config() const { return cfg_; }

    void load() {
        if (loaded_) return;
        const auto start = Clock::now();
        const auto& path = cfg_.dataset.path;
        if (path.empty()) throw UsageError("config: dataset.path is required");
        if (!fs::exists(path)) {
            throw DataError("dataset not found: " + path.string() + "\n" + unsw_nb15::kAcquisition);
        }
        dataset_sha256_ = sha256_file(path);
        if (cfg_.dataset.sha256) {
            std::string expected = *cfg_.dataset.sha256;
            std::transform(expected.begin(), expected.end(), expected.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
            if (expected != dataset_sha256_) {
                throw DataError("dataset " + path.string() + " has SHA-256 " + dataset_sha256_ + ", config expects " +
                                expected);
            }
        }
        const auto table = load_csv(path);
        rows_loaded_ = table.row_count();

        PrepareOptions opt;
        opt.drop_columns = cfg_.dataset.drop_columns;
        opt.label_column = cfg_.dataset.label_column;
        opt.category_column = cfg_.dataset.category_column;
        opt.categorical_columns = cfg_.dataset.categorical_columns;
        data_ = prepare(table, opt);

        if (cfg_.sample.rows) {
            if (*cfg_.sample.rows > data_.labels.size()) {
                throw UsageError("sample.rows = " + std::to_string(*cfg_.sample.rows) + " exceeds the " +
                                 std::to_string(data_.labels.size()) + " rows of " + path.string());
            }
            const auto rows = stratified_sample(data_.labels, *cfg_.sample.rows, cfg_.sample.seed);
            data_.features = data_.features.select_rows(rows);
            data_.labels = data_.labels.select(rows);
        }
        if (cfg_.dataset.min_max_scale) data_.features = min_max_scale(data_.features);

        loaded_ = true;
        stage_times_["load"] = seconds_since(start);
        log("loaded " + std::to_string(rows_loaded_) + " rows, using " + std::to_string(data_.labels.size()) + " x " +
            std::to_string(data_.features.cols()) + " features");
    }

    const PreparedData& data() {
        load();
        return data_;
    }

    const Split& split() {
        load();
        if (!split_) {
            split_ = stratified_split(data_.features, data_.labels, cfg_.split.test_fraction, cfg_.split.seed);
        }
        return *split_;
    }

    void select() {
        if (selected_) return;
        load();
        const auto start = Clock::now();
        FeatureMatrix candidates = data_.features;
        if (cfg_.selection.categorical == CategoricalPolicy::drop) {
            std::vector<std::string> numeric;
            for (const auto& name : data_.features.column_names()) {
                if (data_.encodings.find(name)) {
                    categorical_dropped_.push_back(name);
                } else {
                    numeric.push_back(name);
                }
            }
            candidates = data_.features.select_columns(numeric);
        }
        correlation_ = correlation_matrix(candidates, cfg_.evaluation.threads);
        report_ = select_by_threshold(*correlation_, cfg_.selection.pcc_threshold);
        selected_matrix_ = apply_selection(candidates, report_);
        selected_ = true;
        stage_times_["select"] = seconds_since(start);
        log("selection kept " + std::to_string(report_.kept.size()) + " features, dropped " +
            std::to_string(report_.dropped.size() + categorical_dropped_.size()));
    }

    const CorrelationMatrix& correlation() {
        select();
        return *correlation_;
    }

    ordered_json selection_json() {
        select();
        ordered_json j = reports::to_json(report_);
        ordered_json out = ordered_json::object();
        out["threshold"] = j["threshold"];
        out["categorical_policy"] = cfg_.selection.categorical == CategoricalPolicy::drop ? "drop" : "encode";
        out["features_in"] = data_.features.cols();
        out["features_kept"] = report_.kept.size();
        out["dropped_total"] = report_.dropped.size() + categorical_dropped_.size();
        out["kept"] = j["kept"];
        out["dropped"] = j["dropped"];
        out["dropped_categorical"] = categorical_dropped_;
        out["undefined"] = j["undefined"];
        out["ranking"] = j["ranking"];
        return out;
    }

    // Input matrix of a configuration before any distortion.
    const FeatureMatrix& base_matrix(ConfigurationTag tag) {
        if (uses_selection(tag)) {
            select();
            return selected_matrix_;
        }
        load();
        return data_.features;
    }

    const DistortionResult& distortion(ConfigurationTag tag) {
        auto it = distortions_.find(tag);
        if (it != distortions_.end()) return it->second;
        const auto& x = base_matrix(tag);
        const auto start = Clock::now();
        std::vector<double> times;
        std::optional<DistortionResult> kept;
        for (std::size_t i = 0; i < cfg_.evaluation.timing_repeats; ++i) {
            auto r = distort(x, data_.labels);
            times.push_back(r.seconds);
            if (!kept) kept = std::move(r);
        }
        kept->seconds = median(times);
        stage_times_["distort_" + std::string(to_string(tag))] = seconds_since(start);
        log("distorted " + std::string(to_string(tag)) + " (" + std::to_string(x.cols()) + " columns) in " +
            reports::format_double(kept->seconds) + " s");
        return distortions_.emplace(tag, std::move(*kept)).first->second;
    }

    const FeatureMatrix& final_matrix(ConfigurationTag tag) {
        return uses_distortion(tag) ? distortion(tag).distorted.matrix : base_matrix(tag);
    }

    void record_stage(const std::string& name, double seconds) { stage_times_[name] = seconds; }

    ordered_json dataset_json() const {
        ordered_json j = {{"path", cfg_.dataset.path.string()}, {"sha256", dataset_sha256_}};
        if (loaded_) {
            j["rows_loaded"] = rows_loaded_;
            j["rows_used"] = data_.labels.size();
            j["features"] = data_.features.cols();
            j["attack_rows"] = data_.labels.count(1);
            if (split_) {
                j["train_rows"] = split_->train_rows.size();
                j["test_rows"] = split_->test_rows.size();
            }
            ordered_json enc = ordered_json::object();
            for (const auto& e : data_.encodings.columns) enc[e.column] = e.categories;
            j["categorical_encodings"] = std::move(enc);
        }
        return j;
    }

    ordered_json stage_times_json() const {
        ordered_json j = ordered_json::object();
        for (const auto& [k, v] : stage_times_) j[k] = v;
        return j;
    }

private:
    const PipelineConfig& cfg_;
    bool loaded_ = false;
    bool selected_ = false;
    std::size_t rows_loaded_ = 0;
    std::string dataset_sha256_;
    PreparedData data_;
    std::optional<Split> split_;
    std::optional<CorrelationMatrix> correlation_;
    SelectionReport report_;
    std::vector<std::string> categorical_dropped_;
    FeatureMatrix selected_matrix_;
    std::map<ConfigurationTag, DistortionResult> distortions_;
    std::map<std::string, double> stage_times_;
};

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void text(const std::string& name, const std::string& body) {
        reports::write_text(dir_ / name, body);
        written_.push_back(name);
    }

    void json(const std::string& name, const ordered_json& j) {
        reports::write_json(dir_ / name, j);
        written_.push_back(name);
    }

    // Re-reads every output; JSON must parse and CSV must have a header.
    void validate() const {
        for (const auto& name : written_) {
            const auto path = dir_ / name;
            if (name.extension() == ".json") {
                std::ifstream in(path);
                try {
                    const auto parsed = nlohmann::json::parse(in);
                    if (parsed.is_discarded()) throw DataError("output " + path.string() + " is empty");
                } catch (const nlohmann::json::exception& e) {
                    throw DataError("output " + path.string() + " failed validation: " + e.what());
                }
            } else {
                const auto table = load_csv(path);
                if (table.header.empty()) throw DataError("output " + path.string() + " has no header");
            }
        }
    }

    const std::vector<fs::path>& written() const { return written_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

void write_selection(Workspace& ws, OutputSet& out) {
    out.text("correlation_matrix.csv", reports::correlation_csv(ws.correlation()));
    out.json("selection_report.json", ws.selection_json());
    out.text("feature_ranking.csv", reports::ranking_csv(rank_features(ws.correlation())));
}

std::vector<ConfigurationTag> distortion_tags(const PipelineConfig& cfg) {
    std::vector<ConfigurationTag> tags;
    for (auto t : cfg.configurations) {
        if (uses_distortion(t)) tags.push_back(t);
    }
    return tags;
}

void write_distortion(Workspace& ws, OutputSet& out) {
    const auto tags = distortion_tags(ws.config());
    if (tags.empty()) throw UsageError("no requested configuration applies distortion (lsm_only or pcc_lsm)");
    for (auto tag : tags) {
        const auto& r = ws.distortion(tag);
        const std::string name(to_string(tag));
        out.text("distorted_" + name + ".csv",
                 reports::matrix_csv(r.distorted.matrix, ws.data().labels, ws.config().dataset.label_column));
        ordered_json j = {{"configuration", name},
                          {"rows", r.distorted.matrix.rows()},
                          {"columns", r.distorted.matrix.cols()},
                          {"model", reports::to_json(r.model)},
                          {"distortion_time_s", r.seconds},
                          {"timing_repeats", ws.config().evaluation.timing_repeats}};
        out.json("distortion_" + name + ".json", j);
    }
}

// One JSON report per distorted configuration plus the combined table.
void write_privacy(Workspace& ws, OutputSet& out) {
    std::vector<std::pair<ConfigurationTag, PrivacyReport>> rows;
    for (auto tag : distortion_tags(ws.config())) {
        const std::string name(to_string(tag));
        const auto& d = ws.distortion(tag);
        const auto p = privacy_report(ws.base_matrix(tag), d.distorted.matrix, d.seconds);
        out.json("privacy_" + name + ".json", {{"configuration", name}, {"privacy", reports::to_json(p)}});
        rows.emplace_back(tag, p);
    }
    if (!rows.empty()) out.text("privacy_table.csv", reports::privacy_table_csv(rows));
}

void write_evaluation(Workspace& ws, OutputSet& out) {
    const auto& cfg = ws.config();
    const auto& split = ws.split();
    RunOptions options;
    options.timing_repeats = cfg.evaluation.timing_repeats;
    options.threads = cfg.evaluation.threads;

    std::vector<EvaluationReport> evaluations;
    for (auto tag : cfg.configurations) {
        const std::string name(to_string(tag));
        const auto& x = ws.final_matrix(tag);
        const auto start = Clock::now();
        const auto train_x = x.select_rows(split.train_rows);
        const auto test_x = x.select_rows(split.test_rows);
        auto report = run_configuration(tag, train_x, split.train_y, test_x, split.test_y, cfg.classifiers, options);
        ws.record_stage("evaluate_" + name, seconds_since(start));
        log("evaluated " + name);
        ordered_json j = reports::to_json(report);
        j["split"] = {{"test_fraction", cfg.split.test_fraction}, {"seed", cfg.split.seed}, {"stratified", true}};
        j["timing"] = {{"repeats", cfg.evaluation.timing_repeats}, {"statistic", "median"}};
        out.json("evaluation_" + name + ".json", j);

        if (cfg.evaluation.save_models) {
            for (const auto& spec : cfg.classifiers) {
                const auto model = fit(spec, train_x, split.train_y, cfg.evaluation.threads);
                out.json("model_" + name + "_" + std::string(to_string(spec.kind)) + ".json", reports::to_json(model));
            }
        }
        evaluations.push_back(std::move(report));
    }

    ordered_json comparisons = ordered_json::array();
    const auto baseline = std::find_if(evaluations.begin(), evaluations.end(),
                                       [](const EvaluationReport& r) { return r.tag == ConfigurationTag::baseline; });
    if (baseline != evaluations.end()) {
        for (const auto& r : evaluations) {
            if (r.tag != ConfigurationTag::baseline) comparisons.push_back(reports::to_json(compare_utility(*baseline, r)));
        }
    }
    out.json("utility_comparison.json", {{"reference", "baseline"}, {"comparisons", std::move(comparisons)}});
    out.text("evaluation_results.csv", reports::evaluation_csv(evaluations));
}

ordered_json seeds_json(const PipelineConfig& cfg) {
    ordered_json classifiers = ordered_json::object();
    for (const auto& s : cfg.classifiers) classifiers[std::string(to_string(s.kind))] = s.seed;
    return {{"split", cfg.split.seed}, {"sample", cfg.sample.seed}, {"classifiers", std::move(classifiers)}};
}

ordered_json versions_json() {
    return {{"pcclsm", PCCLSM_VERSION},
            {"compiler", __VERSION__},
            {"cxx_standard", __cplusplus},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

ordered_json manifest(Command command, const PipelineConfig& cfg, const Workspace& ws, const OutputSet& out,
                      bool complete, double wall_s, const std::string& error) {
    ordered_json outputs = ordered_json::array();
    for (const auto& p : out.written()) outputs.push_back(p.string());
    ordered_json j = {{"tool", "pcclsm"},
                      {"command", std::string(to_string(command))},
                      {"complete", complete},
                      {"versions", versions_json()},
                      {"config", cfg.to_json()},
                      {"seeds", seeds_json(cfg)},
                      {"dataset", ws.dataset_json()},
                      {"outputs", std::move(outputs)},
                      {"stage_wall_times_s", ws.stage_times_json()},
                      {"wall_time_s", wall_s}};
    if (!error.empty()) j["error"] = error;
    return j;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::select: return "select";
        case Command::distort: return "distort";
        case Command::evaluate: return "evaluate";
        case Command::pipeline: return "pipeline";
    }
    return "?";
}

CommandResult run_command(Command command, const PipelineConfig& config) {
    config.validate();
    const auto start = Clock::now();
    Workspace ws(config);
    OutputSet out(config.output_dir);
    const auto manifest_path = config.output_dir / "run_manifest.json";
    reports::write_json(manifest_path, manifest(command, config, ws, out, false, 0.0, ""));

    try {
        switch (command) {
            case Command::select: write_selection(ws, out); break;
            case Command::distort:
                write_distortion(ws, out);
                write_privacy(ws, out);
                break;
            case Command::evaluate:
                write_privacy(ws, out);
                write_evaluation(ws, out);
                break;
            case Command::pipeline:
                write_selection(ws, out);
                write_distortion(ws, out);
                write_privacy(ws, out);
                write_evaluation(ws, out);
                break;
        }
        out.validate();
    } catch (const std::exception& e) {
        reports::write_json(manifest_path, manifest(command, config, ws, out, false, seconds_since(start), e.what()));
        throw;
    }
    reports::write_json(manifest_path, manifest(command, config, ws, out, true, seconds_since(start), ""));
    return {out.written(), manifest_path};
}

CommandResult cmd_select(const PipelineConfig& config) { return run_command(Command::select, config); }
CommandResult cmd_distort(const PipelineConfig& config) { return run_command(Command::distort, config); }
CommandResult cmd_evaluate(const PipelineConfig& config) { return run_command(Command::evaluate, config); }
CommandResult cmd_pipeline(const PipelineConfig& config) { return run_command(Command::pipeline, config); }

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string() + " for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw DataError("SHA-256 unavailable");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

}  // namespace pcclsm
