#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcclsm/classifiers.hpp"
#include "pcclsm/evaluation.hpp"

namespace pcclsm {

// How nominal columns take part in correlation-based selection.
enum class CategoricalPolicy {
    drop,    // removed by selection; correlation runs on numeric columns only
    encode,  // their integer codes are correlated like any other column
};

struct PipelineConfig {
    struct Dataset {
        std::filesystem::path path;
        std::optional<std::string> sha256;  // hex digest to verify on load
        std::vector<std::string> drop_columns{"id"};
        std::string label_column = "label";
        std::optional<std::string> category_column = std::string("attack_cat");
        std::optional<std::vector<std::string>> categorical_columns;  // unset = inferred
        bool min_max_scale = false;
    } dataset;

    struct Selection {
        double pcc_threshold = 0.85;
        CategoricalPolicy categorical = CategoricalPolicy::drop;
    } selection;

    struct Split {
        double test_fraction = 0.3;
        std::uint64_t seed = 42;
    } split;

    struct Sample {
        std::optional<std::size_t> rows;
        std::uint64_t seed = 42;
    } sample;

    std::vector<ClassifierSpec> classifiers = default_classifiers();  // empty JSON list = all five
    std::vector<ConfigurationTag> configurations{ConfigurationTag::baseline, ConfigurationTag::pcc_only,
                                                 ConfigurationTag::lsm_only, ConfigurationTag::pcc_lsm};

    struct Evaluation {
        std::size_t timing_repeats = 3;
        unsigned threads = 1;
        bool save_models = false;
    } evaluation;

    std::filesystem::path output_dir = "pcclsm-out";

    // Every classifier with default hyperparameters and `seed`.
    static std::vector<ClassifierSpec> default_classifiers(std::uint64_t seed = 42);

    // Rejects unknown keys at every level and out-of-range values.
    static PipelineConfig from_json(const nlohmann::json& j);
    // Every field with its effective value, classifier defaults included.
    nlohmann::ordered_json to_json() const;
    // Throws UsageError when an invariant does not hold.
    void validate() const;

    // One seed for the split, the sample and every classifier.
    void override_seed(std::uint64_t seed);
};

PipelineConfig load_config(const std::filesystem::path& path);

enum class Command { select, distort, evaluate, pipeline };

std::string_view to_string(Command c);

struct CommandResult {
    std::vector<std::filesystem::path> written;  // relative to output_dir
    std::filesystem::path manifest;
};

// Each command writes its outputs under config.output_dir, then a
// run_manifest.json. The manifest is written first with "complete": false
// and rewritten as complete only after every output has been re-read and
// validated, so an interrupted or failed run is recognisable.
CommandResult run_command(Command command, const PipelineConfig& config);

CommandResult cmd_select(const PipelineConfig& config);
CommandResult cmd_distort(const PipelineConfig& config);
CommandResult cmd_evaluate(const PipelineConfig& config);
CommandResult cmd_pipeline(const PipelineConfig& config);

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace pcclsm
