#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcclsm/classifiers.hpp"
#include "pcclsm/dataset.hpp"
#include "pcclsm/distortion.hpp"
#include "pcclsm/evaluation.hpp"
#include "pcclsm/feature_selection.hpp"
#include "pcclsm/privacy_metrics.hpp"

namespace pcclsm::reports {

using nlohmann::ordered_json;

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
// Empty string for an undefined value.
std::string format_optional(const std::optional<double>& v);

// RFC-4180 field quoting, applied only when needed.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

ordered_json to_json(const SelectionReport& r);
ordered_json to_json(const DistortionModel& m);
ordered_json to_json(const PrivacyReport& p);
ordered_json to_json(const ClassifierSpec& s);
ordered_json to_json(const Metrics& m);
ordered_json to_json(const EvaluationReport& r);
ordered_json to_json(const UtilityComparison& u);
// Versioned model artifact; see README for the layout of each kind.
ordered_json to_json(const TrainedModel& m);

std::string correlation_csv(const CorrelationMatrix& c);
std::string ranking_csv(const std::vector<FeatureScore>& ranking);
// Matrix columns followed by the label column.
std::string matrix_csv(const FeatureMatrix& x, const LabelVector& y, const std::string& label_column);
// Columns: configuration, VD, RP, RK, CP, CK, Time, then n, m, rp_sum, cp_sum.
std::string privacy_table_csv(const std::vector<std::pair<ConfigurationTag, PrivacyReport>>& rows);
// One row per configuration x classifier.
std::string evaluation_csv(const std::vector<EvaluationReport>& reports);

// Writes atomically: a sibling temporary file renamed over `path`.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const ordered_json& j);

// Drops every object member whose key ends in "_s" (wall-clock seconds),
// recursively. What remains of a report is fully determined by config + seeds.
ordered_json without_timings(ordered_json j);

}  // namespace pcclsm::reports
