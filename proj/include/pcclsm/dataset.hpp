#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcclsm {

// Raw CSV contents before any typing: header plus string fields.
struct RawRecordTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string source_path;

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return header.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
};

// Parses RFC-4180 CSV (quoted fields, doubled quotes, CRLF or LF endings).
// `expected_header`, when given, must match the file's header exactly.
RawRecordTable parse_csv(std::istream& in, const std::string& source_name,
                         const std::optional<std::vector<std::string>>& expected_header = std::nullopt);

RawRecordTable load_csv(const std::filesystem::path& path,
                        const std::optional<std::vector<std::string>>& expected_header = std::nullopt);

/// Dense row-major real matrix with unique, ordered column names.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> column_names, std::size_t rows);
    FeatureMatrix(std::vector<std::string> column_names, std::vector<double> row_major_values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return names_.size(); }
    bool empty() const { return rows_ == 0 || names_.empty(); }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }
    std::vector<double> column(std::size_t c) const;
    std::span<const double> data() const { return values_; }

    const std::vector<std::string>& column_names() const { return names_; }
    std::optional<std::size_t> column_index(std::string_view name) const;

    FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
    // Keeps the named columns in the order given.
    FeatureMatrix select_columns(std::span<const std::string> names) const;

    // Throws DataError naming the first NaN/infinite entry.
    void require_finite() const;

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
    std::vector<std::string> names_;
    std::size_t rows_ = 0;
    std::vector<double> values_;
};

/// Binary target: 0 = normal, 1 = attack.
class LabelVector {
public:
    LabelVector() = default;
    explicit LabelVector(std::vector<std::uint8_t> values);

    std::size_t size() const { return values_.size(); }
    std::uint8_t operator[](std::size_t i) const { return values_[i]; }
    const std::vector<std::uint8_t>& values() const { return values_; }

    std::size_t count(std::uint8_t label) const;
    LabelVector select(std::span<const std::size_t> indices) const;
    LabelVector complement() const;

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    std::vector<std::uint8_t> values_;
};

// Ordinal codes for one nominal column; code == position in `categories`.
struct ColumnEncoding {
    std::string column;
    std::vector<std::string> categories;

    std::optional<double> encode(std::string_view value) const;
    const std::string& decode(std::size_t code) const;

    friend bool operator==(const ColumnEncoding&, const ColumnEncoding&) = default;
};

struct EncodingMap {
    std::vector<ColumnEncoding> columns;

    const ColumnEncoding* find(std::string_view column) const;

    friend bool operator==(const EncodingMap&, const EncodingMap&) = default;
};

struct PrepareOptions {
    std::vector<std::string> drop_columns;
    std::string label_column = "label";
    std::optional<std::string> category_column;
    // Nominal columns. When unset, a column is nominal iff its first-row
    // value does not parse as a number.
    std::optional<std::vector<std::string>> categorical_columns;
};

struct PreparedData {
    FeatureMatrix features;
    LabelVector labels;
    EncodingMap encodings;
};

PreparedData prepare(const RawRecordTable& table, const PrepareOptions& options);

// Rescales every column to [0, 1]; constant columns become 0.
FeatureMatrix min_max_scale(const FeatureMatrix& x);

struct Split {
    FeatureMatrix train_x;
    LabelVector train_y;
    FeatureMatrix test_x;
    LabelVector test_y;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

// Per class, round(count * test_fraction) rows go to the test part. The test
// part is a prefix of the seeded per-class shuffle for fractions <= 0.5 and a
// suffix otherwise, so f and 1 - f with the same seed give swapped parts.
Split stratified_split(const FeatureMatrix& x, const LabelVector& y, double test_fraction,
                       std::uint64_t seed);

// Row indices (ascending) of a class-proportional sample of exactly `size` rows.
std::vector<std::size_t> stratified_sample(const LabelVector& y, std::size_t size,
                                           std::uint64_t seed);

}  // namespace pcclsm
