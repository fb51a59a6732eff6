#include "pcclsm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pcclsm/error.hpp"
#include "pcclsm/random.hpp"

namespace pcclsm {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

class CsvReader {
public:
    explicit CsvReader(std::string text) : text_(std::move(text)) {}

    // Reads one record; returns false at end of input. Sets `blank` for an
    // empty line, which callers skip.
    bool next(std::vector<std::string>& fields, bool& blank) {
        fields.clear();
        blank = false;
        if (pos_ >= text_.size()) return false;
        ++line_;
        start_line_ = line_;
        std::string field;
        bool quoted = false;
        bool any = false;
        while (pos_ < text_.size()) {
            const char c = text_[pos_++];
            if (quoted) {
                if (c == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"') {
                quoted = true;
                any = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                any = true;
            } else if (c == '\n') {
                break;
            } else if (c == '\r') {
                if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
                break;
            } else {
                field.push_back(c);
                any = true;
            }
        }
        if (quoted) {
            throw DataError("unterminated quoted field starting on line " + std::to_string(start_line_));
        }
        if (!any && field.empty()) {
            blank = true;
            return true;
        }
        fields.push_back(std::move(field));
        return true;
    }

    std::size_t line() const { return start_line_; }

private:
    std::string text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
    std::size_t start_line_ = 0;
};

std::vector<std::size_t> positions_of(const std::vector<std::uint8_t>& labels, std::uint8_t label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) out.push_back(i);
    }
    return out;
}

}  // namespace

std::optional<std::size_t> RawRecordTable::column_index(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

RawRecordTable parse_csv(std::istream& in, const std::string& source_name,
                         const std::optional<std::vector<std::string>>& expected_header) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

    CsvReader reader(std::move(text));
    RawRecordTable table;
    table.source_path = source_name;

    std::vector<std::string> fields;
    bool blank = false;
    while (reader.next(fields, blank) && blank) {
    }
    if (fields.empty()) throw DataError(source_name + ": empty file (no header row)");
    table.header = fields;
    for (auto& name : table.header) name = std::string(trim(name));

    std::unordered_set<std::string> seen;
    for (const auto& name : table.header) {
        if (!seen.insert(name).second) {
            throw DataError(source_name + ": duplicate column name '" + name + "' in header");
        }
    }
    if (expected_header && *expected_header != table.header) {
        throw DataError(source_name + ": header does not match the expected schema");
    }

    std::size_t data_row = 0;
    while (reader.next(fields, blank)) {
        if (blank) continue;
        ++data_row;
        if (fields.size() != table.header.size()) {
            throw DataError(source_name + ": ragged row " + std::to_string(data_row) + " (line " +
                            std::to_string(reader.line()) + ") has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

RawRecordTable load_csv(const std::filesystem::path& path,
                        const std::optional<std::vector<std::string>>& expected_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
    return parse_csv(in, path.string(), expected_header);
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::size_t rows)
    : names_(std::move(column_names)), rows_(rows), values_(rows * names_.size(), 0.0) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) throw UsageError("duplicate feature column '" + n + "'");
    }
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::vector<double> row_major_values)
    : FeatureMatrix(std::move(column_names), 0) {
    if (names_.empty()) {
        if (!row_major_values.empty()) throw UsageError("values given for a matrix without columns");
        return;
    }
    if (row_major_values.size() % names_.size() != 0) {
        throw UsageError("value count is not a multiple of the column count");
    }
    rows_ = row_major_values.size() / names_.size();
    values_ = std::move(row_major_values);
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(names_, indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= rows_) throw UsageError("row index out of range");
        std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(indices[k] * cols()), cols(),
                    out.values_.begin() + static_cast<std::ptrdiff_t>(k * cols()));
    }
    return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
    std::vector<std::size_t> source;
    for (const auto& name : names) {
        const auto idx = column_index(name);
        if (!idx) throw UsageError("column '" + name + "' is not present in the matrix");
        source.push_back(*idx);
    }
    FeatureMatrix out(std::vector<std::string>(names.begin(), names.end()), rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < source.size(); ++k) out(r, k) = (*this)(r, source[k]);
    }
    return out;
}

void FeatureMatrix::require_finite() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("non-finite value in column '" + names_[i % cols()] + "' at row " +
                            std::to_string(i / cols() + 1));
        }
    }
}

LabelVector::LabelVector(std::vector<std::uint8_t> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > 1) {
            throw DataError("label at row " + std::to_string(i + 1) + " is not 0 or 1");
        }
    }
}

std::size_t LabelVector::count(std::uint8_t label) const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), label));
}

LabelVector LabelVector::select(std::span<const std::size_t> indices) const {
    std::vector<std::uint8_t> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(values_.at(i));
    return LabelVector(std::move(out));
}

LabelVector LabelVector::complement() const {
    std::vector<std::uint8_t> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(1 - v); });
    return LabelVector(std::move(out));
}

std::optional<double> ColumnEncoding::encode(std::string_view value) const {
    const auto it = std::find(categories.begin(), categories.end(), value);
    if (it == categories.end()) return std::nullopt;
    return static_cast<double>(it - categories.begin());
}

const std::string& ColumnEncoding::decode(std::size_t code) const {
    if (code >= categories.size()) {
        throw UsageError("code " + std::to_string(code) + " has no category in column '" + column + "'");
    }
    return categories[code];
}

const ColumnEncoding* EncodingMap::find(std::string_view column) const {
    for (const auto& c : columns) {
        if (c.column == column) return &c;
    }
    return nullptr;
}

PreparedData prepare(const RawRecordTable& table, const PrepareOptions& options) {
    const auto require_column = [&](const std::string& name, const char* role) {
        const auto idx = table.column_index(name);
        if (!idx) {
            throw DataError(std::string(role) + " column '" + name + "' is not in the header of " +
                            table.source_path);
        }
        return *idx;
    };

    const std::size_t label_idx = require_column(options.label_column, "label");
    std::vector<bool> excluded(table.column_count(), false);
    excluded[label_idx] = true;
    for (const auto& name : options.drop_columns) excluded[require_column(name, "drop")] = true;
    if (options.category_column) excluded[require_column(*options.category_column, "category")] = true;

    std::vector<std::size_t> feature_src;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        if (!excluded[c]) {
            feature_src.push_back(c);
            feature_names.push_back(table.header[c]);
        }
    }
    if (feature_src.empty()) throw DataError("no feature columns remain after dropping");
    if (table.rows.empty()) throw DataError(table.source_path + ": no data rows");

    std::vector<bool> nominal(feature_src.size(), false);
    if (options.categorical_columns) {
        for (const auto& name : *options.categorical_columns) {
            const auto it = std::find(feature_names.begin(), feature_names.end(), name);
            if (it == feature_names.end()) {
                throw DataError("categorical column '" + name + "' is not a feature column");
            }
            nominal[static_cast<std::size_t>(it - feature_names.begin())] = true;
        }
    } else {
        for (std::size_t k = 0; k < feature_src.size(); ++k) {
            nominal[k] = !parse_number(table.rows.front()[feature_src[k]]).has_value();
        }
    }

    const std::size_t n = table.row_count();
    FeatureMatrix x(feature_names, n);
    EncodingMap encodings;
    for (std::size_t k = 0; k < feature_src.size(); ++k) {
        const std::size_t src = feature_src[k];
        if (nominal[k]) {
            ColumnEncoding enc{feature_names[k], {}};
            std::unordered_map<std::string, std::size_t> codes;
            for (std::size_t r = 0; r < n; ++r) {
                const auto& value = table.rows[r][src];
                auto [it, inserted] = codes.try_emplace(value, enc.categories.size());
                if (inserted) enc.categories.push_back(value);
                x(r, k) = static_cast<double>(it->second);
            }
            encodings.columns.push_back(std::move(enc));
        } else {
            for (std::size_t r = 0; r < n; ++r) {
                const auto v = parse_number(table.rows[r][src]);
                if (!v) {
                    throw DataError("unparseable numeric value '" + table.rows[r][src] + "' in column '" +
                                    feature_names[k] + "' at row " + std::to_string(r + 1));
                }
                x(r, k) = *v;
            }
        }
    }

    std::vector<std::uint8_t> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto text = trim(table.rows[r][label_idx]);
        if (text == "0") {
            labels[r] = 0;
        } else if (text == "1") {
            labels[r] = 1;
        } else {
            throw DataError("label '" + std::string(text) + "' at row " + std::to_string(r + 1) +
                            " is not 0 or 1");
        }
    }

    x.require_finite();
    return {std::move(x), LabelVector(std::move(labels)), std::move(encodings)};
}

FeatureMatrix min_max_scale(const FeatureMatrix& x) {
    FeatureMatrix out = x;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double lo = x.rows() ? x(0, c) : 0.0;
        double hi = lo;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            lo = std::min(lo, x(r, c));
            hi = std::max(hi, x(r, c));
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = span > 0.0 ? (x(r, c) - lo) / span : 0.0;
    }
    return out;
}

Split stratified_split(const FeatureMatrix& x, const LabelVector& y, double test_fraction,
                       std::uint64_t seed) {
    if (x.rows() != y.size()) throw UsageError("feature and label row counts differ");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw UsageError("test fraction must lie strictly between 0 and 1");
    }
    Rng rng(seed);
    Split split;
    for (std::uint8_t label : {std::uint8_t{0}, std::uint8_t{1}}) {
        auto members = positions_of(y.values(), label);
        if (members.size() < 2) {
            throw DataError("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                            " rows; stratified splitting needs at least 2");
        }
        rng.shuffle(std::span<std::size_t>(members));
        const auto total = members.size();
        std::size_t n_test;
        if (test_fraction <= 0.5) {
            n_test = static_cast<std::size_t>(std::floor(static_cast<double>(total) * test_fraction + 0.5));
        } else {
            n_test = total - static_cast<std::size_t>(
                                 std::floor(static_cast<double>(total) * (1.0 - test_fraction) + 0.5));
        }
        n_test = std::clamp<std::size_t>(n_test, 1, total - 1);
        const auto cut = static_cast<std::ptrdiff_t>(test_fraction <= 0.5 ? n_test : total - n_test);
        auto& first = test_fraction <= 0.5 ? split.test_rows : split.train_rows;
        auto& second = test_fraction <= 0.5 ? split.train_rows : split.test_rows;
        first.insert(first.end(), members.begin(), members.begin() + cut);
        second.insert(second.end(), members.begin() + cut, members.end());
    }
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
    split.train_x = x.select_rows(split.train_rows);
    split.train_y = y.select(split.train_rows);
    split.test_x = x.select_rows(split.test_rows);
    split.test_y = y.select(split.test_rows);
    return split;
}

std::vector<std::size_t> stratified_sample(const LabelVector& y, std::size_t size, std::uint64_t seed) {
    if (size > y.size()) {
        throw UsageError("sample size " + std::to_string(size) + " exceeds the " + std::to_string(y.size()) +
                         " available rows");
    }
    if (size == y.size()) {
        std::vector<std::size_t> all(y.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    // Largest-remainder allocation so the class quotas sum to `size` exactly.
    const double ratio = static_cast<double>(size) / static_cast<double>(y.size());
    std::vector<std::size_t> members[2] = {positions_of(y.values(), 0), positions_of(y.values(), 1)};
    std::size_t quota[2];
    double remainder[2];
    for (int c = 0; c < 2; ++c) {
        const double exact = static_cast<double>(members[c].size()) * ratio;
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - static_cast<double>(quota[c]);
    }
    std::size_t missing = size - quota[0] - quota[1];
    for (int c : {remainder[1] > remainder[0] ? 1 : 0, remainder[1] > remainder[0] ? 0 : 1}) {
        if (missing > 0 && quota[c] < members[c].size()) {
            ++quota[c];
            --missing;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> out;
    for (int c = 0; c < 2; ++c) {
        rng.shuffle(std::span<std::size_t>(members[c]));
        out.insert(out.end(), members[c].begin(),
                   members[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pcclsm
