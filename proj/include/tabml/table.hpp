#pragma once

#include <tabml/errors.hpp>
#include <tabml/types.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tabml {

enum class ColumnKind { Numeric, Categorical };
enum class ColumnRole { Feature, Target, Identifier };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    ColumnRole role = ColumnRole::Feature;
};

// Per-column storage. The variant alternative must match the schema kind;
// the missing mask always has one flag per row.
struct Column {
    std::variant<std::vector<double>, std::vector<std::string>> values;
    std::vector<std::uint8_t> missing;

    const std::vector<double>& numeric() const { return std::get<std::vector<double>>(values); }
    std::vector<double>& numeric() { return std::get<std::vector<double>>(values); }
    const std::vector<std::string>& labels() const {
        return std::get<std::vector<std::string>>(values);
    }
    std::vector<std::string>& labels() { return std::get<std::vector<std::string>>(values); }
    bool isMissing(std::size_t row) const { return missing[row] != 0; }
};

// Column-oriented dataset. Immutable once built; operations return new
// tables.
class Table {
public:
    Table() = default;

    // Validates column count and per-column lengths against the schema.
    static Table fromColumns(std::vector<ColumnSchema> schema, std::vector<Column> columns);

    std::size_t rowCount() const { return nRows_; }
    std::size_t columnCount() const { return schema_.size(); }
    const std::vector<ColumnSchema>& schema() const { return schema_; }
    const ColumnSchema& schemaAt(std::size_t idx) const { return schema_.at(idx); }
    const Column& column(std::size_t idx) const { return columns_.at(idx); }
    const Column& column(const std::string& name) const { return columns_.at(columnIndex(name)); }

    bool hasColumn(const std::string& name) const;
    // Throws DataError when the column does not exist.
    std::size_t columnIndex(const std::string& name) const;
    // Index of the single target column; throws unless exactly one exists.
    std::size_t targetIndex() const;

    // New table holding the given rows in the given order.
    Table selectRows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<ColumnSchema> schema_;
    std::vector<Column> columns_;
    std::size_t nRows_ = 0;
};

enum class ImputeStrategy { Mean, Median };
enum class EncodingMode { Integer, OneHot };

const std::string& imputeStrategyName(ImputeStrategy strategy);
ImputeStrategy imputeStrategyFromName(const std::string& name);
const std::string& encodingModeName(EncodingMode mode);
EncodingMode encodingModeFromName(const std::string& name);

struct EncoderMap {
    std::string column;
    std::vector<std::string> categories;  // unique, first-appearance order
    EncodingMode mode = EncodingMode::Integer;

    // Category index, or -1 when the label is unseen.
    int indexOf(const std::string& label) const;
};

// Schema files are JSON arrays of {"name", "kind", "role"} objects.
std::vector<ColumnSchema> loadSchema(const std::string& path);
std::string schemaToJson(const std::vector<ColumnSchema>& schema);
std::vector<ColumnSchema> schemaFromJson(const std::string& text);

// RFC-4180-style CSV: first row is the header, comma delimiter, double-quote
// escaping, LF or CRLF line endings. The header must contain exactly the
// schema names (any order). Empty cells and the literal token "NA" are
// missing; numeric cells must parse to finite reals.
Table loadCsv(const std::string& path, const std::vector<ColumnSchema>& schema);
// Just the header names of a CSV file, in file order.
std::vector<std::string> csvHeader(const std::string& path);
std::string tableToCsv(const Table& table);
void saveCsv(const Table& table, const std::string& path);

// Statistic used to fill a numeric column's missing cells.
double imputeValue(const Table& table, const std::string& column, ImputeStrategy strategy);
// Copy of the table with the column's missing cells replaced by `value`.
Table imputeWith(const Table& table, const std::string& column, double value);
// imputeWith(imputeValue(...)) in one step.
Table impute(const Table& table, const std::string& column, ImputeStrategy strategy);

EncoderMap fitEncoder(const Table& table, const std::string& column, EncodingMode mode);
// Integer mode replaces the column with its category codes. One-hot mode
// replaces it with one binary column per category, named "column=category",
// in category order.
Table applyEncoder(const Table& table, const EncoderMap& encoder);

// Seeded Fisher-Yates permutation, then a split with
// round(testFraction * nRows) test rows. The permutation's leading rows form
// the training set, the trailing rows the test set.
std::pair<Table, Table> splitTrainTest(const Table& table, double testFraction,
                                       std::uint64_t seed);

// Row order of the split above without materializing tables: returns
// (trainRows, testRows).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> splitIndices(
    std::size_t nRows, double testFraction, std::uint64_t seed);

}  // namespace tabml
