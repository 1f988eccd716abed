#include <tabml/table.hpp>

#include <tabml/rng.hpp>
#include <tabml/text.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tabml {
namespace {

using json = nlohmann::json;

bool isMissingToken(const std::string& cell) { return cell.empty() || cell == "NA"; }

// Splits CSV text into records of fields, honoring quoted fields with ""
// escapes and embedded delimiters/newlines. CRLF and LF both end records.
std::vector<std::vector<std::string>> parseCsvRecords(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool inQuotes = false;
    bool fieldWasQuoted = false;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto endField = [&]() {
        record.push_back(std::move(field));
        field.clear();
        fieldWasQuoted = false;
    };
    auto endRecord = [&]() {
        endField();
        records.push_back(std::move(record));
        record.clear();
    };

    while (i < n) {
        const char c = text[i];
        if (inQuotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    inQuotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !fieldWasQuoted) {
                    inQuotes = true;
                    fieldWasQuoted = true;
                } else {
                    field.push_back(c);
                }
                ++i;
                break;
            case ',':
                endField();
                ++i;
                break;
            case '\r':
                if (i + 1 < n && text[i + 1] == '\n') {
                    endRecord();
                    i += 2;
                } else {
                    field.push_back(c);
                    ++i;
                }
                break;
            case '\n':
                endRecord();
                ++i;
                break;
            default:
                field.push_back(c);
                ++i;
                break;
        }
    }
    if (inQuotes) throw DataError("CSV parse error: unterminated quoted field");
    if (!field.empty() || !record.empty() || fieldWasQuoted) endRecord();
    return records;
}

std::string escapeCsvField(const std::string& field) {
    const bool needsQuotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needsQuotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

ColumnKind kindFromString(const std::string& text) {
    if (text == "numeric") return ColumnKind::Numeric;
    if (text == "categorical") return ColumnKind::Categorical;
    throw ConfigError("schema: unknown column kind '" + text + "'");
}

ColumnRole roleFromString(const std::string& text) {
    if (text == "feature") return ColumnRole::Feature;
    if (text == "target") return ColumnRole::Target;
    if (text == "identifier") return ColumnRole::Identifier;
    throw ConfigError("schema: unknown column role '" + text + "'");
}

const char* kindToString(ColumnKind kind) {
    return kind == ColumnKind::Numeric ? "numeric" : "categorical";
}

const char* roleToString(ColumnRole role) {
    switch (role) {
        case ColumnRole::Feature: return "feature";
        case ColumnRole::Target: return "target";
        default: return "identifier";
    }
}

}  // namespace

Table Table::fromColumns(std::vector<ColumnSchema> schema, std::vector<Column> columns) {
    if (schema.size() != columns.size()) {
        throw DataError("Table: schema and column counts differ");
    }
    Table table;
    table.nRows_ = columns.empty()
                       ? 0
                       : std::visit([](const auto& v) { return v.size(); }, columns[0].values);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const std::size_t len =
            std::visit([](const auto& v) { return v.size(); }, columns[c].values);
        if (len != table.nRows_ || columns[c].missing.size() != table.nRows_) {
            throw DataError("Table: column '" + schema[c].name + "' has inconsistent length");
        }
        const bool holdsNumeric =
            std::holds_alternative<std::vector<double>>(columns[c].values);
        if (holdsNumeric != (schema[c].kind == ColumnKind::Numeric)) {
            throw DataError("Table: column '" + schema[c].name + "' storage mismatches its kind");
        }
    }
    table.schema_ = std::move(schema);
    table.columns_ = std::move(columns);
    return table;
}

bool Table::hasColumn(const std::string& name) const {
    for (const auto& col : schema_) {
        if (col.name == name) return true;
    }
    return false;
}

std::size_t Table::columnIndex(const std::string& name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].name == name) return i;
    }
    throw DataError("no column named '" + name + "'");
}

std::size_t Table::targetIndex() const {
    std::size_t found = schema_.size();
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].role != ColumnRole::Target) continue;
        if (found != schema_.size()) throw DataError("table has more than one target column");
        found = i;
    }
    if (found == schema_.size()) throw DataError("table has no target column");
    return found;
}

Table Table::selectRows(const std::vector<std::size_t>& rows) const {
    std::vector<Column> picked(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const Column& src = columns_[c];
        Column& dst = picked[c];
        dst.missing.reserve(rows.size());
        if (schema_[c].kind == ColumnKind::Numeric) {
            std::vector<double> values;
            values.reserve(rows.size());
            for (std::size_t r : rows) values.push_back(src.numeric().at(r));
            dst.values = std::move(values);
        } else {
            std::vector<std::string> values;
            values.reserve(rows.size());
            for (std::size_t r : rows) values.push_back(src.labels().at(r));
            dst.values = std::move(values);
        }
        for (std::size_t r : rows) dst.missing.push_back(src.missing.at(r));
    }
    return fromColumns(schema_, std::move(picked));
}

int EncoderMap::indexOf(const std::string& label) const {
    for (std::size_t i = 0; i < categories.size(); ++i) {
        if (categories[i] == label) return static_cast<int>(i);
    }
    return -1;
}

std::vector<ColumnSchema> schemaFromJson(const std::string& text) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("schema: invalid JSON: ") + e.what());
    }
    if (!parsed.is_array()) throw ConfigError("schema: expected a JSON array");
    std::vector<ColumnSchema> schema;
    for (const auto& entry : parsed) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("kind") ||
            !entry.contains("role")) {
            throw ConfigError("schema: each entry needs name, kind and role");
        }
        ColumnSchema col;
        col.name = entry.at("name").get<std::string>();
        col.kind = kindFromString(entry.at("kind").get<std::string>());
        col.role = roleFromString(entry.at("role").get<std::string>());
        schema.push_back(std::move(col));
    }
    if (schema.empty()) throw ConfigError("schema: no columns defined");
    return schema;
}

std::vector<ColumnSchema> loadSchema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("schema: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return schemaFromJson(buffer.str());
}

std::string schemaToJson(const std::vector<ColumnSchema>& schema) {
    json out = json::array();
    for (const auto& col : schema) {
        out.push_back({{"name", col.name},
                       {"kind", kindToString(col.kind)},
                       {"role", roleToString(col.role)}});
    }
    return out.dump(2) + "\n";
}

std::vector<std::string> csvHeader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csvHeader: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto records = parseCsvRecords(buffer.str());
    if (records.empty()) throw DataError("csvHeader: '" + path + "' is empty");
    return records[0];
}

Table loadCsv(const std::string& path, const std::vector<ColumnSchema>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("loadCsv: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto records = parseCsvRecords(buffer.str());
    if (records.empty()) throw DataError("loadCsv: '" + path + "' is empty");

    const auto& header = records[0];
    // schema position -> file column position
    std::vector<std::size_t> filePos(schema.size(), header.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (header[h] != schema[s].name) continue;
            if (filePos[s] != header.size()) {
                throw DataError("loadCsv: duplicate header column '" + schema[s].name + "'");
            }
            filePos[s] = h;
        }
        if (filePos[s] == header.size()) {
            throw DataError("loadCsv: header is missing schema column '" + schema[s].name + "'");
        }
    }
    if (header.size() != schema.size()) {
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (std::find(filePos.begin(), filePos.end(), h) == filePos.end()) {
                throw DataError("loadCsv: header column '" + header[h] +
                                "' does not appear in the schema");
            }
        }
    }

    const std::size_t nRows = records.size() - 1;
    std::vector<Column> columns(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (schema[c].kind == ColumnKind::Numeric) {
            columns[c].values = std::vector<double>(nRows, 0.0);
        } else {
            columns[c].values = std::vector<std::string>(nRows);
        }
        columns[c].missing.assign(nRows, 0);
    }

    for (std::size_t r = 0; r < nRows; ++r) {
        const auto& record = records[r + 1];
        if (record.size() != header.size()) {
            throw DataError("loadCsv: row " + std::to_string(r + 1) + " has " +
                            std::to_string(record.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string& cell = record[filePos[c]];
            if (isMissingToken(cell)) {
                columns[c].missing[r] = 1;
                continue;
            }
            if (schema[c].kind == ColumnKind::Numeric) {
                double value = 0.0;
                if (!tryParseDouble(cell, value)) {
                    throw DataError("loadCsv: row " + std::to_string(r + 1) + ", column '" +
                                    schema[c].name + "': cannot parse '" + cell +
                                    "' as a finite number");
                }
                columns[c].numeric()[r] = value;
            } else {
                columns[c].labels()[r] = cell;
            }
        }
    }
    return Table::fromColumns(schema, std::move(columns));
}

std::string tableToCsv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columnCount(); ++c) {
        if (c > 0) out.push_back(',');
        out += escapeCsvField(table.schemaAt(c).name);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        for (std::size_t c = 0; c < table.columnCount(); ++c) {
            if (c > 0) out.push_back(',');
            const Column& col = table.column(c);
            if (col.isMissing(r)) continue;
            if (table.schemaAt(c).kind == ColumnKind::Numeric) {
                out += formatDouble(col.numeric()[r]);
            } else {
                out += escapeCsvField(col.labels()[r]);
            }
        }
        out.push_back('\n');
    }
    return out;
}

void saveCsv(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("saveCsv: cannot open '" + path + "' for writing");
    out << tableToCsv(table);
    if (!out) throw DataError("saveCsv: write to '" + path + "' failed");
}

const std::string& imputeStrategyName(ImputeStrategy strategy) {
    static const std::string kMean = "mean";
    static const std::string kMedian = "median";
    return strategy == ImputeStrategy::Mean ? kMean : kMedian;
}

ImputeStrategy imputeStrategyFromName(const std::string& name) {
    if (name == "mean") return ImputeStrategy::Mean;
    if (name == "median") return ImputeStrategy::Median;
    throw ConfigError("unknown imputation strategy '" + name + "'");
}

const std::string& encodingModeName(EncodingMode mode) {
    static const std::string kInteger = "integer";
    static const std::string kOneHot = "one_hot";
    return mode == EncodingMode::Integer ? kInteger : kOneHot;
}

EncodingMode encodingModeFromName(const std::string& name) {
    if (name == "integer") return EncodingMode::Integer;
    if (name == "one_hot") return EncodingMode::OneHot;
    throw ConfigError("unknown encoding mode '" + name + "'");
}

double imputeValue(const Table& table, const std::string& columnName,
                   ImputeStrategy strategy) {
    const std::size_t idx = table.columnIndex(columnName);
    if (table.schemaAt(idx).kind != ColumnKind::Numeric) {
        throw DataError("impute: column '" + columnName + "' is not numeric");
    }
    const Column& col = table.column(idx);
    std::vector<double> observed;
    observed.reserve(table.rowCount());
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        if (!col.isMissing(r)) observed.push_back(col.numeric()[r]);
    }
    if (observed.empty()) {
        throw DataError("impute: column '" + columnName + "' has no observed values");
    }
    if (strategy == ImputeStrategy::Mean) {
        double sum = 0.0;
        for (double v : observed) sum += v;
        return sum / static_cast<double>(observed.size());
    }
    std::sort(observed.begin(), observed.end());
    const std::size_t n = observed.size();
    if (n % 2 == 1) return observed[n / 2];
    return (observed[n / 2 - 1] + observed[n / 2]) / 2.0;
}

Table imputeWith(const Table& table, const std::string& columnName, double value) {
    const std::size_t idx = table.columnIndex(columnName);
    if (table.schemaAt(idx).kind != ColumnKind::Numeric) {
        throw DataError("impute: column '" + columnName + "' is not numeric");
    }
    std::vector<Column> columns;
    columns.reserve(table.columnCount());
    for (std::size_t c = 0; c < table.columnCount(); ++c) columns.push_back(table.column(c));
    Column& col = columns[idx];
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        if (col.missing[r]) {
            col.numeric()[r] = value;
            col.missing[r] = 0;
        }
    }
    return Table::fromColumns(table.schema(), std::move(columns));
}

Table impute(const Table& table, const std::string& columnName, ImputeStrategy strategy) {
    return imputeWith(table, columnName, imputeValue(table, columnName, strategy));
}

EncoderMap fitEncoder(const Table& table, const std::string& columnName, EncodingMode mode) {
    const std::size_t idx = table.columnIndex(columnName);
    if (table.schemaAt(idx).kind != ColumnKind::Categorical) {
        throw DataError("fitEncoder: column '" + columnName + "' is not categorical");
    }
    const Column& col = table.column(idx);
    EncoderMap encoder;
    encoder.column = columnName;
    encoder.mode = mode;
    for (std::size_t r = 0; r < table.rowCount(); ++r) {
        if (col.isMissing(r)) {
            throw DataError("fitEncoder: column '" + columnName + "' has missing cells");
        }
        const std::string& label = col.labels()[r];
        if (encoder.indexOf(label) < 0) encoder.categories.push_back(label);
    }
    return encoder;
}

Table applyEncoder(const Table& table, const EncoderMap& encoder) {
    const std::size_t idx = table.columnIndex(encoder.column);
    if (table.schemaAt(idx).kind != ColumnKind::Categorical) {
        throw DataError("applyEncoder: column '" + encoder.column + "' is not categorical");
    }
    const Column& src = table.column(idx);
    const std::size_t nRows = table.rowCount();

    std::vector<int> codes(nRows, 0);
    for (std::size_t r = 0; r < nRows; ++r) {
        if (src.isMissing(r)) {
            throw DataError("applyEncoder: column '" + encoder.column + "' has missing cells");
        }
        const int code = encoder.indexOf(src.labels()[r]);
        if (code < 0) {
            throw DataError("applyEncoder: unknown category '" + src.labels()[r] +
                            "' in column '" + encoder.column + "'");
        }
        codes[r] = code;
    }

    std::vector<ColumnSchema> schema;
    std::vector<Column> columns;
    for (std::size_t c = 0; c < table.columnCount(); ++c) {
        if (c != idx) {
            schema.push_back(table.schemaAt(c));
            columns.push_back(table.column(c));
            continue;
        }
        if (encoder.mode == EncodingMode::Integer) {
            ColumnSchema encoded = table.schemaAt(c);
            encoded.kind = ColumnKind::Numeric;
            schema.push_back(std::move(encoded));
            Column col;
            std::vector<double> values(nRows);
            for (std::size_t r = 0; r < nRows; ++r) values[r] = static_cast<double>(codes[r]);
            col.values = std::move(values);
            col.missing.assign(nRows, 0);
            columns.push_back(std::move(col));
        } else {
            for (std::size_t cat = 0; cat < encoder.categories.size(); ++cat) {
                ColumnSchema binary;
                binary.name = encoder.column + "=" + encoder.categories[cat];
                binary.kind = ColumnKind::Numeric;
                binary.role = table.schemaAt(c).role;
                schema.push_back(std::move(binary));
                Column col;
                std::vector<double> values(nRows, 0.0);
                for (std::size_t r = 0; r < nRows; ++r) {
                    values[r] = codes[r] == static_cast<int>(cat) ? 1.0 : 0.0;
                }
                col.values = std::move(values);
                col.missing.assign(nRows, 0);
                columns.push_back(std::move(col));
            }
        }
    }
    return Table::fromColumns(std::move(schema), std::move(columns));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> splitIndices(
    std::size_t nRows, double testFraction, std::uint64_t seed) {
    if (!(testFraction > 0.0 && testFraction < 1.0)) {
        throw ConfigError("splitTrainTest: test fraction must lie in (0, 1)");
    }
    if (nRows < 2) throw DataError("splitTrainTest: need at least 2 rows");
    Xorshift64Star rng(seed);
    const std::vector<std::size_t> perm = randomPermutation(nRows, rng);
    const auto testCount = static_cast<std::size_t>(
        std::lround(testFraction * static_cast<double>(nRows)));
    const std::size_t trainCount = nRows - testCount;
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(trainCount));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(trainCount), perm.end());
    return {std::move(train), std::move(test)};
}

std::pair<Table, Table> splitTrainTest(const Table& table, double testFraction,
                                       std::uint64_t seed) {
    const auto [trainRows, testRows] = splitIndices(table.rowCount(), testFraction, seed);
    return {table.selectRows(trainRows), table.selectRows(testRows)};
}

}  // namespace tabml
