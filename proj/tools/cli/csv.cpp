#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>

#include "sgpvsel/error.hpp"

namespace sgpvsel::cli {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool parse_double(const std::string& cell, double& out)
{
    const std::string t = trim(cell);
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

CsvTable parse_csv(std::istream& in)
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) {
        text.erase(0, 3);
    }

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        // A blank line is a single empty unquoted field; skip it.
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                line += c == '\n' ? 1 : 0;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted) {
                throw Error(ErrorCode::Parse, "stray quote in field on line " + std::to_string(line));
            }
            quoted = true;
            field_was_quoted = true;
            break;
        case ',': end_field(); break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                break;
            }
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            break;
        default:
            if (field_was_quoted) {
                throw Error(ErrorCode::Parse, "text after closing quote on line " + std::to_string(line));
            }
            field += c;
        }
    }
    if (quoted) {
        throw Error(ErrorCode::Parse, "unterminated quoted field");
    }
    if (!field.empty() || field_was_quoted || !record.empty()) {
        end_record();
    }
    if (records.empty()) {
        throw Error(ErrorCode::Parse, "CSV input is empty; a header row is required");
    }

    CsvTable table;
    table.header = std::move(records.front());
    std::set<std::string> seen;
    for (auto& name : table.header) {
        name = trim(name);
        if (name.empty()) {
            throw Error(ErrorCode::Parse, "header has an empty column name");
        }
        if (!seen.insert(name).second) {
            throw Error(ErrorCode::Parse, "duplicate column name '" + name + "'");
        }
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw Error(ErrorCode::Parse, "record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size())
                                              + " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return parse_csv(in);
}

bool is_missing(const std::string& cell)
{
    const std::string t = lower(trim(cell));
    return t.empty() || t == "na" || t == "nan" || t == "null" || t == ".";
}

LoadedData table_to_dataset(const CsvTable& table, const std::string& outcome)
{
    const auto it = std::find(table.header.begin(), table.header.end(), outcome);
    if (it == table.header.end()) {
        throw Error(ErrorCode::OutcomeMissing, "outcome column '" + outcome + "' not found in header");
    }
    const auto y_col = static_cast<std::size_t>(it - table.header.begin());
    const std::size_t cols = table.header.size();
    if (cols < 3) {
        throw Error(ErrorCode::InvalidArgument, "need at least two feature columns besides the outcome");
    }

    // Type-check every non-missing cell first so the error names the column
    // even when the offending row would have been dropped.
    std::vector<std::vector<double>> values(table.rows.size(), std::vector<double>(cols, 0.0));
    std::vector<bool> complete(table.rows.size(), true);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string& cell = table.rows[r][c];
            if (is_missing(cell)) {
                complete[r] = false;
            } else if (!parse_double(cell, values[r][c])) {
                throw Error(ErrorCode::NonNumericColumn,
                            "column '" + table.header[c] + "' has non-numeric value '" + cell + "'");
            }
        }
    }

    const auto kept = static_cast<Index>(std::count(complete.begin(), complete.end(), true));
    if (kept < 2) {
        throw Error(ErrorCode::TooFewRows, "fewer than two complete rows");
    }
    Vector y(kept);
    Matrix X(kept, static_cast<Index>(cols - 1));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols; ++c) {
        if (c != y_col) {
            names.push_back(table.header[c]);
        }
    }
    Index row = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (!complete[r]) {
            continue;
        }
        Index j = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (c == y_col) {
                y(row) = values[r][c];
            } else {
                X(row, j++) = values[r][c];
            }
        }
        ++row;
    }
    LoadedData out{Dataset(std::move(y), std::move(X), std::move(names)), outcome, table.rows.size(),
                   table.rows.size() - static_cast<std::size_t>(kept)};
    return out;
}

} // namespace sgpvsel::cli
