#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sgpvsel/linalg.hpp"

namespace sgpvsel::cli {

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 reader: comma separated, double-quoted fields with "" escapes,
/// quoted line breaks, LF or CRLF endings, optional UTF-8 BOM. The first
/// record is the header. Throws Parse on malformed input.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct LoadedData
{
    Dataset data;
    std::string outcome;
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;  ///< listwise deletion of missing values
};

/// True for cells treated as missing: empty, NA, NaN, null (any case) and ".".
bool is_missing(const std::string& cell);

/// Outcome column `outcome`, every other column a feature. Throws
/// OutcomeMissing, NonNumericColumn (naming the column) or InvalidArgument
/// when fewer than two features or two complete rows remain.
LoadedData table_to_dataset(const CsvTable& table, const std::string& outcome);

} // namespace sgpvsel::cli
