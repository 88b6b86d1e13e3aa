#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "skycast/series.hpp"

namespace skycast {

// Input rows are `timestamp,ghi` or `timestamp,ghi,clearsky` with a
// mandatory header naming exactly those columns. Missing measurements are
// an empty field or NaN.
struct CsvSchema {
    bool has_clearsky = false;
};

struct IngestResult {
    IrradianceSeries ghi;
    std::optional<ClearSkySeries> clearsky;
    std::size_t rows = 0;
};

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema);
IngestResult ingest_csv(std::istream& in, const CsvSchema& schema,
                        const std::string& source_name);

// Inverse of ingest_csv; missing values become empty fields.
void write_series_csv(std::ostream& out, const IrradianceSeries& ghi,
                      const ClearSkySeries* clearsky);
void write_series_csv(const std::string& path, const IrradianceSeries& ghi,
                      const ClearSkySeries* clearsky);

}  // namespace skycast
