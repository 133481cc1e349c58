#pragma once

#include "moped/detector.hpp"
#include "moped/margins.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace moped {

/// Parsed numeric table, before any validation of its values.
struct CsvTable {
    std::vector<std::string> header;  ///< empty if the file had none
    Matrix values;
};

/// Rectangular numeric CSV with an optional header row (detected when the
/// first row contains a non-numeric cell). Keeps rows 1, 1 + stride, ...
CsvTable read_csv(std::istream& in, std::size_t stride = 1);
CsvTable read_csv(const std::filesystem::path& path, std::size_t stride = 1);

/// read_csv, validated as a RawSeries.
RawSeries ingest_csv(const std::filesystem::path& path, std::size_t stride = 1);

/// "%.17g" formatting, the round-trip representation used in every output file.
std::string format_double(double value);

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header = {});

/// Two columns, t and T, one row per t in [G, n - G].
void write_trace_csv(std::ostream& out, const DetectorTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const DetectorTrace& trace);

}  // namespace moped
