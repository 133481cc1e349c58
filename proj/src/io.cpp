#include "moped/io.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

namespace moped {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start)));
        if (comma == std::string_view::npos) {
            return cells;
        }
        start = comma + 1;
    }
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        return std::nullopt;
    }
    return value;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    return out;
}

}  // namespace

CsvTable read_csv(std::istream& in, std::size_t stride) {
    if (stride == 0) {
        throw Error(ErrorCode::InvalidArgument, "stride must be at least 1");
    }
    CsvTable table;
    std::vector<double> data;
    std::size_t width = 0;
    std::size_t data_rows = 0;
    std::size_t kept = 0;
    std::size_t line_no = 0;
    bool first = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line);
        if (first) {
            first = false;
            width = cells.size();
            const bool numeric = std::all_of(cells.begin(), cells.end(),
                                             [](std::string_view c) { return parse_number(c).has_value(); });
            if (!numeric) {
                for (const auto c : cells) {
                    table.header.emplace_back(c);
                }
                continue;
            }
        }
        if (cells.size() != width) {
            throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + " has " +
                                                     std::to_string(cells.size()) + " fields, expected " +
                                                     std::to_string(width));
        }
        const bool keep = data_rows % stride == 0;
        ++data_rows;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column " +
                                                       std::to_string(c + 1) + ": cannot parse '" +
                                                       std::string(cells[c]) + "'");
            }
            if (keep) {
                data.push_back(*value);
            }
        }
        kept += keep ? 1 : 0;
    }
    if (kept == 0) {
        throw Error(ErrorCode::EmptyData, "CSV contains no data rows");
    }
    table.values = Eigen::Map<const Matrix>(data.data(), static_cast<Eigen::Index>(kept),
                                            static_cast<Eigen::Index>(width));
    return table;
}

CsvTable read_csv(const std::filesystem::path& path, std::size_t stride) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    return read_csv(in, stride);
}

RawSeries ingest_csv(const std::filesystem::path& path, std::size_t stride) {
    return RawSeries(read_csv(path, stride).values);
}

std::string format_double(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            out << (c ? "," : "") << header[c];
        }
        out << '\n';
    }
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out << (c ? "," : "") << format_double(values(r, c));
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header) {
    auto out = open_output(path);
    write_csv(out, values, header);
}

void write_trace_csv(std::ostream& out, const DetectorTrace& trace) {
    out << "t,T\n";
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        out << trace.time_at(i) << ',' << format_double(trace.values[i]) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const DetectorTrace& trace) {
    auto out = open_output(path);
    write_trace_csv(out, trace);
}

}  // namespace moped
