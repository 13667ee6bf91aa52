#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace mfc::detail {

std::string sha1_hex(const std::string& data);

// write to <name>.tmp in dir, then rename; no partial files on failure
void write_file_atomic(const std::filesystem::path& dir, const std::string& name,
                       const std::string& content);

// fixed %.17g round-trip formatting for CSV payloads
std::string format_double(double value);
// compact %.6g for plot labels
std::string format_label(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render() const;
};

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// minimal deterministic line chart; no external plotting dependency
std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<SvgSeries>& series);

}  // namespace mfc::detail
