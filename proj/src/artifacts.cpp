#include "artifacts.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace mfc::detail {

std::string sha1_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha1(), nullptr) != 1) {
        throw std::runtime_error("sha1 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0x0F]);
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& dir, const std::string& name,
                       const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path tmp = dir / (name + ".tmp");
    const std::filesystem::path target = dir / name;
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string format_label(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c > 0) {
            out.push_back(',');
        }
        out += header[c];
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw std::logic_error("csv row width does not match the header");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out.push_back(',');
            }
            out += row[c];
        }
        out.push_back('\n');
    }
    return out;
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 64.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string format_coord(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<SvgSeries>& series) {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    double y_min = x_min;
    double y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw std::invalid_argument("svg series needs matching x and y lengths");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                continue;
            }
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!(x_min <= x_max)) {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max == x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double plot_w = kWidth - 2.0 * kMargin;
    const double plot_h = kHeight - 2.0 * kMargin;
    auto px = [&](double x) { return kMargin + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
        return kHeight - kMargin - (y - y_min) / (y_max - y_min) * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"360\" y=\"28\" font-family=\"monospace\" font-size=\"16\" "
           "text-anchor=\"middle\">" + title + "</text>\n";
    // axes
    svg += "<line x1=\"" + format_coord(kMargin) + "\" y1=\"" + format_coord(kHeight - kMargin) +
           "\" x2=\"" + format_coord(kWidth - kMargin) + "\" y2=\"" +
           format_coord(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_coord(kMargin) + "\" y1=\"" + format_coord(kMargin) +
           "\" x2=\"" + format_coord(kMargin) + "\" y2=\"" + format_coord(kHeight - kMargin) +
           "\" stroke=\"black\"/>\n";
    // range labels
    svg += "<text x=\"" + format_coord(kMargin) + "\" y=\"" + format_coord(kHeight - kMargin + 18.0) +
           "\" font-family=\"monospace\" font-size=\"12\">" + format_label(x_min) + "</text>\n";
    svg += "<text x=\"" + format_coord(kWidth - kMargin) + "\" y=\"" +
           format_coord(kHeight - kMargin + 18.0) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" +
           format_label(x_max) + "</text>\n";
    svg += "<text x=\"" + format_coord(kMargin - 6.0) + "\" y=\"" +
           format_coord(kHeight - kMargin) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" +
           format_label(y_min) + "</text>\n";
    svg += "<text x=\"" + format_coord(kMargin - 6.0) + "\" y=\"" + format_coord(kMargin) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">" +
           format_label(y_max) + "</text>\n";
    svg += "<text x=\"" + format_coord(kWidth / 2.0) + "\" y=\"" +
           format_coord(kHeight - 16.0) +
           "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" + x_label +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + format_coord(kHeight / 2.0) +
           "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " + format_coord(kHeight / 2.0) + ")\">" + y_label +
           "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) {
                continue;
            }
            if (!points.empty()) {
                points.push_back(' ');
            }
            points += format_coord(px(series[s].x[i]));
            points.push_back(',');
            points += format_coord(py(series[s].y[i]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        if (!series[s].label.empty()) {
            const double ly = kMargin + 16.0 * static_cast<double>(s);
            svg += "<text x=\"" + format_coord(kWidth - kMargin - 4.0) + "\" y=\"" +
                   format_coord(ly) + "\" font-family=\"monospace\" font-size=\"12\" "
                   "text-anchor=\"end\" fill=\"" + std::string(color) + "\">" +
                   series[s].label + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace mfc::detail
