#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nlslab::cli {

// shortest text that reads back to the same double; NaN and infinities spelled out
std::string fmt(double v);

// RFC 4180: CRLF records, fields quoted when they contain a comma, quote, CR or LF
std::string csv_field(const std::string& s);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// two-space indented, trailing newline
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y;
  bool dashed = false;
};

// log-log axes with decade ticks and one polyline per series; points with
// nonpositive coordinates are dropped
std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nlslab::cli
