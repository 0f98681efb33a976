#include "writers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlslab::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t j = 0; j < header.size(); ++j) s += (j ? "," : "") + csv_field(header[j]);
  s += "\r\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) s += ',';
      s += fmt(r[j]);
    }
    s += "\r\n";
  }
  write_text(path, s);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

namespace {

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series) {
  constexpr double W = 720, H = 480, ml = 80, mr = 170, mt = 40, mb = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!(s.x[k] > 0) || !(s.y[k] > 0) || !std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, std::log10(s.x[k]));
      x1 = std::max(x1, std::log10(s.x[k]));
      y0 = std::min(y0, std::log10(s.y[k]));
      y1 = std::max(y1, std::log10(s.y[k]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1);
  y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto X = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * pw; };
  auto Y = [&](double ly) { return mt + (y1 - ly) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << num(ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"15\">" << esc(title) << "</text>\n"
    << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // decade ticks; skip labels when there are too many decades
  const int xstep = std::max(1, static_cast<int>((x1 - x0) / 8));
  const int ystep = std::max(1, static_cast<int>((y1 - y0) / 10));
  for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); e += xstep) {
    const double px = X(e);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(px) << "\" y2=\""
      << num(mt + ph + 6) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(px) << "\" y=\"" << num(mt + ph + 22)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); e += ystep) {
    const double py = Y(e);
    o << "<line x1=\"" << num(ml - 6) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml) << "\" y2=\"" << num(py)
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml + pw) << "\" y2=\"" << num(py)
      << "\" stroke=\"#dddddd\"/>\n"
      << "<text x=\"" << num(ml - 10) << "\" y=\"" << num(py + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << e << "</text>\n";
  }
  o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(H - 16)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << esc(xlabel) << "</text>\n"
    << "<text x=\"18\" y=\"" << num(mt + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 18 " << num(mt + ph / 2) << ")\">" << esc(ylabel) << "</text>\n";

  int row = 0;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!(s.x[k] > 0) || !(s.y[k] > 0) || !std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      pts += num(X(std::log10(s.x[k]))) + "," + num(Y(std::log10(s.y[k]))) + " ";
    }
    if (!pts.empty()) pts.pop_back();
    o << "<polyline fill=\"none\" stroke=\"" << esc(s.color) << "\" stroke-width=\"1.5\""
      << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
    const double ly = mt + 14 + 20 * row++;
    o << "<line x1=\"" << num(ml + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(ml + pw + 40)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << esc(s.color) << "\" stroke-width=\"1.5\""
      << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
      << "<text x=\"" << num(ml + pw + 46) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace nlslab::cli
