#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace topopump {

table& table::add(const std::string& name, std::vector<double> values) {
  if (!columns.empty() && values.size() != columns.front().size()) {
    fail_domain("table column '" + name + "' has a different length");
  }
  header.push_back(name);
  columns.push_back(std::move(values));
  return *this;
}

std::size_t table::rows() const { return columns.empty() ? 0 : columns.front().size(); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const table& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  out << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << format_double(t.columns[c][r]);
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) fail_config("cannot write " + path.string());
  f << text;
  if (!f) fail_config("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const table& t) { write_text(path, to_csv(t)); }

void write_json(const std::filesystem::path& path, nlohmann::json j) {
  j["schema_version"] = schema_version;
  write_text(path, j.dump(2) + "\n");
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<plot_series>& series) {
  const double w = 640, h = 400, left = 70, right = 20, top = 40, bottom = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w - left - right << "\" height=\""
    << h - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.3g", xv);
    std::snprintf(by, sizeof by, "%.3g", yv);
    o << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << bx
      << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << by
      << "</text>\n";
  }
  o << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " << h / 2
    << ")\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      char pt[64];
      std::snprintf(pt, sizeof pt, "%.2f,%.2f ", px(series[s].x[i]), py(series[s].y[i]));
      o << pt;
    }
    o << "\"/>\n";
    o << "<text x=\"" << w - right - 8 << "\" y=\"" << top + 16 + 15 * s << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
      << color << "\">" << series[s].label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace topopump
