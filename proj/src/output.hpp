#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace topopump {

inline constexpr int schema_version = 1;

/// Column-oriented table written as CSV with 17 significant digits.
struct table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  table& add(const std::string& name, std::vector<double> values);
  std::size_t rows() const;
};

std::string format_double(double x);
std::string to_csv(const table& t);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const table& t);
/// Adds schema_version and writes with two-space indentation.
void write_json(const std::filesystem::path& path, nlohmann::json j);

struct plot_series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<plot_series>& series);

}  // namespace topopump
