#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mspde/field.hpp"
#include "mspde/grid.hpp"
#include "mspde/noise.hpp"

namespace mspde::harness {

/// 17 significant digits, enough to round-trip any double.
std::string num(double v);

/// Comma-separated row terminated by '\n'.
std::string csv_row(const std::vector<std::string>& cells);

/// Writes bytes verbatim, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Rows (t, x_1[, x_2], component, value) plus `<path>.json` with the grid spec.
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& f, std::size_t snapshot_stride = 1);

/// Rows (k, K_hat) over the resolved half-spectrum.
void write_spectrum_csv(const std::filesystem::path& path, const NoiseSpec& spec, const GridSpec& grid);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Drawn as a dashed line without markers.
  bool reference = false;
};

/// Log-log line plot as a standalone SVG document. Non-positive points are skipped.
std::string loglog_svg(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                       const std::vector<PlotSeries>& series);

}  // namespace mspde::harness
