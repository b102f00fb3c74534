#include "mspde/harness/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mspde::harness {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& f, std::size_t snapshot_stride) {
  if (snapshot_stride == 0) throw std::invalid_argument("snapshot stride must be positive");
  const GridSpec& g = f.grid();
  std::string body = g.dim == 1 ? "t,x1,component,value\n" : "t,x1,x2,component,value\n";
  for (std::size_t s = 0; s < f.snapshots(); s += snapshot_stride) {
    const std::string t = num(f.time(static_cast<long>(s)));
    for (int c = 0; c < f.components(); ++c) {
      for (std::size_t i = 0; i < f.nodes(); ++i) {
        const Vec2 x = g.node_position(i);
        std::vector<std::string> row{t, num(x[0])};
        if (g.dim == 2) row.push_back(num(x[1]));
        row.push_back(std::to_string(c));
        row.push_back(num(f.at(s, c, i)));
        body += csv_row(row);
      }
    }
  }
  write_file(path, body);
  const nlohmann::json side = {{"dim", g.dim},
                               {"n", g.n},
                               {"t_end", g.t_end},
                               {"dt", g.dt},
                               {"snap_stride", g.snap_stride},
                               {"t0", f.t0()},
                               {"time_step", f.time_step() * static_cast<double>(snapshot_stride)},
                               {"components", f.components()}};
  write_file(path.string() + ".json", side.dump(2) + "\n");
}

void write_spectrum_csv(const std::filesystem::path& path, const NoiseSpec& spec, const GridSpec& grid) {
  const auto table = build_spectrum(spec, grid);
  std::string body = grid.dim == 1 ? "k1,k_squared,K_hat\n" : "k1,k2,k_squared,K_hat\n";
  for (std::size_t i = 0; i < table.modes.size(); ++i) {
    std::vector<std::string> row{std::to_string(table.modes[i][0])};
    if (grid.dim == 2) row.push_back(std::to_string(table.modes[i][1]));
    row.push_back(num(table.k_squared[i]));
    row.push_back(num(spectral_density(spec, table.k_squared[i])));
    body += csv_row(row);
  }
  write_file(path, body);
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string loglog_svg(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                       const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 440, L = 80, R = 170, T = 40, B = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - T - B); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  out += "<text x=\"" + fixed(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  out += "<rect x=\"" + fixed(L) + "\" y=\"" + fixed(T) + "\" width=\"" + fixed(W - L - R) + "\" height=\"" +
         fixed(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    const double v = std::pow(10.0, e);
    out += "<text x=\"" + fixed(px(v)) + "\" y=\"" + fixed(H - B + 16) + "\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    const double v = std::pow(10.0, e);
    out += "<text x=\"" + fixed(L - 6) + "\" y=\"" + fixed(py(v) + 4) + "\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
  }
  out += "<text x=\"" + fixed(L + (W - L - R) / 2) + "\" y=\"" + fixed(H - 16) + "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  out += "<text transform=\"translate(18," + fixed(T + (H - T - B) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
  std::size_t k = 0;
  for (const auto& s : series) {
    const std::string color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fixed(px(s.x[i])) + "," + fixed(py(s.y[i])) + " ";
      if (!s.reference) {
        out += "<circle cx=\"" + fixed(px(s.x[i])) + "\" cy=\"" + fixed(py(s.y[i])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    }
    out += "<polyline fill=\"none\" stroke=\"" + color + "\"" + (s.reference ? " stroke-dasharray=\"5,4\"" : "") +
           " points=\"" + pts + "\"/>\n";
    const double ly = T + 14 + 18 * static_cast<double>(k);
    out += "<line x1=\"" + fixed(W - R + 10) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" + fixed(W - R + 30) + "\" y2=\"" +
           fixed(ly - 4) + "\" stroke=\"" + color + "\"" + (s.reference ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
    out += "<text x=\"" + fixed(W - R + 36) + "\" y=\"" + fixed(ly) + "\">" + escape(s.label) + "</text>\n";
    ++k;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace mspde::harness
