#include "gfred/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "gfred/error.hpp"

namespace gfred {

namespace {

std::string num(const char* fmt, double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string format_csv(const SweepReport& report) {
  std::string out = "trial,k,L,iters,initial_mse,final_mse,pca_mse,wall_time_ms\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.k) + ',' + std::to_string(r.L) + ',' +
           std::to_string(r.iterations) + ',' + num("%.17g", r.initial_mse) + ',' +
           num("%.17g", r.final_mse) + ',' + num("%.17g", r.pca_mse) + ',' +
           num("%.3f", r.wall_time_ms) + '\n';
  }
  return out;
}

std::string format_svg(const SweepReport& report) {
  constexpr double width = 640, height = 420;
  constexpr double left = 80, right = 150, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::map<int, std::vector<std::pair<int, double>>> series;
  std::set<int> ks;
  double y_max = 0.0;
  for (const auto& a : report.aggregates) {
    series[a.L].emplace_back(a.k, a.mean_final_mse);
    ks.insert(a.k);
    y_max = std::max(y_max, a.mean_final_mse);
  }
  const double x_lo = ks.empty() ? 0.0 : *ks.begin();
  double x_hi = ks.empty() ? 1.0 : *ks.rbegin();
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (!(y_max > 0.0)) y_max = 1.0;
  y_max *= 1.05;

  auto sx = [&](double k) { return left + (k - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double v) { return top + plot_h - v / y_max * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num("%g", width) +
         "\" height=\"" + num("%g", height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + num("%.2f", left) + "\" y1=\"" + num("%.2f", top + plot_h) + "\" x2=\"" +
         num("%.2f", left + plot_w) + "\" y2=\"" + num("%.2f", top + plot_h) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num("%.2f", left) + "\" y1=\"" + num("%.2f", top) + "\" x2=\"" +
         num("%.2f", left) + "\" y2=\"" + num("%.2f", top + plot_h) + "\" stroke=\"black\"/>\n";

  for (int k : ks) {
    const double x = sx(k);
    svg += "<line x1=\"" + num("%.2f", x) + "\" y1=\"" + num("%.2f", top + plot_h) + "\" x2=\"" +
           num("%.2f", x) + "\" y2=\"" + num("%.2f", top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num("%.2f", x) + "\" y=\"" + num("%.2f", top + plot_h + 18) +
           "\" text-anchor=\"middle\">" + std::to_string(k) + "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = y_max * t / 4.0;
    const double y = sy(v);
    svg += "<line x1=\"" + num("%.2f", left - 5) + "\" y1=\"" + num("%.2f", y) + "\" x2=\"" +
           num("%.2f", left) + "\" y2=\"" + num("%.2f", y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num("%.2f", left - 8) + "\" y=\"" + num("%.2f", y + 4) +
           "\" text-anchor=\"end\">" + num("%.4g", v) + "</text>\n";
  }
  svg += "<text x=\"" + num("%.2f", left + plot_w / 2) + "\" y=\"" + num("%.2f", height - 15) +
         "\" text-anchor=\"middle\">reduced dimension k</text>\n";
  svg += "<text x=\"20\" y=\"" + num("%.2f", top + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + num("%.2f", top + plot_h / 2) +
         ")\">reconstruction MSE</text>\n";

  std::size_t idx = 0;
  for (const auto& [L, points] : series) {
    const char* color = kPalette[idx % std::size(kPalette)];
    std::string pts;
    for (const auto& [k, v] : points) {
      if (!pts.empty()) pts += ' ';
      pts += num("%.2f", sx(k)) + ',' + num("%.2f", sy(v));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(idx);
    const double lx = left + plot_w + 20;
    svg += "<line x1=\"" + num("%.2f", lx) + "\" y1=\"" + num("%.2f", ly) + "\" x2=\"" +
           num("%.2f", lx + 25) + "\" y2=\"" + num("%.2f", ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num("%.2f", lx + 32) + "\" y=\"" + num("%.2f", ly + 4) + "\">L=" +
           std::to_string(L) + (L == 0 ? " (PCA)" : "") + "</text>\n";
    ++idx;
  }
  svg += "</svg>\n";
  return svg;
}

void emit_csv(const SweepReport& report, const std::filesystem::path& path) {
  write_text(path, format_csv(report));
}

void emit_svg(const SweepReport& report, const std::filesystem::path& path) {
  write_text(path, format_svg(report));
}

}  // namespace gfred
