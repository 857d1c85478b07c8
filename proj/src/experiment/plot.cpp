#include "sntl/experiment/plot.hpp"

#include "sntl/error.hpp"
#include "sntl/net/weights_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace sntl {
namespace {

constexpr double kPanelWidth = 460;
constexpr double kPanelHeight = 340;
constexpr double kMarginLeft = 70;
constexpr double kMarginRight = 20;
constexpr double kMarginTop = 40;
constexpr double kMarginBottom = 70;

const char* color_of(Method m) {
  switch (m) {
    case Method::transfer: return "#d62728";
    case Method::target_only: return "#1f77b4";
    case Method::kriging: return "#2ca02c";
  }
  return "black";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;
  double pixel_lo;
  double pixel_hi;

  double map(double v) const {
    const double t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

void render_panel(std::ostream& out, const std::vector<CellSummary>& cells, Process process, double x0) {
  std::vector<std::size_t> sizes;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = 0.0;
  for (const auto& c : cells) {
    if (c.process != process) continue;
    if (std::find(sizes.begin(), sizes.end(), c.target_n) == sizes.end()) sizes.push_back(c.target_n);
    const double top = c.mean + c.std_error;
    const double bottom = c.mean - c.std_error > 0.0 ? c.mean - c.std_error : c.mean;
    if (bottom > 0.0) y_lo = std::min(y_lo, bottom);
    y_hi = std::max(y_hi, top);
  }
  std::sort(sizes.begin(), sizes.end());
  if (!(y_hi > 0.0) || !std::isfinite(y_lo)) {
    y_lo = 1e-3;
    y_hi = 1.0;
  }
  y_lo = std::pow(10.0, std::floor(std::log10(y_lo)));
  y_hi = std::pow(10.0, std::ceil(std::log10(y_hi)));
  if (y_hi <= y_lo) y_hi = y_lo * 10.0;
  double x_lo = static_cast<double>(sizes.front());
  double x_hi = static_cast<double>(sizes.back());
  if (x_hi <= x_lo) {
    x_lo /= 2.0;
    x_hi *= 2.0;
  } else {
    const double pad = std::pow(x_hi / x_lo, 0.06);
    x_lo /= pad;
    x_hi *= pad;
  }

  const double left = x0 + kMarginLeft;
  const double right = x0 + kPanelWidth - kMarginRight;
  const double top = kMarginTop;
  const double bottom = kPanelHeight - kMarginBottom;
  const Axis x_axis{x_lo, x_hi, left, right};
  const Axis y_axis{y_lo, y_hi, bottom, top};

  out << "<g class=\"panel\" id=\"panel-" << to_string(process) << "\">\n";
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(process == Process::stationary ? "Stationary process MSE" : "Non-stationary process MSE")
      << "</text>\n";
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
      << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double tick = y_lo; tick <= y_hi * 1.0001; tick *= 10.0) {
    const double y = y_axis.map(tick);
    char label[32];
    std::snprintf(label, sizeof label, "%.0e", tick);
    out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  for (std::size_t n : sizes) {
    const double x = x_axis.map(static_cast<double>(n));
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(bottom + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
        << n << "</text>\n";
  }
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 38)
      << "\" text-anchor=\"middle\" font-size=\"12\">target sample size</text>\n";
  out << "<text x=\"" << num(x0 + 16) << "\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" "
      << "font-size=\"12\" transform=\"rotate(-90 " << num(x0 + 16) << ' ' << num((top + bottom) / 2)
      << ")\">mean test MSE</text>\n";

  double legend_y = bottom + 56;
  double legend_x = left;
  for (Method m : kAllMethods) {
    std::vector<const CellSummary*> series;
    for (const auto& c : cells) {
      if (c.process == process && c.method == m) series.push_back(&c);
    }
    if (series.empty()) continue;
    std::sort(series.begin(), series.end(),
              [](const CellSummary* a, const CellSummary* b) { return a->target_n < b->target_n; });
    out << "<polyline class=\"series\" data-method=\"" << to_string(m) << "\" fill=\"none\" stroke=\""
        << color_of(m) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) out << ' ';
      out << num(x_axis.map(static_cast<double>(series[i]->target_n))) << ','
          << num(y_axis.map(std::max(series[i]->mean, y_lo)));
    }
    out << "\"/>\n";
    for (const CellSummary* c : series) {
      const double x = x_axis.map(static_cast<double>(c->target_n));
      const double lo = std::max(c->mean - c->std_error, y_lo);
      const double hi = std::min(c->mean + c->std_error, y_hi);
      out << "<line class=\"whisker\" x1=\"" << num(x) << "\" y1=\"" << num(y_axis.map(lo)) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(y_axis.map(hi)) << "\" stroke=\"" << color_of(m) << "\"/>\n";
      out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y_axis.map(std::max(c->mean, y_lo)))
          << "\" r=\"3\" fill=\"" << color_of(m) << "\"/>\n";
    }
    out << "<line x1=\"" << num(legend_x) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(legend_x + 20)
        << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << color_of(m) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(legend_x + 25) << "\" y=\"" << num(legend_y + 4) << "\" font-size=\"11\">"
        << to_string(m) << "</text>\n";
    legend_x += 120;
  }
  out << "</g>\n";
}

}  // namespace

std::string render_plot_svg_text(const MseReport& report) {
  if (report.rows.empty()) throw Error("render_plot_svg: report has no rows");
  const std::vector<CellSummary> cells = report.aggregate();
  std::vector<Process> processes;
  for (const auto& c : cells) {
    if (std::find(processes.begin(), processes.end(), c.process) == processes.end()) processes.push_back(c.process);
  }
  std::ostringstream out;
  const double width = kPanelWidth * static_cast<double>(processes.size());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(kPanelHeight)
      << "\" viewBox=\"0 0 " << num(width) << ' ' << num(kPanelHeight) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < processes.size(); ++i) {
    render_panel(out, cells, processes[i], kPanelWidth * static_cast<double>(i));
  }
  out << "</svg>\n";
  return out.str();
}

void render_plot_svg(const MseReport& report, const std::filesystem::path& path) {
  const std::string text = render_plot_svg_text(report);
  write_file_atomically(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace sntl
