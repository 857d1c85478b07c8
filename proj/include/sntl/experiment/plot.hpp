#pragma once

#include "sntl/experiment/report.hpp"

#include <filesystem>
#include <string>

namespace sntl {

/// One panel per process: mean MSE against target size on log-log axes, a
/// polyline per method and standard-error whiskers at every point.
std::string render_plot_svg_text(const MseReport& report);

/// Throws Error for an empty report (nothing is written) and IoError.
void render_plot_svg(const MseReport& report, const std::filesystem::path& path);

}  // namespace sntl
