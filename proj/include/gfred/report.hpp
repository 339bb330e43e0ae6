#pragma once

#include <filesystem>
#include <string>

#include "gfred/sweep.hpp"

namespace gfred {

/// Columns: trial,k,L,iters,initial_mse,final_mse,pca_mse,wall_time_ms
std::string format_csv(const SweepReport& report);

/// One polyline per L of mean final MSE against k, with axes and legend.
std::string format_svg(const SweepReport& report);

void emit_csv(const SweepReport& report, const std::filesystem::path& path);
void emit_svg(const SweepReport& report, const std::filesystem::path& path);

}  // namespace gfred
