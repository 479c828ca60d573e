#pragma once

#include "lmmse/experiment.hpp"

#include <string>
#include <vector>

namespace lmmse {

struct ChartOptions {
  int width = 960;
  int height = 600;
  double clip_value = 1e4;  // values above are pinned to the top with a marker
  std::string title;
};

/// Self-contained SVG 1.1 chart of a sweep: n on a linear x-axis, MSE on a
/// log10 y-axis clipped at clip_value, one line per p_S for the empirical
/// values, unfilled markers for the closed-form values, a dashed line with
/// sparse markers for the full-estimator baseline, and a legend naming each
/// series. Tooltips quote values exactly as the CSV prints them.
std::string render_svg_string(const std::vector<SweepRecord>& records,
                              const ChartOptions& options = {});

void render_svg(const std::vector<SweepRecord>& records, const std::string& path,
                const ChartOptions& options = {});

}  // namespace lmmse
