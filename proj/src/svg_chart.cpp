#include "lmmse/svg_chart.hpp"

#include "lmmse/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lmmse {

namespace {

const char* kPalette[] = {"#2166ac", "#d6604d", "#1a9850", "#8073ac",
                          "#e08214", "#35978f", "#c51b7d", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Series {
  Index subset_size;
  std::vector<const SweepRecord*> points;  // sorted by n
};

// Nice step so the x axis carries at most ~12 integer ticks.
Index x_tick_step(Index span) {
  const Index candidates[] = {1, 2, 5, 10, 20, 25, 50, 100, 200, 500, 1000};
  for (Index c : candidates) {
    if (span / c <= 12) {
      return c;
    }
  }
  return std::max<Index>(1, span / 12);
}

}  // namespace

std::string render_svg_string(const std::vector<SweepRecord>& records,
                              const ChartOptions& options) {
  if (records.empty()) {
    throw std::invalid_argument("render_svg: no records to plot");
  }
  const double clip = options.clip_value;

  std::map<Index, Series> by_subset;
  std::map<Index, double> baseline;
  Index n_min = records.front().sample_count;
  Index n_max = n_min;
  double v_min_pos = clip;
  double v_max = 0.0;

  auto observe = [&](double v) {
    if (!std::isfinite(v) || v > clip) {
      v_max = clip;
      return;
    }
    if (v > 0.0) {
      v_min_pos = std::min(v_min_pos, v);
      v_max = std::max(v_max, v);
    }
  };

  for (const SweepRecord& r : records) {
    Series& s = by_subset[r.subset_size];
    s.subset_size = r.subset_size;
    s.points.push_back(&r);
    n_min = std::min(n_min, r.sample_count);
    n_max = std::max(n_max, r.sample_count);
    observe(r.empirical_mse);
    if (r.analytic_mse) {
      observe(*r.analytic_mse);
    }
    if (std::isfinite(r.baseline_mse)) {
      baseline[r.sample_count] = r.baseline_mse;
      observe(r.baseline_mse);
    }
  }
  for (auto& [ps, s] : by_subset) {
    std::sort(s.points.begin(), s.points.end(),
              [](const SweepRecord* a, const SweepRecord* b) {
                return a->sample_count < b->sample_count;
              });
  }

  if (v_min_pos >= clip) {
    v_min_pos = 1.0;  // nothing positive below the clip; pick a sane floor
  }
  if (v_max <= 0.0) {
    v_max = 1.0;
  }
  const double log_lo = std::floor(std::log10(v_min_pos));
  double log_hi = std::ceil(std::log10(v_max));
  log_hi = std::min(log_hi, std::log10(clip));
  if (v_max >= clip) {
    log_hi = std::log10(clip);
  }
  if (log_hi <= log_lo) {
    log_hi = log_lo + 1.0;
  }

  const double margin_left = 70.0;
  const double margin_right = 170.0;
  const double margin_top = options.title.empty() ? 24.0 : 44.0;
  const double margin_bottom = 52.0;
  const double plot_w = options.width - margin_left - margin_right;
  const double plot_h = options.height - margin_top - margin_bottom;

  auto tx = [&](Index n) {
    if (n_max == n_min) {
      return margin_left + plot_w / 2.0;
    }
    return margin_left + plot_w * static_cast<double>(n - n_min) /
                             static_cast<double>(n_max - n_min);
  };
  // Log transform with clipping; zero and negative values sit on the floor.
  auto ty = [&](double v) {
    double lv;
    if (!std::isfinite(v) || v >= clip) {
      lv = log_hi;
    } else if (v <= 0.0) {
      lv = log_lo;
    } else {
      lv = std::clamp(std::log10(v), log_lo, log_hi);
    }
    return margin_top + plot_h * (log_hi - lv) / (log_hi - log_lo);
  };
  auto clipped = [&](double v) { return !std::isfinite(v) || v >= clip; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << options.width << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
      << options.width << " " << options.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (!options.title.empty()) {
    svg << "<text x=\"" << fmt(margin_left + plot_w / 2)
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << escape_xml(options.title) << "</text>\n";
  }

  // Gridlines and axis labels.
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (int k = static_cast<int>(log_lo); k <= static_cast<int>(log_hi); ++k) {
    const double y = ty(std::pow(10.0, k));
    svg << "<line x1=\"" << fmt(margin_left) << "\" y1=\"" << fmt(y) << "\" x2=\""
        << fmt(margin_left + plot_w) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(margin_left - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">1e" << k << "</text>\n";
  }
  const Index step = x_tick_step(std::max<Index>(1, n_max - n_min));
  for (Index n = ((n_min + step - 1) / step) * step; n <= n_max; n += step) {
    const double x = tx(n);
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(margin_top) << "\" x2=\""
        << fmt(x) << "\" y2=\"" << fmt(margin_top + plot_h)
        << "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(margin_top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  svg << "<text x=\"" << fmt(margin_left + plot_w / 2) << "\" y=\""
      << fmt(margin_top + plot_h + 40)
      << "\" text-anchor=\"middle\">number of samples n</text>\n";
  svg << "<text x=\"16\" y=\"" << fmt(margin_top + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(margin_top + plot_h / 2) << ")\">MSE (log scale, clipped at "
      << format_double(clip) << ")</text>\n";
  svg << "</g>\n";

  svg << "<rect x=\"" << fmt(margin_left) << "\" y=\"" << fmt(margin_top)
      << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // Baseline: dashed line with sparse square markers.
  if (!baseline.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#111111\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"6 4\" points=\"";
    for (const auto& [n, v] : baseline) {
      svg << fmt(tx(n)) << "," << fmt(ty(v)) << " ";
    }
    svg << "\"/>\n";
    int idx = 0;
    for (const auto& [n, v] : baseline) {
      if (idx++ % 5 != 0) {
        continue;
      }
      svg << "<rect x=\"" << fmt(tx(n) - 3) << "\" y=\"" << fmt(ty(v) - 3)
          << "\" width=\"6\" height=\"6\" fill=\"#111111\">"
          << "<title>baseline n=" << n << " mse=" << escape_xml(format_double(v))
          << "</title></rect>\n";
    }
  }

  // Empirical series and analytic markers, one color per p_S.
  int color_idx = 0;
  for (const auto& [ps, series] : by_subset) {
    const char* color = kPalette[color_idx % kPaletteSize];
    ++color_idx;
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"";
    for (const SweepRecord* r : series.points) {
      svg << fmt(tx(r->sample_count)) << "," << fmt(ty(r->empirical_mse)) << " ";
    }
    svg << "\"/>\n";
    for (const SweepRecord* r : series.points) {
      const double x = tx(r->sample_count);
      const double y = ty(r->empirical_mse);
      if (clipped(r->empirical_mse)) {
        // Clip marker: upward triangle pinned to the top of the axis.
        svg << "<path d=\"M " << fmt(x) << " " << fmt(y - 5) << " L " << fmt(x - 4)
            << " " << fmt(y + 3) << " L " << fmt(x + 4) << " " << fmt(y + 3)
            << " Z\" fill=\"" << color << "\">";
      } else {
        svg << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
            << "\" r=\"2.5\" fill=\"" << color << "\">";
      }
      svg << "<title>empirical p_S=" << ps << " n=" << r->sample_count << " mse="
          << escape_xml(format_double(r->empirical_mse)) << "</title>"
          << (clipped(r->empirical_mse) ? "</path>\n" : "</circle>\n");
    }
    for (const SweepRecord* r : series.points) {
      if (!r->analytic_mse) {
        continue;
      }
      const double x = tx(r->sample_count);
      const double y = ty(*r->analytic_mse);
      svg << "<path d=\"M " << fmt(x - 3.5) << " " << fmt(y) << " L " << fmt(x) << " "
          << fmt(y - 3.5) << " L " << fmt(x + 3.5) << " " << fmt(y) << " L " << fmt(x)
          << " " << fmt(y + 3.5) << " Z\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\">"
          << "<title>analytic p_S=" << ps << " n=" << r->sample_count << " mse="
          << escape_xml(format_double(*r->analytic_mse)) << "</title></path>\n";
    }
  }

  // Legend.
  double ly = margin_top + 10.0;
  const double lx = margin_left + plot_w + 16.0;
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  color_idx = 0;
  for (const auto& [ps, series] : by_subset) {
    const char* color = kPalette[color_idx % kPaletteSize];
    ++color_idx;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(lx + 24) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4)
        << "\">p_S = " << ps << "</text>\n";
    ly += 20.0;
  }
  if (!baseline.empty()) {
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(lx + 24) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"#111111\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4)
        << "\">full LMMSE baseline</text>\n";
    ly += 20.0;
  }
  svg << "<path d=\"M " << fmt(lx + 8.5) << " " << fmt(ly) << " L " << fmt(lx + 12)
      << " " << fmt(ly - 3.5) << " L " << fmt(lx + 15.5) << " " << fmt(ly) << " L "
      << fmt(lx + 12) << " " << fmt(ly + 3.5)
      << " Z\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.2\"/>\n";
  svg << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4)
      << "\">closed form</text>\n";
  svg << "</g>\n";

  svg << "</svg>\n";
  return svg.str();
}

void render_svg(const std::vector<SweepRecord>& records, const std::string& path,
                const ChartOptions& options) {
  const std::string text = render_svg_string(records, options);
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("render_svg: cannot open '" + path + "' for writing");
  }
  file << text;
  if (!file.good()) {
    throw std::runtime_error("render_svg: write to '" + path + "' failed");
  }
}

}  // namespace lmmse
