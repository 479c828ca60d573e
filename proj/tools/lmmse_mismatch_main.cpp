#include "lmmse/csv_io.hpp"
#include "lmmse/experiment.hpp"
#include "lmmse/svg_chart.hpp"
#include "lmmse/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{std::string(lmmse::kToolName) +
               " - mismatched-order LMMSE estimation sweeps, closed-form expected "
               "MSE, CSV output and SVG charts"};
  app.set_version_flag("--version", std::string(lmmse::kToolVersion));

  std::string scenario;
  std::string ps_text;
  std::string n_text;
  std::string mode_text;
  std::string out_csv;
  std::string out_svg;
  std::string title;
  long long p = 30;
  long long replicates = 100;
  std::uint64_t seed = 20250831;
  double sigma_v2 = 0.0;
  double sigma_z2 = 0.0;
  double sigma_x2 = 1.0;
  double rcond = -1.0;
  bool common_rng = false;

  app.add_option("--scenario", scenario, "Scenario preset: s1, s2, s3, s4 or custom")
      ->required()
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4", "custom"}));
  app.add_option("--p", p, "Number of unknowns in the underlying system")
      ->capture_default_str();
  app.add_option("--ps", ps_text,
                 "Assumed model orders p_S (comma list and/or start:step:stop ranges)");
  app.add_option("--n", n_text,
                 "Sample counts n (comma list and/or start:step:stop ranges)");
  app.add_option("--replicates", replicates, "Monte Carlo replicates per grid cell")
      ->capture_default_str();
  app.add_option("--seed", seed, "Master seed for all sub-streams")
      ->capture_default_str();
  app.add_option("--mode", mode_text, "Estimator mode: draw or conditional")
      ->check(CLI::IsMember({"draw", "conditional"}));
  app.add_option("--sigma-v2", sigma_v2, "True noise variance per sample");
  app.add_option("--sigma-z2", sigma_z2, "Assumed noise variance per sample");
  app.add_option("--sigma-x2", sigma_x2, "Signal power scale of the identity covariance rule");
  app.add_option("--out-csv", out_csv, "Path of the CSV result table")->required();
  app.add_option("--out-svg", out_svg, "Optional path of the rendered SVG chart");
  app.add_option("--title", title, "Optional chart title");
  app.add_option("--rcond", rcond, "Pseudoinverse truncation threshold (relative)");
  app.add_flag("--common-rng", common_rng,
               "Share regressor draws across p_S values at equal n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  lmmse::ScenarioConfig cfg;
  try {
    if (p < 1) {
      throw std::invalid_argument("--p must be >= 1");
    }
    cfg = lmmse::scenario_preset(lmmse::parse_scenario_name(scenario),
                                 static_cast<lmmse::Index>(p));
    // Explicit flags override the preset.
    if (app.count("--sigma-v2") > 0) cfg.sigma_v2 = sigma_v2;
    if (app.count("--sigma-z2") > 0) cfg.assumed_noise_variance = sigma_z2;
    if (app.count("--sigma-x2") > 0) cfg.sigma_x2 = sigma_x2;
    if (app.count("--mode") > 0) cfg.mode = lmmse::parse_mode_name(mode_text);
    if (!ps_text.empty()) cfg.subset_sizes = lmmse::parse_grid(ps_text);
    if (!n_text.empty()) cfg.sample_counts = lmmse::parse_grid(n_text);
    cfg.replicates = static_cast<int>(replicates);
    cfg.master_seed = seed;
    cfg.common_random_numbers = common_rng;
    cfg.rcond = rcond;

    if (cfg.replicates < 1) {
      throw std::invalid_argument("--replicates must be >= 1");
    }
    for (lmmse::Index p_s : cfg.subset_sizes) {
      if (p_s < 1 || p_s > cfg.p) {
        throw std::invalid_argument("--ps value " + std::to_string(p_s) +
                                    " contradicts --p " + std::to_string(cfg.p));
      }
    }
    for (lmmse::Index n : cfg.sample_counts) {
      if (n < 1) {
        throw std::invalid_argument("--n values must be >= 1");
      }
    }
    if (cfg.sigma_v2 < 0.0 || cfg.assumed_noise_variance < 0.0 || cfg.sigma_x2 < 0.0) {
      throw std::invalid_argument("variances must be >= 0");
    }
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << app.help() << std::flush;
    return 1;
  }

  try {
    const std::vector<lmmse::SweepRecord> records = lmmse::run_sweep(cfg);
    lmmse::write_csv(records, out_csv);
    lmmse::write_manifest(cfg, records, out_csv);
    if (!out_svg.empty()) {
      lmmse::ChartOptions chart;
      chart.title = title.empty()
                        ? std::string("scenario ") + lmmse::scenario_name(cfg.id)
                        : title;
      lmmse::render_svg(records, out_svg, chart);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
