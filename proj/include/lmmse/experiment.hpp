#pragma once

#include "lmmse/model.hpp"
#include "lmmse/numkit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmmse {

enum class ScenarioId { S1, S2, S3, S4, Custom };

/// Draw mode replicates the reference protocol exactly (one x and one v per
/// replicate); Conditional averages x and v out analytically per drawn A,
/// which reaches tight tolerances at much smaller replicate counts.
enum class EstimatorMode { Draw, Conditional };

/// How K_x is constructed: a scaled identity, a trace-normalized Gram matrix
/// of a one-time standard normal draw, or a caller-provided matrix.
enum class CovarianceRule { Identity, RandomizedGram, Explicit };

struct ScenarioConfig {
  ScenarioId id = ScenarioId::Custom;
  Index p = 30;
  double sigma_x2 = 1.0;                 // identity-rule scale
  double sigma_v2 = 0.25;                // true noise variance per sample
  double assumed_noise_variance = 0.0;   // what the estimator believes
  CovarianceRule covariance_rule = CovarianceRule::Identity;
  std::optional<Matrix> explicit_covariance;
  std::vector<Index> subset_sizes;       // p_S grid
  std::vector<Index> sample_counts;      // n grid
  int replicates = 100;
  std::uint64_t master_seed = 20250831;
  EstimatorMode mode = EstimatorMode::Draw;
  bool common_random_numbers = false;    // share replicate streams across p_S
  double rcond = -1.0;                   // pseudoinverse cutoff override
};

/// Scenario presets. p must be resolved before calling; S2 ties the noise
/// power to p (sigma_v = sqrt(p)).
ScenarioConfig scenario_preset(ScenarioId id, Index p = 30);

/// One grid cell's aggregated result. baseline_mse is the full-estimator
/// Monte Carlo average at this record's n, shared by all cells with that n.
struct SweepRecord {
  ScenarioId scenario = ScenarioId::Custom;
  Index p = 0;
  Index subset_size = 0;   // p_S
  Index sample_count = 0;  // n
  int replicates = 0;
  EstimatorMode mode = EstimatorMode::Draw;
  double empirical_mse = 0.0;
  double standard_error = 0.0;
  std::optional<double> analytic_mse;  // absent when the closed form does not apply
  double baseline_mse = 0.0;
  double gamma = 0.0;
  std::string flags;
  std::uint64_t seed = 0;  // base seed of this cell's replicate streams
};

/// K_x per the config's covariance rule. The RandomizedGram rule consumes the
/// stream once; callers must pass the dedicated covariance sub-stream so the
/// draw is identical across every cell of a sweep.
CovarianceMatrix build_scenario_covariance(const ScenarioConfig& cfg, RandomStream& rng);

/// Covariance sub-stream seed for a config (fixed per master seed).
std::uint64_t covariance_seed(const ScenarioConfig& cfg);

/// Base seed of the replicate streams for cell (p_S, n).
std::uint64_t cell_seed(const ScenarioConfig& cfg, Index subset_size, Index sample_count);

/// Base seed of the replicate streams for the full-estimator baseline at n.
std::uint64_t baseline_seed(const ScenarioConfig& cfg, Index sample_count);

/// Monte Carlo estimate of one grid cell: M replicates of the mismatched
/// partial estimator, whole-vector MSE per replicate, aggregated with the
/// unbiased sample standard deviation. Numerical failures abort the cell with
/// a diagnostic naming (p_S, n, replicate). baseline_mse is left NaN.
SweepRecord run_cell(const ScenarioConfig& cfg, Index subset_size, Index sample_count);

/// Monte Carlo average of the full LMMSE estimator's conditional MSE at n,
/// over M regressor draws. No x or v sampling is needed.
double run_baseline_cell(const ScenarioConfig& cfg, Index sample_count);

/// Monte Carlo mean of A_S^+ A_S over replicates i.i.d. standard normal
/// draws of the n x p_S regressor block.
Matrix estimate_projection_mean(Index subset_size, Index sample_count, int replicates,
                                RandomStream& rng);

/// Monte Carlo mean of (A_S A_S^T)^+ over replicates draws.
Matrix estimate_gram_pinv_mean(Index subset_size, Index sample_count, int replicates,
                               RandomStream& rng);

/// Every (p_S, n) cell plus the per-n baselines, attached to each record.
/// Cells run concurrently (LMMSE_THREADS caps the worker count; 0 or absent
/// means auto) and the output is sorted by (p_S, n) regardless of schedule.
/// A failed cell is recorded in place with an error flag; the rest still run.
std::vector<SweepRecord> run_sweep(const ScenarioConfig& cfg);

const char* scenario_name(ScenarioId id);
const char* mode_name(EstimatorMode mode);
ScenarioId parse_scenario_name(const std::string& name);
EstimatorMode parse_mode_name(const std::string& name);

/// Grid syntax used by the CLI: comma-separated integers and/or
/// start:step:stop ranges (inclusive), e.g. "5,10,30" or "2:2:90".
std::vector<Index> parse_grid(const std::string& text);

}  // namespace lmmse
