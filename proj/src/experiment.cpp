#include "lmmse/experiment.hpp"

#include "lmmse/analytic.hpp"
#include "lmmse/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace lmmse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Domain separation tags for the seed derivation tree.
constexpr std::uint64_t kTagCovariance = 1;
constexpr std::uint64_t kTagCell = 2;
constexpr std::uint64_t kTagBaseline = 3;

std::uint64_t scenario_index(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1: return 1;
    case ScenarioId::S2: return 2;
    case ScenarioId::S3: return 3;
    case ScenarioId::S4: return 4;
    case ScenarioId::Custom: return 0;
  }
  return 0;
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.p < 1) {
    throw std::invalid_argument("config: p must be >= 1");
  }
  if (cfg.sigma_x2 < 0.0 || cfg.sigma_v2 < 0.0 || cfg.assumed_noise_variance < 0.0) {
    throw std::invalid_argument("config: variances must be >= 0");
  }
  if (cfg.replicates < 1) {
    throw std::invalid_argument("config: replicates must be >= 1");
  }
  if (cfg.subset_sizes.empty() || cfg.sample_counts.empty()) {
    throw std::invalid_argument("config: p_S and n grids must be nonempty");
  }
  for (Index p_s : cfg.subset_sizes) {
    if (p_s < 1 || p_s > cfg.p) {
      throw std::invalid_argument("config: p_S value " + std::to_string(p_s) +
                                  " outside [1, p]");
    }
  }
  for (Index n : cfg.sample_counts) {
    if (n < 1) {
      throw std::invalid_argument("config: n values must be >= 1");
    }
  }
  if (cfg.covariance_rule == CovarianceRule::Explicit && !cfg.explicit_covariance) {
    throw std::invalid_argument("config: explicit covariance rule without a matrix");
  }
}

struct CellStats {
  double mean;
  double standard_error;
};

CellStats aggregate(const std::vector<double>& values) {
  const auto m = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  const double mean = sum / m;
  if (values.size() < 2) {
    return {mean, 0.0};
  }
  if (!std::isfinite(mean)) {
    return {mean, kInf};
  }
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  const double sample_sd = std::sqrt(ss / (m - 1.0));
  return {mean, sample_sd / std::sqrt(m)};
}

// Record with everything that does not depend on the replicate loop.
SweepRecord make_cell_shell(const ScenarioConfig& cfg, const PartitionedCovariance& part,
                            Index subset_size, Index sample_count) {
  SweepRecord rec;
  rec.scenario = cfg.id;
  rec.p = cfg.p;
  rec.subset_size = subset_size;
  rec.sample_count = sample_count;
  rec.replicates = cfg.replicates;
  rec.mode = cfg.mode;
  rec.empirical_mse = kNaN;
  rec.standard_error = kNaN;
  rec.baseline_mse = kNaN;
  rec.gamma = gamma_factor(subset_size, sample_count);
  rec.seed = cell_seed(cfg, subset_size, sample_count);
  // The closed form assumes an identity assumed covariance (always true in
  // this engine) and zero assumed noise.
  if (cfg.assumed_noise_variance == 0.0) {
    TheoryInputs inputs(subset_size, sample_count, part.subset_covariance.trace(),
                        part.complement_covariance.trace(),
                        static_cast<double>(sample_count) * cfg.sigma_v2);
    rec.analytic_mse = expected_whole_mse(expected_partial_mse(inputs),
                                          part.complement_covariance.trace());
  }
  std::vector<std::string> flags;
  if (std::abs(subset_size - sample_count) <= 1) {
    flags.push_back("near-interpolation");
  }
  if (cfg.replicates == 1) {
    flags.push_back("degenerate");
  }
  for (std::size_t i = 0; i < flags.size(); ++i) {
    rec.flags += (i == 0 ? "" : ";") + flags[i];
  }
  return rec;
}

int effective_thread_count() {
  if (const char* env = std::getenv("LMMSE_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) {
      return static_cast<int>(parsed);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

ScenarioConfig scenario_preset(ScenarioId id, Index p) {
  ScenarioConfig cfg;
  cfg.id = id;
  cfg.p = p;
  cfg.sigma_x2 = 1.0;
  cfg.subset_sizes = {10, 20, 30};
  cfg.sample_counts.clear();
  for (Index n = 2; n <= 90; n += 2) {
    cfg.sample_counts.push_back(n);
  }
  switch (id) {
    case ScenarioId::S1:
    case ScenarioId::Custom:
      cfg.sigma_v2 = 0.25;
      cfg.assumed_noise_variance = 0.0;
      cfg.covariance_rule = CovarianceRule::Identity;
      break;
    case ScenarioId::S2:
      // sigma_v = sqrt(p), i.e. 0 dB SNR against tr(K_x) = p.
      cfg.sigma_v2 = static_cast<double>(p);
      cfg.assumed_noise_variance = 0.0;
      cfg.covariance_rule = CovarianceRule::Identity;
      break;
    case ScenarioId::S3:
      cfg.sigma_v2 = 0.25;
      cfg.assumed_noise_variance = 0.0;
      cfg.covariance_rule = CovarianceRule::RandomizedGram;
      break;
    case ScenarioId::S4:
      cfg.sigma_v2 = 0.25;
      cfg.assumed_noise_variance = 0.25;  // estimator knows the noise level
      cfg.covariance_rule = CovarianceRule::Identity;
      break;
  }
  if (p < 30) {
    cfg.subset_sizes = {p};
  }
  return cfg;
}

CovarianceMatrix build_scenario_covariance(const ScenarioConfig& cfg, RandomStream& rng) {
  switch (cfg.covariance_rule) {
    case CovarianceRule::Identity:
      return CovarianceMatrix::scaled_identity(cfg.p, cfg.sigma_x2);
    case CovarianceRule::RandomizedGram: {
      const Matrix c = sample_gaussian_matrix(cfg.p, cfg.p, rng);
      Matrix gram = c.transpose() * c;
      gram = 0.5 * (gram + gram.transpose()).eval();
      const double scale = cfg.sigma_x2 * static_cast<double>(cfg.p) / gram.trace();
      return CovarianceMatrix(scale * gram);
    }
    case CovarianceRule::Explicit:
      if (!cfg.explicit_covariance) {
        throw std::invalid_argument("build_scenario_covariance: missing explicit matrix");
      }
      if (cfg.explicit_covariance->rows() != cfg.p) {
        throw std::invalid_argument("build_scenario_covariance: explicit matrix dimension mismatch");
      }
      return CovarianceMatrix(*cfg.explicit_covariance);
  }
  throw std::logic_error("build_scenario_covariance: unknown rule");
}

std::uint64_t covariance_seed(const ScenarioConfig& cfg) {
  return derive_seed(cfg.master_seed, {kTagCovariance, scenario_index(cfg.id)});
}

std::uint64_t cell_seed(const ScenarioConfig& cfg, Index subset_size, Index sample_count) {
  // With common random numbers the p_S label is dropped, so cells at the same
  // n share regressor draws and A_S is a common prefix.
  const std::uint64_t ps_label =
      cfg.common_random_numbers ? 0 : static_cast<std::uint64_t>(subset_size);
  return derive_seed(cfg.master_seed, {kTagCell, scenario_index(cfg.id), ps_label,
                                       static_cast<std::uint64_t>(sample_count)});
}

std::uint64_t baseline_seed(const ScenarioConfig& cfg, Index sample_count) {
  return derive_seed(cfg.master_seed, {kTagBaseline, scenario_index(cfg.id),
                                       static_cast<std::uint64_t>(sample_count)});
}

SweepRecord run_cell(const ScenarioConfig& cfg, Index subset_size, Index sample_count) {
  validate_config(cfg);
  if (subset_size < 1 || subset_size > cfg.p) {
    throw std::invalid_argument("run_cell: p_S outside [1, p]");
  }
  if (sample_count < 1) {
    throw std::invalid_argument("run_cell: n must be >= 1");
  }

  RandomStream cov_rng(covariance_seed(cfg));
  const SystemSpec spec(cfg.p, build_scenario_covariance(cfg, cov_rng), cfg.sigma_v2);
  const PartitionedCovariance part = partition(spec, subset_size);
  const AssumedModelSpec assumed(subset_size, CovarianceMatrix::identity(subset_size),
                                 cfg.assumed_noise_variance);
  const double discarded_power = part.complement_covariance.trace();

  SweepRecord rec = make_cell_shell(cfg, part, subset_size, sample_count);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.replicates));
  for (int j = 1; j <= cfg.replicates; ++j) {
    try {
      RandomStream rng(derive_seed(rec.seed, {static_cast<std::uint64_t>(j)}));
      const SystemDraw draw = draw_system(spec, sample_count, rng);
      const Matrix a_s = subset_columns(draw.regressors, subset_size);
      const Matrix a_c = complement_columns(draw.regressors, subset_size);
      const WeightsMatrix w_s = partial_lmmse_weights(a_s, assumed, cfg.rcond);
      double j_value;
      if (cfg.mode == EstimatorMode::Draw) {
        const Vector estimate = w_s.entries * draw.observation;
        j_value = (draw.signal.head(subset_size) - estimate).squaredNorm() + discarded_power;
      } else {
        j_value = mse_partial_conditional(w_s, a_s, a_c, part, cfg.sigma_v2) +
                  discarded_power;
      }
      values.push_back(j_value);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_cell failed at (p_S=" + std::to_string(subset_size) +
                               ", n=" + std::to_string(sample_count) +
                               ", replicate=" + std::to_string(j) + "): " + e.what());
    }
  }

  const CellStats stats = aggregate(values);
  rec.empirical_mse = stats.mean;
  rec.standard_error = stats.standard_error;
  return rec;
}

double run_baseline_cell(const ScenarioConfig& cfg, Index sample_count) {
  validate_config(cfg);
  if (sample_count < 1) {
    throw std::invalid_argument("run_baseline_cell: n must be >= 1");
  }
  RandomStream cov_rng(covariance_seed(cfg));
  const SystemSpec spec(cfg.p, build_scenario_covariance(cfg, cov_rng), cfg.sigma_v2);
  const std::uint64_t base = baseline_seed(cfg, sample_count);

  double sum = 0.0;
  for (int j = 1; j <= cfg.replicates; ++j) {
    RandomStream rng(derive_seed(base, {static_cast<std::uint64_t>(j)}));
    const Matrix a = sample_gaussian_matrix(sample_count, cfg.p, rng);
    const WeightsMatrix w_o =
        full_lmmse_weights(a, spec.signal_covariance, cfg.sigma_v2, cfg.rcond);
    sum += mse_full(w_o, a, spec.signal_covariance, cfg.sigma_v2);
  }
  return sum / static_cast<double>(cfg.replicates);
}

Matrix estimate_projection_mean(Index subset_size, Index sample_count, int replicates,
                                RandomStream& rng) {
  if (replicates < 1) {
    throw std::invalid_argument("estimate_projection_mean: replicates must be >= 1");
  }
  Matrix sum = Matrix::Zero(subset_size, subset_size);
  for (int j = 0; j < replicates; ++j) {
    const Matrix a_s = sample_gaussian_matrix(sample_count, subset_size, rng);
    sum += pseudoinverse(a_s) * a_s;
  }
  return sum / static_cast<double>(replicates);
}

Matrix estimate_gram_pinv_mean(Index subset_size, Index sample_count, int replicates,
                               RandomStream& rng) {
  if (replicates < 1) {
    throw std::invalid_argument("estimate_gram_pinv_mean: replicates must be >= 1");
  }
  Matrix sum = Matrix::Zero(sample_count, sample_count);
  for (int j = 0; j < replicates; ++j) {
    const Matrix a_s = sample_gaussian_matrix(sample_count, subset_size, rng);
    sum += pseudoinverse(a_s * a_s.transpose());
  }
  return sum / static_cast<double>(replicates);
}

std::vector<SweepRecord> run_sweep(const ScenarioConfig& cfg) {
  validate_config(cfg);

  // Deduplicated, sorted grids define the canonical cell order.
  std::vector<Index> subset_sizes = cfg.subset_sizes;
  std::sort(subset_sizes.begin(), subset_sizes.end());
  subset_sizes.erase(std::unique(subset_sizes.begin(), subset_sizes.end()),
                     subset_sizes.end());
  std::vector<Index> sample_counts = cfg.sample_counts;
  std::sort(sample_counts.begin(), sample_counts.end());
  sample_counts.erase(std::unique(sample_counts.begin(), sample_counts.end()),
                      sample_counts.end());

  struct CellTask {
    Index subset_size;
    Index sample_count;
  };
  std::vector<CellTask> cells;
  cells.reserve(subset_sizes.size() * sample_counts.size());
  for (Index p_s : subset_sizes) {
    for (Index n : sample_counts) {
      cells.push_back({p_s, n});
    }
  }

  std::vector<SweepRecord> records(cells.size());
  std::vector<double> baselines(sample_counts.size(), kNaN);
  const std::size_t total_tasks = cells.size() + sample_counts.size();

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= total_tasks) {
        return;
      }
      if (t < cells.size()) {
        const CellTask& cell = cells[t];
        try {
          records[t] = run_cell(cfg, cell.subset_size, cell.sample_count);
        } catch (const std::exception& e) {
          // Record the failure in place without touching anything that could
          // throw again (the covariance build may be the failing step).
          SweepRecord rec;
          rec.scenario = cfg.id;
          rec.p = cfg.p;
          rec.subset_size = cell.subset_size;
          rec.sample_count = cell.sample_count;
          rec.replicates = cfg.replicates;
          rec.mode = cfg.mode;
          rec.empirical_mse = kNaN;
          rec.standard_error = kNaN;
          rec.baseline_mse = kNaN;
          rec.gamma = gamma_factor(cell.subset_size, cell.sample_count);
          rec.seed = cell_seed(cfg, cell.subset_size, cell.sample_count);
          rec.flags = std::string("error:") + e.what();
          records[t] = rec;
        }
      } else {
        const std::size_t b = t - cells.size();
        try {
          baselines[b] = run_baseline_cell(cfg, sample_counts[b]);
        } catch (const std::exception&) {
          baselines[b] = kNaN;
        }
      }
    }
  };

  const int thread_count =
      std::min<int>(effective_thread_count(), static_cast<int>(total_tasks));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto it = std::lower_bound(sample_counts.begin(), sample_counts.end(),
                                     records[i].sample_count);
    records[i].baseline_mse = baselines[static_cast<std::size_t>(it - sample_counts.begin())];
  }
  // Cells were generated in (p_S, n) order already; the sort keeps the
  // contract explicit even if task generation changes.
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.subset_size != b.subset_size ? a.subset_size < b.subset_size
                                          : a.sample_count < b.sample_count;
  });
  return records;
}

const char* scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1: return "s1";
    case ScenarioId::S2: return "s2";
    case ScenarioId::S3: return "s3";
    case ScenarioId::S4: return "s4";
    case ScenarioId::Custom: return "custom";
  }
  return "custom";
}

const char* mode_name(EstimatorMode mode) {
  return mode == EstimatorMode::Draw ? "draw" : "conditional";
}

ScenarioId parse_scenario_name(const std::string& name) {
  if (name == "s1") return ScenarioId::S1;
  if (name == "s2") return ScenarioId::S2;
  if (name == "s3") return ScenarioId::S3;
  if (name == "s4") return ScenarioId::S4;
  if (name == "custom") return ScenarioId::Custom;
  throw std::invalid_argument("unknown scenario name: " + name);
}

EstimatorMode parse_mode_name(const std::string& name) {
  if (name == "draw") return EstimatorMode::Draw;
  if (name == "conditional") return EstimatorMode::Conditional;
  throw std::invalid_argument("unknown estimator mode: " + name);
}

std::vector<Index> parse_grid(const std::string& text) {
  std::vector<Index> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (token.empty()) {
      throw std::invalid_argument("empty grid token in '" + text + "'");
    }
    const std::size_t c1 = token.find(':');
    if (c1 == std::string::npos) {
      std::size_t used = 0;
      const long long v = std::stoll(token, &used);
      if (used != token.size()) {
        throw std::invalid_argument("bad grid token '" + token + "'");
      }
      values.push_back(static_cast<Index>(v));
    } else {
      const std::size_t c2 = token.find(':', c1 + 1);
      if (c2 == std::string::npos) {
        throw std::invalid_argument("range token '" + token + "' must be start:step:stop");
      }
      const long long lo = std::stoll(token.substr(0, c1));
      const long long step = std::stoll(token.substr(c1 + 1, c2 - c1 - 1));
      const long long hi = std::stoll(token.substr(c2 + 1));
      if (step <= 0) {
        throw std::invalid_argument("range token '" + token + "' needs a positive step");
      }
      for (long long v = lo; v <= hi; v += step) {
        values.push_back(static_cast<Index>(v));
      }
    }
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  if (values.empty()) {
    throw std::invalid_argument("grid '" + text + "' expands to no values");
  }
  return values;
}

}  // namespace lmmse
