#include "lmmse/experiment.hpp"

#include "lmmse/analytic.hpp"
#include "lmmse/csv_io.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace lmmse;

namespace {

ScenarioConfig tiny_config() {
  ScenarioConfig cfg;
  cfg.id = ScenarioId::Custom;
  cfg.p = 6;
  cfg.sigma_v2 = 0.0;
  cfg.subset_sizes = {6};
  cfg.sample_counts = {12};
  cfg.replicates = 20;
  cfg.master_seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("scenario presets match the published settings") {
  const ScenarioConfig s1 = scenario_preset(ScenarioId::S1);
  CHECK(s1.p == 30);
  CHECK(s1.sigma_v2 == 0.25);
  CHECK(s1.assumed_noise_variance == 0.0);
  CHECK(s1.covariance_rule == CovarianceRule::Identity);

  const ScenarioConfig s2 = scenario_preset(ScenarioId::S2);
  CHECK(s2.sigma_v2 == 30.0);

  const ScenarioConfig s3 = scenario_preset(ScenarioId::S3);
  CHECK(s3.covariance_rule == CovarianceRule::RandomizedGram);
  CHECK(s3.sigma_v2 == 0.25);

  const ScenarioConfig s4 = scenario_preset(ScenarioId::S4);
  CHECK(s4.assumed_noise_variance == 0.25);
  CHECK(s4.sigma_v2 == 0.25);
}

TEST_CASE("identity covariance rule") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  RandomStream rng(covariance_seed(cfg));
  const CovarianceMatrix k = build_scenario_covariance(cfg, rng);
  CHECK((k.matrix() - Matrix::Identity(30, 30)).norm() == 0.0);
  CHECK(k.trace() == 30.0);
}

TEST_CASE("randomized covariance rule is trace-normalized, PSD, and pinned") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S3);
  RandomStream rng_a(covariance_seed(cfg));
  RandomStream rng_b(covariance_seed(cfg));
  const CovarianceMatrix a = build_scenario_covariance(cfg, rng_a);
  const CovarianceMatrix b = build_scenario_covariance(cfg, rng_b);
  CHECK(std::abs(a.trace() - 30.0) < 1e-10);
  CHECK((a.matrix() - b.matrix()).norm() == 0.0);

  cfg.p = 4;
  RandomStream rng_c(covariance_seed(cfg));
  const CovarianceMatrix small = build_scenario_covariance(cfg, rng_c);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(small.matrix());
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
  CHECK(eig.eigenvalues().minCoeff() > 1e-8);  // full rank almost surely
  CHECK(std::abs(small.trace() - 4.0) < 1e-12);
}

TEST_CASE("exact recovery regime gives zero empirical MSE in both modes") {
  for (EstimatorMode mode : {EstimatorMode::Draw, EstimatorMode::Conditional}) {
    ScenarioConfig cfg = tiny_config();
    cfg.mode = mode;
    const SweepRecord rec = run_cell(cfg, 6, 12);
    CHECK(std::abs(rec.empirical_mse) < 1e-8);
  }
}

TEST_CASE("conditional cell estimate matches the closed form at p_S = 30, n = 60") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.mode = EstimatorMode::Conditional;
  cfg.replicates = 2000;
  cfg.master_seed = 424242;
  const SweepRecord rec = run_cell(cfg, 30, 60);
  const double expected = 30.0 / 29.0 * 0.25;
  REQUIRE(rec.analytic_mse.has_value());
  CHECK(*rec.analytic_mse == expected);
  CHECK(std::abs(rec.empirical_mse - expected) <= 3.0 * rec.standard_error);
}

TEST_CASE("cells are deterministic given the seed") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.replicates = 50;
  const SweepRecord a = run_cell(cfg, 10, 24);
  const SweepRecord b = run_cell(cfg, 10, 24);
  CHECK(a.empirical_mse == b.empirical_mse);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.seed == b.seed);
}

TEST_CASE("cell records carry gamma, analytic value, and flags") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.replicates = 5;
  const SweepRecord rec = run_cell(cfg, 10, 40);
  CHECK(rec.gamma == 10.0 / 29.0);
  REQUIRE(rec.analytic_mse.has_value());
  CHECK(*rec.analytic_mse ==
        expected_whole_mse(expected_partial_mse_isotropic(10, 20, 40, 1.0, 0.25), 20.0));
  CHECK(rec.flags.empty());

  const SweepRecord near = run_cell(cfg, 10, 11);
  CHECK(near.flags == "near-interpolation");
  CHECK(std::isinf(near.gamma));
  REQUIRE(near.analytic_mse.has_value());
  CHECK(std::isinf(*near.analytic_mse));

  cfg.replicates = 1;
  const SweepRecord degenerate = run_cell(cfg, 10, 40);
  CHECK(degenerate.standard_error == 0.0);
  CHECK(degenerate.flags == "degenerate");
}

TEST_CASE("assumed noise disables the analytic column") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S4);
  cfg.replicates = 5;
  const SweepRecord rec = run_cell(cfg, 10, 40);
  CHECK_FALSE(rec.analytic_mse.has_value());
}

TEST_CASE("the closed form applies to the randomized covariance through its traces") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S3);
  cfg.mode = EstimatorMode::Conditional;
  cfg.replicates = 2000;
  cfg.master_seed = 88;
  const SweepRecord rec = run_cell(cfg, 12, 40);
  REQUIRE(rec.analytic_mse.has_value());
  CHECK(std::isfinite(*rec.analytic_mse));
  CHECK(std::abs(rec.empirical_mse - *rec.analytic_mse) <=
        std::max(3.0 * rec.standard_error, 0.02 * *rec.analytic_mse));
}

TEST_CASE("baseline cell values") {
  ScenarioConfig cfg = tiny_config();
  CHECK(std::abs(run_baseline_cell(cfg, 12)) < 1e-8);

  cfg.sigma_x2 = 0.0;  // zero-power signal
  CHECK(run_baseline_cell(cfg, 12) == 0.0);
}

TEST_CASE("baseline stays below every strict-subset partial estimate") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.mode = EstimatorMode::Conditional;
  cfg.replicates = 100;
  const double baseline = run_baseline_cell(cfg, 60);
  for (Index p_s : {5, 15, 29}) {
    const SweepRecord rec = run_cell(cfg, p_s, 60);
    CHECK(baseline < rec.empirical_mse);
  }
}

TEST_CASE("full-subset partial estimate approaches the baseline at large n") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.mode = EstimatorMode::Conditional;
  cfg.replicates = 400;
  for (Index n : {60, 90}) {
    const double baseline = run_baseline_cell(cfg, n);
    const SweepRecord rec = run_cell(cfg, 30, n);
    const double ratio = rec.empirical_mse / baseline;
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 1.1);
  }
}

TEST_CASE("draw and conditional modes agree within combined standard errors") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.replicates = 1500;
  for (const auto& [p_s, n] : std::vector<std::pair<Index, Index>>{{10, 40}, {20, 8}}) {
    cfg.mode = EstimatorMode::Draw;
    const SweepRecord draw = run_cell(cfg, p_s, n);
    cfg.mode = EstimatorMode::Conditional;
    const SweepRecord cond = run_cell(cfg, p_s, n);
    const double combined =
        std::sqrt(draw.standard_error * draw.standard_error +
                  cond.standard_error * cond.standard_error);
    CHECK(std::abs(draw.empirical_mse - cond.empirical_mse) <= 3.0 * combined);
    // Averaging (x, v) out analytically can only shrink the spread.
    CHECK(cond.standard_error <= draw.standard_error);
  }
}

TEST_CASE("projection mean matches its closed-form diagonal") {
  RandomStream rng(7001);
  const Matrix wide = estimate_projection_mean(20, 8, 2000, rng);
  for (Index i = 0; i < 20; ++i) {
    CHECK(std::abs(wide(i, i) - 0.4) < 0.02);
  }

  RandomStream rng2(7002);
  const Matrix tall = estimate_projection_mean(8, 20, 200, rng2);
  CHECK((tall - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

  RandomStream rng3(7003);
  const Matrix scalar = estimate_projection_mean(1, 1, 1, rng3);
  CHECK(scalar(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gram pseudoinverse mean matches gamma / n") {
  RandomStream rng(7004);
  const Matrix over = estimate_gram_pinv_mean(20, 8, 2000, rng);
  const double target_over = gamma_factor(20, 8) / 8.0;  // 1/11
  for (Index i = 0; i < 8; ++i) {
    CHECK(std::abs(over(i, i) - target_over) < 0.05 * target_over);
  }

  RandomStream rng2(7005);
  const Matrix under = estimate_gram_pinv_mean(5, 20, 2000, rng2);
  const double target_under = gamma_factor(5, 20) / 20.0;  // 1/56
  for (Index i = 0; i < 20; ++i) {
    CHECK(std::abs(under(i, i) - target_under) < 0.05 * target_under);
  }
}

TEST_CASE("complement regressor second moment is n times the identity") {
  RandomStream rng(7006);
  const Index p_c = 6;
  const Index n = 9;
  Matrix acc = Matrix::Zero(p_c, p_c);
  for (int j = 0; j < 2000; ++j) {
    const Matrix a_c = sample_gaussian_matrix(n, p_c, rng);
    acc += a_c.transpose() * a_c;
  }
  acc /= 2000.0;
  CHECK(((acc / static_cast<double>(n)) - Matrix::Identity(p_c, p_c))
            .cwiseAbs()
            .maxCoeff() < 0.03);
}

TEST_CASE("sweep produces canonical order, baselines, and expected ordering") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.mode = EstimatorMode::Conditional;
  cfg.replicates = 200;
  cfg.subset_sizes = {10};
  cfg.sample_counts = {50, 5};
  const std::vector<SweepRecord> records = run_sweep(cfg);
  REQUIRE(records.size() == 2);
  CHECK(records[0].sample_count == 5);
  CHECK(records[1].sample_count == 50);
  CHECK(records[1].empirical_mse < records[0].empirical_mse);
  CHECK(std::isfinite(records[0].baseline_mse));
  CHECK(std::isfinite(records[1].baseline_mse));
}

TEST_CASE("sweeps are reproducible and share per-n baselines") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S2);
  cfg.replicates = 30;
  cfg.subset_sizes = {5, 10};
  cfg.sample_counts = {8, 16};
  const std::vector<SweepRecord> a = run_sweep(cfg);
  const std::vector<SweepRecord> b = run_sweep(cfg);
  CHECK(csv_to_string(a) == csv_to_string(b));
  REQUIRE(a.size() == 4);
  CHECK(a[0].baseline_mse == a[2].baseline_mse);  // both at n = 8
  CHECK(a[1].baseline_mse == a[3].baseline_mse);  // both at n = 16
  CHECK(a[0].seed != a[2].seed);                  // distinct cell streams
}

TEST_CASE("common random numbers share regressor draws across p_S") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.common_random_numbers = true;
  CHECK(cell_seed(cfg, 5, 40) == cell_seed(cfg, 25, 40));
  cfg.common_random_numbers = false;
  CHECK(cell_seed(cfg, 5, 40) != cell_seed(cfg, 25, 40));
}

TEST_CASE("a failing covariance is recorded in place and the sweep continues") {
  ScenarioConfig cfg;
  cfg.p = 3;
  cfg.covariance_rule = CovarianceRule::Explicit;
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = -2.0;  // indefinite
  cfg.explicit_covariance = bad;
  cfg.subset_sizes = {2};
  cfg.sample_counts = {6, 8};
  cfg.replicates = 4;
  const std::vector<SweepRecord> records = run_sweep(cfg);
  REQUIRE(records.size() == 2);
  for (const SweepRecord& rec : records) {
    CHECK(rec.flags.rfind("error:", 0) == 0);
    CHECK(std::isnan(rec.empirical_mse));
  }
}

TEST_CASE("config validation rejects contradictions") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.subset_sizes = {40};  // exceeds p = 30
  CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);

  ScenarioConfig empty = scenario_preset(ScenarioId::S1);
  empty.sample_counts.clear();
  CHECK_THROWS_AS(run_sweep(empty), std::invalid_argument);

  ScenarioConfig zero_reps = scenario_preset(ScenarioId::S1);
  zero_reps.replicates = 0;
  CHECK_THROWS_AS(run_sweep(zero_reps), std::invalid_argument);
}

TEST_CASE("empirical MSE peaks at the interpolation point n = p_S") {
  ScenarioConfig cfg = scenario_preset(ScenarioId::S1);
  cfg.replicates = 100;
  for (Index p_s : {10, 20}) {
    const SweepRecord at_peak = run_cell(cfg, p_s, p_s);
    const SweepRecord past_peak = run_cell(cfg, p_s, p_s + 5);
    CHECK(at_peak.empirical_mse >= 10.0 * past_peak.empirical_mse);
  }
}

TEST_CASE("grid parsing expands lists and ranges") {
  CHECK(parse_grid("5,10,30") == std::vector<Index>{5, 10, 30});
  CHECK(parse_grid("2:2:8") == std::vector<Index>{2, 4, 6, 8});
  CHECK(parse_grid("1,4:3:10,30") == std::vector<Index>{1, 4, 7, 10, 30});
  CHECK(parse_grid("2:2:90").size() == 45);
  CHECK(parse_grid("7") == std::vector<Index>{7});
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("5:0:9"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("abc"), std::invalid_argument);
}

TEST_CASE("scenario and mode names round-trip") {
  for (ScenarioId id : {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3, ScenarioId::S4,
                        ScenarioId::Custom}) {
    CHECK(parse_scenario_name(scenario_name(id)) == id);
  }
  for (EstimatorMode mode : {EstimatorMode::Draw, EstimatorMode::Conditional}) {
    CHECK(parse_mode_name(mode_name(mode)) == mode);
  }
  CHECK_THROWS_AS(parse_scenario_name("s9"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mode_name("mc"), std::invalid_argument);
}
