#include "lmmse/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmmse {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double gamma_factor(Index subset_size, Index sample_count) {
  if (subset_size < 1 || sample_count < 1) {
    throw std::invalid_argument("gamma_factor: counts must be >= 1");
  }
  if (subset_size < sample_count - 1) {
    return static_cast<double>(subset_size) /
           static_cast<double>(sample_count - subset_size - 1);
  }
  if (subset_size > sample_count + 1) {
    return static_cast<double>(sample_count) /
           static_cast<double>(subset_size - sample_count - 1);
  }
  return kInf;
}

TheoryInputs::TheoryInputs(Index p_s, Index n, double tr_k_xs, double tr_k_xc,
                           double tr_k_v)
    : subset_size(p_s),
      sample_count(n),
      trace_subset_covariance(tr_k_xs),
      trace_complement_covariance(tr_k_xc),
      trace_noise_covariance(tr_k_v) {
  if (p_s < 1 || n < 1) {
    throw std::invalid_argument("TheoryInputs: counts must be >= 1");
  }
  if (tr_k_xs < 0.0 || tr_k_xc < 0.0 || tr_k_v < 0.0) {
    throw std::invalid_argument("TheoryInputs: traces must be >= 0");
  }
}

double expected_partial_mse(const TheoryInputs& inputs) {
  const double p_s = static_cast<double>(inputs.subset_size);
  const double n = static_cast<double>(inputs.sample_count);
  const double truncation =
      inputs.trace_subset_covariance * (1.0 - std::min(p_s, n) / p_s);
  const double amplified =
      inputs.trace_complement_covariance + inputs.trace_noise_covariance / n;
  const double gamma = gamma_factor(inputs.subset_size, inputs.sample_count);
  if (std::isinf(gamma)) {
    return amplified > 0.0 ? kInf : truncation;
  }
  return truncation + gamma * amplified;
}

double expected_partial_mse_isotropic(Index subset_size, Index complement_size,
                                      Index sample_count, double sigma_x2,
                                      double sigma_v2) {
  if (complement_size < 0) {
    throw std::invalid_argument("expected_partial_mse_isotropic: p_C must be >= 0");
  }
  if (sigma_x2 < 0.0 || sigma_v2 < 0.0) {
    throw std::invalid_argument("expected_partial_mse_isotropic: variances must be >= 0");
  }
  TheoryInputs inputs(subset_size, sample_count,
                      sigma_x2 * static_cast<double>(subset_size),
                      sigma_x2 * static_cast<double>(complement_size),
                      static_cast<double>(sample_count) * sigma_v2);
  return expected_partial_mse(inputs);
}

double expected_whole_mse(double eps_subset, double trace_complement_covariance) {
  if (eps_subset < 0.0) {
    throw std::invalid_argument("expected_whole_mse: partial MSE must be >= 0");
  }
  if (trace_complement_covariance < 0.0) {
    throw std::invalid_argument("expected_whole_mse: trace must be >= 0");
  }
  return eps_subset + trace_complement_covariance;
}

double monotonicity_threshold(Index p, double sigma_x2, double sigma_v2) {
  if (p < 1) {
    throw std::invalid_argument("monotonicity_threshold: p must be >= 1");
  }
  if (sigma_x2 <= 0.0) {
    throw std::invalid_argument("monotonicity_threshold: sigma_x2 must be > 0");
  }
  if (sigma_v2 < 0.0) {
    throw std::invalid_argument("monotonicity_threshold: sigma_v2 must be >= 0");
  }
  return static_cast<double>(p) + sigma_v2 / sigma_x2 + 1.0;
}

double snr_db(double trace_signal_covariance, double sigma_v2) {
  if (trace_signal_covariance <= 0.0 || sigma_v2 <= 0.0) {
    throw std::invalid_argument("snr_db: arguments must be > 0");
  }
  return 10.0 * std::log10(trace_signal_covariance / sigma_v2);
}

}  // namespace lmmse
