#pragma once

#include "lmmse/numkit.hpp"

namespace lmmse {

/// Inverse-Wishart trace coefficient controlling how discarded signal and
/// noise are amplified:
///   p_S / (n - p_S - 1)   for p_S < n - 1,
///   n / (p_S - n - 1)     for p_S > n + 1,
///   +infinity             otherwise (|p_S - n| <= 1).
double gamma_factor(Index subset_size, Index sample_count);

/// Raw traces entering the closed-form expected MSE. Valid whenever the
/// estimator uses an identity assumed covariance, zero assumed noise, and
/// standard normal regressors; the caller asserts that applicability.
struct TheoryInputs {
  Index subset_size;   // p_S
  Index sample_count;  // n
  double trace_subset_covariance;      // tr(K_xS)
  double trace_complement_covariance;  // tr(K_xC)
  double trace_noise_covariance;       // tr(K_v)

  TheoryInputs(Index p_s, Index n, double tr_k_xs, double tr_k_xc, double tr_k_v);
};

/// Expected MSE of the partial estimator over regressor draws:
///   tr(K_xS) (1 - min{p_S, n}/p_S) + gamma (tr(K_xC) + tr(K_v)/n).
/// Infinite gamma yields +infinity unless the amplified sum is exactly zero,
/// in which case the first term alone is returned.
double expected_partial_mse(const TheoryInputs& inputs);

/// Special case with tr(K_xS) = sigma_x2 p_S, tr(K_xC) = sigma_x2 p_C and
/// tr(K_v) = n sigma_v2:
///   sigma_x2 (p_S - min{p_S, n}) + gamma (sigma_x2 p_C + sigma_v2).
double expected_partial_mse_isotropic(Index subset_size, Index complement_size,
                                      Index sample_count, double sigma_x2,
                                      double sigma_v2);

/// Whole-vector expected MSE: partial value plus the discarded power.
/// Infinity propagates.
double expected_whole_mse(double eps_subset, double trace_complement_covariance);

/// Sample count above which the isotropic whole-vector MSE strictly decreases
/// in p_S (and below which, for n > p + 1, it strictly increases):
///   n* = p + sigma_v2 / sigma_x2 + 1.
double monotonicity_threshold(Index p, double sigma_x2, double sigma_v2);

/// 10 log10(tr(K_x) / sigma_v2).
double snr_db(double trace_signal_covariance, double sigma_v2);

}  // namespace lmmse
