#pragma once

#include "lmmse/model.hpp"
#include "lmmse/numkit.hpp"

namespace lmmse {

/// Linear estimator acting on n observations; entries are the weights of
/// x_hat = W y. target_dim is p for whole-vector estimators, p_S for partial
/// ones.
struct WeightsMatrix {
  Matrix entries;  // target_dim x n

  explicit WeightsMatrix(Matrix w);

  Index target_dim() const { return entries.rows(); }
  Index sample_count() const { return entries.cols(); }
};

/// Which cross-covariance terms the oracle partial estimator uses.
/// Literal drops the x_S/x_C cross term from the numerator; General keeps it
/// and is the true LMMSE estimate of x_S under the underlying system.
enum class OracleWeightsMode { Literal, General };

/// W = K_x A^T (A K_x A^T + noise_variance I)^+, the MSE-optimal linear
/// estimator of x from y.
WeightsMatrix full_lmmse_weights(const Matrix& regressors, const CovarianceMatrix& k_x,
                                 double noise_variance, double rcond = -1.0);

/// W_S = K_hat A_S^T (A_S K_hat A_S^T + assumed_noise I)^+, the mismatched
/// estimator built from the assumed partial model.
WeightsMatrix partial_lmmse_weights(const Matrix& subset_regressors,
                                    const AssumedModelSpec& assumed, double rcond = -1.0);

/// The LMMSE estimate of x_S when the true covariances are known.
WeightsMatrix oracle_partial_weights(const Matrix& regressors,
                                     const PartitionedCovariance& part,
                                     double noise_variance,
                                     OracleWeightsMode mode = OracleWeightsMode::Literal,
                                     double rcond = -1.0);

/// Exact MSE of estimating x with W, conditional on the regressors:
/// tr((I - WA) K_x (I - WA)^T + noise_variance W W^T).
double mse_full(const WeightsMatrix& w, const Matrix& regressors,
                const CovarianceMatrix& k_x, double noise_variance);

/// Exact MSE of estimating x_S with W_S, conditional on the regressors.
/// Accounts for the discarded signal x_C leaking through A_C and for the
/// cross covariance between x_S and x_C.
double mse_partial_conditional(const WeightsMatrix& w_s, const Matrix& subset_regressors,
                               const Matrix& complement_regressors,
                               const PartitionedCovariance& part, double noise_variance);

/// Closed trace form of mse_partial_conditional at W_S = A_S^+:
/// tr(K_xS - A_S^+ A_S K_xS + A_C^T (A_S A_S^T)^+ A_C K_xC)
///   + noise_variance tr((A_S A_S^T)^+).
double mse_partial_pinv_form(const Matrix& subset_regressors,
                             const Matrix& complement_regressors,
                             const PartitionedCovariance& part, double noise_variance,
                             double rcond = -1.0);

/// Whole-vector MSE: the partial error plus the power of the discarded part,
/// J = J_S + tr(K_xC).
double mse_whole_vector(double j_s, const PartitionedCovariance& part);

}  // namespace lmmse
