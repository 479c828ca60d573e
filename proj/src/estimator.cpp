#include "lmmse/estimator.hpp"

#include <stdexcept>
#include <string>

namespace lmmse {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) {
    throw std::invalid_argument(msg);
  }
}

}  // namespace

WeightsMatrix::WeightsMatrix(Matrix w) : entries(std::move(w)) {
  if (!entries.allFinite()) {
    throw std::invalid_argument("WeightsMatrix: non-finite entries");
  }
}

WeightsMatrix full_lmmse_weights(const Matrix& regressors, const CovarianceMatrix& k_x,
                                 double noise_variance, double rcond) {
  const Index n = regressors.rows();
  require(regressors.cols() == k_x.dim(), "full_lmmse_weights: A and K_x dimension mismatch");
  require(noise_variance >= 0.0, "full_lmmse_weights: noise variance must be >= 0");
  Matrix k_y = regressors * k_x.matrix() * regressors.transpose() +
               noise_variance * Matrix::Identity(n, n);
  return WeightsMatrix(k_x.matrix() * regressors.transpose() * pseudoinverse(k_y, rcond));
}

WeightsMatrix partial_lmmse_weights(const Matrix& subset_regressors,
                                    const AssumedModelSpec& assumed, double rcond) {
  const Index n = subset_regressors.rows();
  require(subset_regressors.cols() == assumed.subset_size,
          "partial_lmmse_weights: A_S and assumed model dimension mismatch");
  const Matrix& k_hat = assumed.assumed_covariance.matrix();
  Matrix k_y = subset_regressors * k_hat * subset_regressors.transpose() +
               assumed.assumed_noise_variance * Matrix::Identity(n, n);
  return WeightsMatrix(k_hat * subset_regressors.transpose() * pseudoinverse(k_y, rcond));
}

WeightsMatrix oracle_partial_weights(const Matrix& regressors,
                                     const PartitionedCovariance& part,
                                     double noise_variance, OracleWeightsMode mode,
                                     double rcond) {
  const Index n = regressors.rows();
  const Index p = part.subset_size + part.complement_size;
  require(regressors.cols() == p, "oracle_partial_weights: A and partition dimension mismatch");
  require(noise_variance >= 0.0, "oracle_partial_weights: noise variance must be >= 0");

  const Matrix a_s = subset_columns(regressors, part.subset_size);
  const Matrix a_c = complement_columns(regressors, part.subset_size);

  // K_y from the underlying system, assembled blockwise.
  Matrix k_y = a_s * part.subset_covariance.matrix() * a_s.transpose() +
               a_c * part.complement_covariance.matrix() * a_c.transpose() +
               a_s * part.cross_covariance.transpose() * a_c.transpose() +
               a_c * part.cross_covariance * a_s.transpose() +
               noise_variance * Matrix::Identity(n, n);

  Matrix cross_term = part.subset_covariance.matrix() * a_s.transpose();
  if (mode == OracleWeightsMode::General) {
    cross_term += part.cross_covariance.transpose() * a_c.transpose();
  }
  return WeightsMatrix(cross_term * pseudoinverse(k_y, rcond));
}

double mse_full(const WeightsMatrix& w, const Matrix& regressors,
                const CovarianceMatrix& k_x, double noise_variance) {
  const Index p = k_x.dim();
  require(regressors.cols() == p, "mse_full: A and K_x dimension mismatch");
  require(w.target_dim() == p && w.sample_count() == regressors.rows(),
          "mse_full: weights dimension mismatch");
  require(noise_variance >= 0.0, "mse_full: noise variance must be >= 0");
  Matrix residual_map = Matrix::Identity(p, p) - w.entries * regressors;
  return (residual_map * k_x.matrix() * residual_map.transpose()).trace() +
         noise_variance * w.entries.squaredNorm();
}

double mse_partial_conditional(const WeightsMatrix& w_s, const Matrix& subset_regressors,
                               const Matrix& complement_regressors,
                               const PartitionedCovariance& part, double noise_variance) {
  const Index p_s = part.subset_size;
  const Index n = subset_regressors.rows();
  require(subset_regressors.cols() == p_s,
          "mse_partial_conditional: A_S and partition dimension mismatch");
  require(complement_regressors.cols() == part.complement_size,
          "mse_partial_conditional: A_C and partition dimension mismatch");
  require(complement_regressors.rows() == n,
          "mse_partial_conditional: A_S and A_C row count mismatch");
  require(w_s.target_dim() == p_s && w_s.sample_count() == n,
          "mse_partial_conditional: weights dimension mismatch");
  require(noise_variance >= 0.0, "mse_partial_conditional: noise variance must be >= 0");

  const Matrix& w = w_s.entries;
  Matrix residual_map = Matrix::Identity(p_s, p_s) - w * subset_regressors;
  Matrix leak = w * complement_regressors;  // p_S x p_C

  double value = (residual_map * part.subset_covariance.matrix() * residual_map.transpose())
                     .trace();
  value += (leak * part.complement_covariance.matrix() * leak.transpose()).trace();
  value += noise_variance * w.squaredNorm();
  value -= 2.0 * (leak * part.cross_covariance * residual_map.transpose()).trace();
  return value;
}

double mse_partial_pinv_form(const Matrix& subset_regressors,
                             const Matrix& complement_regressors,
                             const PartitionedCovariance& part, double noise_variance,
                             double rcond) {
  const Index n = subset_regressors.rows();
  require(subset_regressors.cols() == part.subset_size,
          "mse_partial_pinv_form: A_S and partition dimension mismatch");
  require(complement_regressors.cols() == part.complement_size,
          "mse_partial_pinv_form: A_C and partition dimension mismatch");
  require(complement_regressors.rows() == n,
          "mse_partial_pinv_form: A_S and A_C row count mismatch");
  require(noise_variance >= 0.0, "mse_partial_pinv_form: noise variance must be >= 0");

  Matrix pinv_a_s = pseudoinverse(subset_regressors, rcond);
  Matrix gram_pinv = pinv_a_s.transpose() * pinv_a_s;  // = (A_S A_S^T)^+

  double value = part.subset_covariance.trace();
  value -= (pinv_a_s * subset_regressors * part.subset_covariance.matrix()).trace();
  value += (complement_regressors.transpose() * gram_pinv * complement_regressors *
            part.complement_covariance.matrix())
               .trace();
  value += noise_variance * gram_pinv.trace();
  return value;
}

double mse_whole_vector(double j_s, const PartitionedCovariance& part) {
  if (j_s < 0.0) {
    throw std::invalid_argument("mse_whole_vector: partial MSE must be >= 0, got " +
                                std::to_string(j_s));
  }
  return j_s + part.complement_covariance.trace();
}

}  // namespace lmmse
