#pragma once

#include "lmmse/numkit.hpp"

#include <vector>

namespace lmmse {

/// Underlying linear system y = A x + v with x ~ N(0, K_x),
/// v ~ N(0, noise_variance * I_n) and i.i.d. standard normal regressor rows.
struct SystemSpec {
  Index p;
  CovarianceMatrix signal_covariance;  // K_x, p x p
  double noise_variance;               // per-sample variance of v

  SystemSpec(Index p_, CovarianceMatrix k_x, double noise_var);
};

/// Covariance blocks of x under a subset/complement split of its indices.
/// The cross block stores cov(x_C, x_S); it is a plain matrix because
/// rectangular blocks carry no definiteness constraint of their own.
struct PartitionedCovariance {
  Index subset_size;      // p_S
  Index complement_size;  // p_C
  CovarianceMatrix subset_covariance;      // K_{x_S}
  CovarianceMatrix complement_covariance;  // K_{x_C}
  Matrix cross_covariance;                 // K_{x_C x_S}, p_C x p_S
};

/// What the mismatched estimator believes: the assumed covariance of x_S and
/// the assumed per-sample noise variance.
struct AssumedModelSpec {
  Index subset_size;                      // p_S
  CovarianceMatrix assumed_covariance;    // \hat K_{x_S}
  double assumed_noise_variance;          // \hat sigma_z^2

  AssumedModelSpec(Index p_s, CovarianceMatrix k_hat, double noise_var);
};

/// One realization of the system. y = A x + v holds exactly by construction.
struct SystemDraw {
  Matrix regressors;  // A, n x p
  Vector signal;      // x
  Vector noise;       // v
  Vector observation; // y
};

/// Covariance blocks for an arbitrary index subset (order preserved).
PartitionedCovariance partition_indices(const SystemSpec& spec,
                                        const std::vector<Index>& subset);

/// Prefix rule: the subset is the leading subset_size indices of x.
PartitionedCovariance partition(const SystemSpec& spec, Index subset_size);

/// Sample A (row by row), then x, then v, and assemble y = A x + v.
SystemDraw draw_system(const SystemSpec& spec, Index n, RandomStream& rng);

/// First subset_size columns of A.
Matrix subset_columns(const Matrix& regressors, Index subset_size);

/// Remaining columns of A.
Matrix complement_columns(const Matrix& regressors, Index subset_size);

}  // namespace lmmse
