#include "lmmse/model.hpp"

#include <stdexcept>
#include <string>

namespace lmmse {

SystemSpec::SystemSpec(Index p_, CovarianceMatrix k_x, double noise_var)
    : p(p_), signal_covariance(std::move(k_x)), noise_variance(noise_var) {
  if (p < 1) {
    throw std::invalid_argument("SystemSpec: p must be >= 1");
  }
  if (signal_covariance.dim() != p) {
    throw std::invalid_argument("SystemSpec: K_x dimension does not match p");
  }
  if (noise_variance < 0.0) {
    throw std::invalid_argument("SystemSpec: noise variance must be >= 0");
  }
}

AssumedModelSpec::AssumedModelSpec(Index p_s, CovarianceMatrix k_hat, double noise_var)
    : subset_size(p_s),
      assumed_covariance(std::move(k_hat)),
      assumed_noise_variance(noise_var) {
  if (subset_size < 1) {
    throw std::invalid_argument("AssumedModelSpec: subset size must be >= 1");
  }
  if (assumed_covariance.dim() != subset_size) {
    throw std::invalid_argument("AssumedModelSpec: assumed covariance dimension mismatch");
  }
  if (assumed_noise_variance < 0.0) {
    throw std::invalid_argument("AssumedModelSpec: assumed noise variance must be >= 0");
  }
}

PartitionedCovariance partition_indices(const SystemSpec& spec,
                                        const std::vector<Index>& subset) {
  const Index p = spec.p;
  std::vector<bool> taken(static_cast<std::size_t>(p), false);
  for (Index idx : subset) {
    if (idx < 0 || idx >= p) {
      throw std::invalid_argument("partition: index " + std::to_string(idx) +
                                  " outside [0, " + std::to_string(p) + ")");
    }
    if (taken[static_cast<std::size_t>(idx)]) {
      throw std::invalid_argument("partition: duplicate index " + std::to_string(idx));
    }
    taken[static_cast<std::size_t>(idx)] = true;
  }
  if (subset.empty()) {
    throw std::invalid_argument("partition: subset must be nonempty");
  }

  std::vector<Index> complement;
  complement.reserve(static_cast<std::size_t>(p) - subset.size());
  for (Index i = 0; i < p; ++i) {
    if (!taken[static_cast<std::size_t>(i)]) {
      complement.push_back(i);
    }
  }

  const Index p_s = static_cast<Index>(subset.size());
  const Index p_c = static_cast<Index>(complement.size());
  const Matrix& k = spec.signal_covariance.matrix();

  Matrix k_ss(p_s, p_s);
  for (Index r = 0; r < p_s; ++r) {
    for (Index c = 0; c < p_s; ++c) {
      k_ss(r, c) = k(subset[static_cast<std::size_t>(r)], subset[static_cast<std::size_t>(c)]);
    }
  }
  Matrix k_cc(p_c, p_c);
  Matrix k_cs(p_c, p_s);
  for (Index r = 0; r < p_c; ++r) {
    for (Index c = 0; c < p_c; ++c) {
      k_cc(r, c) =
          k(complement[static_cast<std::size_t>(r)], complement[static_cast<std::size_t>(c)]);
    }
    for (Index c = 0; c < p_s; ++c) {
      k_cs(r, c) =
          k(complement[static_cast<std::size_t>(r)], subset[static_cast<std::size_t>(c)]);
    }
  }

  return PartitionedCovariance{p_s, p_c, CovarianceMatrix(std::move(k_ss)),
                               CovarianceMatrix(std::move(k_cc)), std::move(k_cs)};
}

PartitionedCovariance partition(const SystemSpec& spec, Index subset_size) {
  if (subset_size < 1 || subset_size > spec.p) {
    throw std::invalid_argument("partition: subset size " + std::to_string(subset_size) +
                                " outside [1, " + std::to_string(spec.p) + "]");
  }
  std::vector<Index> subset(static_cast<std::size_t>(subset_size));
  for (Index i = 0; i < subset_size; ++i) {
    subset[static_cast<std::size_t>(i)] = i;
  }
  return partition_indices(spec, subset);
}

SystemDraw draw_system(const SystemSpec& spec, Index n, RandomStream& rng) {
  if (n < 1) {
    throw std::invalid_argument("draw_system: n must be >= 1");
  }
  Matrix a = sample_gaussian_matrix(n, spec.p, rng);
  Vector x = sample_gaussian_vector(spec.signal_covariance, rng);
  const double noise_sd = std::sqrt(spec.noise_variance);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = noise_sd * rng.next_normal();
  }
  // Materialize A x first so the construction identity y = A x + v is exact
  // bit for bit when re-evaluated the same way.
  Vector ax = a * x;
  Vector y = ax + v;
  return SystemDraw{std::move(a), std::move(x), std::move(v), std::move(y)};
}

Matrix subset_columns(const Matrix& regressors, Index subset_size) {
  if (subset_size < 0 || subset_size > regressors.cols()) {
    throw std::invalid_argument("subset_columns: size out of range");
  }
  return regressors.leftCols(subset_size);
}

Matrix complement_columns(const Matrix& regressors, Index subset_size) {
  if (subset_size < 0 || subset_size > regressors.cols()) {
    throw std::invalid_argument("complement_columns: size out of range");
  }
  return regressors.rightCols(regressors.cols() - subset_size);
}

}  // namespace lmmse
