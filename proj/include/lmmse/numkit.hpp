#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>

namespace lmmse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric positive semidefinite matrix, validated on construction.
/// Symmetry tolerance is 1e-12 (relative to the largest entry) and the
/// smallest eigenvalue must be >= -1e-10 times the largest magnitude one.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Matrix entries);

  static CovarianceMatrix identity(Index dim);
  static CovarianceMatrix zero(Index dim);
  static CovarianceMatrix scaled_identity(Index dim, double scale);

  const Matrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }
  double trace() const { return entries_.trace(); }

 private:
  Matrix entries_;
};

// Counter-based 64-bit stream (splitmix-style state advance and finalizer).
// Identical seeds give identical draw sequences; sub-streams derived from
// (seed, label...) tuples are usable as statistically independent streams.
// Single-owner: never share one stream across concurrent tasks.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream(const RandomStream&) = delete;
  RandomStream& operator=(const RandomStream&) = delete;
  RandomStream(RandomStream&&) = default;
  RandomStream& operator=(RandomStream&&) = default;

  std::uint64_t next_u64();

  /// Uniform draw in (0, 1].
  double next_uniform();

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in deterministic order.
  double next_normal();

 private:
  std::uint64_t state_;
  double pending_normal_ = 0.0;
  bool has_pending_ = false;
};

/// Seed for a sub-stream addressed by (base, labels...). Chaining the same
/// labels always lands on the same seed.
std::uint64_t derive_seed(std::uint64_t base, std::span<const std::uint64_t> labels);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

/// Sub-stream constructor shorthand for derive_seed.
RandomStream substream(std::uint64_t base, std::initializer_list<std::uint64_t> labels);

/// Moore-Penrose pseudoinverse via SVD. Singular values <= rcond * sigma_max
/// are treated as zero. rcond < 0 selects the default max(rows, cols) * eps.
Matrix pseudoinverse(const Matrix& m, double rcond = -1.0);

/// Draw from N(0, K). Uses the Cholesky factor of K and falls back to a
/// symmetric eigendecomposition (negative eigenvalues clamped at zero) when
/// K is singular.
Vector sample_gaussian_vector(const CovarianceMatrix& k, RandomStream& rng);

/// Matrix of i.i.d. standard normals, filled row by row.
Matrix sample_gaussian_matrix(Index rows, Index cols, RandomStream& rng);

}  // namespace lmmse
