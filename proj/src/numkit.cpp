#include "lmmse/numkit.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lmmse {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("covariance matrix must be square, got " +
                                std::to_string(entries_.rows()) + "x" +
                                std::to_string(entries_.cols()));
  }
  if (entries_.size() == 0) {
    return;
  }
  if (!all_finite(entries_)) {
    throw std::invalid_argument("covariance matrix has non-finite entries");
  }
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(entries_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (lo < -1e-10 * std::max(1.0, hi)) {
    throw std::invalid_argument("covariance matrix is indefinite (min eigenvalue " +
                                std::to_string(lo) + ")");
  }
}

CovarianceMatrix CovarianceMatrix::identity(Index dim) {
  return CovarianceMatrix(Matrix::Identity(dim, dim));
}

CovarianceMatrix CovarianceMatrix::zero(Index dim) {
  return CovarianceMatrix(Matrix::Zero(dim, dim));
}

CovarianceMatrix CovarianceMatrix::scaled_identity(Index dim, double scale) {
  if (scale < 0.0) {
    throw std::invalid_argument("identity covariance scale must be >= 0");
  }
  return CovarianceMatrix(scale * Matrix::Identity(dim, dim));
}

RandomStream::RandomStream(std::uint64_t seed) : state_(seed) {}

std::uint64_t RandomStream::next_u64() {
  state_ += kGoldenGamma;
  return mix64(state_);
}

double RandomStream::next_uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() stays finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_pending_) {
    has_pending_ = false;
    return pending_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  pending_normal_ = radius * std::sin(angle);
  has_pending_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t base, std::span<const std::uint64_t> labels) {
  std::uint64_t h = mix64(base + kGoldenGamma);
  for (std::uint64_t label : labels) {
    h = mix64(h ^ (label + kGoldenGamma));
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  return derive_seed(base, std::span<const std::uint64_t>(labels.begin(), labels.size()));
}

RandomStream substream(std::uint64_t base, std::initializer_list<std::uint64_t> labels) {
  return RandomStream(derive_seed(base, labels));
}

Matrix pseudoinverse(const Matrix& m, double rcond) {
  if (!all_finite(m)) {
    throw std::invalid_argument("pseudoinverse: input has non-finite entries");
  }
  if (m.rows() == 0 || m.cols() == 0) {
    return Matrix::Zero(m.cols(), m.rows());
  }
  if (rcond < 0.0) {
    rcond = static_cast<double>(std::max(m.rows(), m.cols())) *
            std::numeric_limits<double>::epsilon();
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = rcond * sv(0);
  Vector inv_sv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv_sv(i) = 1.0 / sv(i);
    }
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Vector sample_gaussian_vector(const CovarianceMatrix& k, RandomStream& rng) {
  const Index dim = k.dim();
  Vector g(dim);
  for (Index i = 0; i < dim; ++i) {
    g(i) = rng.next_normal();
  }
  if (dim == 0) {
    return g;
  }
  Eigen::LLT<Matrix> llt(k.matrix());
  if (llt.info() == Eigen::Success) {
    return llt.matrixL() * g;
  }
  // Singular K: factor through the eigendecomposition instead.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k.matrix());
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument("sample_gaussian_vector: eigendecomposition failed");
  }
  Vector scale = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * scale.asDiagonal() * g;
}

Matrix sample_gaussian_matrix(Index rows, Index cols, RandomStream& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_gaussian_matrix: rows and cols must be >= 1");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.next_normal();
    }
  }
  return m;
}

}  // namespace lmmse
