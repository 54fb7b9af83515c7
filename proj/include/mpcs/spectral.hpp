#ifndef MPCS_SPECTRAL_HPP
#define MPCS_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mpcs/graph.hpp"

namespace mpcs {

/// Numerical thresholds. Integer Laplacians of graphs with a few hundred
/// vertices are well conditioned, so the defaults leave wide margins.
struct ToleranceConfig {
  /// Eigenvalues closer than eps_group * max(1, spectral radius) are merged.
  double eps_group = 1e-8;
  /// Entries of unit vectors at or below this magnitude count as zero.
  double eps_zero = 1e-9;
  /// Floor for the relative singular-value cutoff used by numeric_rank.
  double eps_rank = 1e-10;

  void validate() const {
    if (!(eps_group > 0) || !(eps_zero > 0) || !(eps_rank > 0)) {
      throw Error(ErrorCode::InvalidArgument, "tolerances must be strictly positive");
    }
    if (eps_zero > eps_group) {
      throw Error(ErrorCode::InvalidArgument, "eps_zero must not exceed eps_group");
    }
  }

  bool operator==(const ToleranceConfig&) const = default;
};

struct Eigenspace {
  double value = 0.0;
  /// n x multiplicity block with orthonormal columns.
  Eigen::MatrixXd basis;

  std::size_t multiplicity() const { return static_cast<std::size_t>(basis.cols()); }
};

/// Distinct eigenvalues in ascending order, each with an orthonormal basis of
/// its eigenspace.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::vector<Eigenspace> spaces, double scale) : spaces_(std::move(spaces)), scale_(scale) {}

  const std::vector<Eigenspace>& eigenspaces() const noexcept { return spaces_; }
  std::size_t distinct_count() const noexcept { return spaces_.size(); }
  const Eigenspace& operator[](std::size_t i) const { return spaces_.at(i); }

  /// max(1, spectral radius); every absolute threshold is scaled by it.
  double scale() const noexcept { return scale_; }

  std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& e : spaces_) d += e.multiplicity();
    return d;
  }

  std::size_t max_multiplicity() const {
    std::size_t m = 0;
    for (const auto& e : spaces_) m = std::max(m, e.multiplicity());
    return m;
  }

  std::optional<std::size_t> find(double lambda, const ToleranceConfig& tol) const {
    for (std::size_t i = 0; i < spaces_.size(); ++i) {
      if (std::abs(spaces_[i].value - lambda) <= tol.eps_group * scale_) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<Eigenspace> spaces_;
  double scale_ = 1.0;
};

namespace detail {

/// Orthonormal basis of the numerical kernel of m: right singular vectors
/// whose singular value is at or below threshold.
inline Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double threshold) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Eigen::MatrixXd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

/// Gershgorin bound on the spectral radius of an integer Laplacian.
inline double laplacian_scale(const LaplacianMatrix& lap) {
  double r = 1.0;
  for (Eigen::Index i = 0; i < lap.dim(); ++i) r = std::max(r, 2.0 * lap(i, i));
  return r;
}

/// (L - lambda I) restricted to the columns in s.
inline Eigen::MatrixXd shifted_columns(const Eigen::MatrixXd& lap, double lambda, const VertexSet& s) {
  const Eigen::Index n = lap.rows();
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(s.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const auto v = static_cast<Eigen::Index>(s[static_cast<std::size_t>(j)]);
    m.col(j) = lap.col(v);
    m(v, j) -= lambda;
  }
  return m;
}

}  // namespace detail

inline Spectrum spectrum(const LaplacianMatrix& lap, const ToleranceConfig& tol = {}) {
  tol.validate();
  const Eigen::Index n = lap.dim();
  if (n == 0) return Spectrum({}, 1.0);
  const Eigen::MatrixXd a = lap.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd& w = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const double scale = std::max(1.0, std::max(std::abs(w(0)), std::abs(w(n - 1))));
  const double gap = tol.eps_group * scale;

  std::vector<Eigenspace> spaces;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i < n && w(i) - w(i - 1) <= gap) continue;
    Eigenspace e;
    e.value = w.segment(start, i - start).mean();
    if (std::abs(e.value) <= gap) e.value = 0.0;
    e.basis = vecs.middleCols(start, i - start);
    const double residual = (a * e.basis - e.value * e.basis).cwiseAbs().maxCoeff();
    if (residual > gap) {
      throw Error(ErrorCode::ConvergenceFailure,
                  "eigenspace residual " + std::to_string(residual) + " exceeds tolerance");
    }
    spaces.push_back(std::move(e));
    start = i;
  }
  return Spectrum(std::move(spaces), scale);
}

inline Spectrum spectrum(const Graph& g, const ToleranceConfig& tol = {}) { return spectrum(laplacian(g), tol); }

/// Orthonormal basis (|s| x d) of {x : (L - lambda I)[:, s] x = 0}. A vector
/// supported on s is a lambda-eigenvector exactly when its restriction lies in
/// this kernel; an empty block means no such eigenvector exists.
inline Eigen::MatrixXd constrained_kernel(const LaplacianMatrix& lap, double lambda, const VertexSet& s,
                                          const ToleranceConfig& tol = {}) {
  tol.validate();
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "constrained_kernel needs a nonempty vertex set");
  if (!s.empty() && s.indices().back() >= static_cast<Vertex>(lap.dim())) {
    throw Error(ErrorCode::LabelOutOfRange, "vertex set exceeds matrix dimension");
  }
  const double threshold = tol.eps_group * detail::laplacian_scale(lap);
  const Eigen::MatrixXd a = lap.real();
  Eigen::MatrixXd shifted = a - lambda * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> probe(shifted);
  if (probe.singularValues().minCoeff() > threshold) {
    throw Error(ErrorCode::NotAnEigenvalue, std::to_string(lambda) + " is not a Laplacian eigenvalue");
  }
  return detail::kernel_basis(detail::shifted_columns(a, lambda, s), threshold);
}

/// Number of singular values above max(eps_rank, max(rows, cols) * machine
/// epsilon) times the largest singular value.
inline std::size_t numeric_rank(const Eigen::MatrixXd& m, const ToleranceConfig& tol = {}) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  if (top == 0.0) return 0;
  const double rel = std::max(tol.eps_rank, static_cast<double>(std::max(m.rows(), m.cols())) *
                                                std::numeric_limits<double>::epsilon());
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel * top) ++r;
  }
  return r;
}

}  // namespace mpcs

#endif  // MPCS_SPECTRAL_HPP
