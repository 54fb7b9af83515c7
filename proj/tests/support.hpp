#pragma once

// Helpers shared by the test binaries: random graph sources and slow
// reference implementations that avoid the library's own code paths.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mpcs/generators.hpp"
#include "mpcs/graph.hpp"

namespace testing_support {

using mpcs::Edge;
using mpcs::Graph;
using mpcs::Vertex;
using mpcs::VertexSet;

/// Random spanning tree plus `extra` random chords.
inline Graph random_connected(std::size_t n, std::size_t extra, std::uint64_t seed) {
  Graph t = mpcs::gen::random_tree(n, seed);
  std::vector<Edge> edges = t.edges();
  std::set<Edge> have(edges.begin(), edges.end());
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
  for (std::size_t tries = 0; tries < 4 * extra && have.size() < edges.size() + extra; ++tries) {
    Vertex a = pick(rng), b = pick(rng);
    if (a == b) continue;
    have.insert(Edge{std::min(a, b), std::max(a, b)});
  }
  std::vector<Edge> all(have.begin(), have.end());
  return Graph::from_indices(n, all);
}

inline VertexSet random_subset(std::size_t n, std::mt19937_64& rng, bool nonempty = true) {
  std::vector<Vertex> out;
  std::bernoulli_distribution coin(0.5);
  do {
    out.clear();
    for (Vertex v = 0; v < n; ++v) {
      if (coin(rng)) out.push_back(v);
    }
  } while (nonempty && out.empty());
  return VertexSet::from_indices(out);
}

inline Eigen::MatrixXd dense_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (auto [a, b] : g.edges()) {
    l(a, a) += 1;
    l(b, b) += 1;
    l(a, b) -= 1;
    l(b, a) -= 1;
  }
  return l;
}

/// Distinct eigenvalues via the plain solver, grouped at 1e-6.
inline std::vector<double> distinct_eigenvalues(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g), Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(i);
    if (out.empty() || v - out.back() > 1e-6) out.push_back(v);
  }
  return out;
}

/// Kernel of (L - lambda I)[:, s] by full-pivot LU.
inline Eigen::MatrixXd lu_kernel(const Graph& g, double lambda, const std::vector<Vertex>& s) {
  Eigen::MatrixXd l = dense_laplacian(g);
  Eigen::MatrixXd m(l.rows(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = l.col(s[j]);
    m(s[j], static_cast<Eigen::Index>(j)) -= lambda;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-7);
  return lu.kernel();
}

/// Reference PCS test: some eigenvalue's restricted kernel contains a vector
/// with no zero entry (no kernel row identically zero).
inline bool oracle_pcs(const Graph& g, const std::vector<Vertex>& s) {
  for (double lambda : distinct_eigenvalues(g)) {
    Eigen::MatrixXd k = lu_kernel(g, lambda, s);
    if (k.cols() == 0 || (k.cols() == 1 && k.norm() == 0)) continue;
    bool full = true;
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      if (k.row(r).cwiseAbs().maxCoeff() < 1e-7) full = false;
    }
    if (full) return true;
  }
  return false;
}

inline bool oracle_cs(const Graph& g, const std::vector<Vertex>& s) {
  for (double lambda : distinct_eigenvalues(g)) {
    Eigen::MatrixXd k = lu_kernel(g, lambda, s);
    if (k.cols() > 0 && k.norm() > 0) return true;
  }
  return false;
}

/// All MPCS by definition: evaluate every subset, keep the PCS with no PCS
/// strictly inside. Exponential; meant for n <= 12.
inline std::vector<VertexSet> oracle_mpcs(const Graph& g) {
  const std::size_t n = g.order();
  std::vector<std::uint32_t> pcs;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v) {
      if (mask >> v & 1u) s.push_back(v);
    }
    if (oracle_pcs(g, s)) pcs.push_back(mask);
  }
  std::vector<VertexSet> out;
  for (std::uint32_t a : pcs) {
    bool minimal = std::none_of(pcs.begin(), pcs.end(), [&](std::uint32_t b) { return b != a && (a & b) == b; });
    if (!minimal) continue;
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v) {
      if (a >> v & 1u) s.push_back(v);
    }
    out.push_back(VertexSet::from_indices(s));
  }
  std::sort(out.begin(), out.end(), [](const VertexSet& x, const VertexSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

/// Controllability by definition of the follower dynamics: grows the
/// reachable subspace span{B, AB, A^2 B, ...} with Gram-Schmidt and checks
/// that it fills the follower space.
inline bool oracle_controllable(const Graph& g, const VertexSet& leaders) {
  const VertexSet followers = leaders.complement(g.order());
  if (followers.empty()) return true;
  Eigen::MatrixXd l = dense_laplacian(g);
  const auto nf = static_cast<Eigen::Index>(followers.size());
  const auto nl = static_cast<Eigen::Index>(leaders.size());
  Eigen::MatrixXd a(nf, nf), b(nf, nl);
  for (Eigen::Index i = 0; i < nf; ++i) {
    for (Eigen::Index j = 0; j < nf; ++j) a(i, j) = l(followers[i], followers[j]);
    for (Eigen::Index j = 0; j < nl; ++j) b(i, j) = l(followers[i], leaders[j]);
  }
  // Orthogonalised Krylov iteration keeps the basis well scaled.
  Eigen::MatrixXd basis(nf, 0);
  Eigen::MatrixXd block = b;
  for (Eigen::Index p = 0; p < nf && block.cols() > 0; ++p) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      Eigen::VectorXd v = block.col(j);
      for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.transpose() * v);
      if (v.norm() > 1e-8 * std::max(1.0, block.col(j).norm())) {
        basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v.normalized();
      }
    }
    if (basis.cols() == nf) return true;
    block = a * basis;
  }
  return basis.cols() == nf;
}

inline std::vector<VertexSet> to_sets(std::initializer_list<std::initializer_list<mpcs::Label>> lists) {
  std::vector<VertexSet> out;
  for (auto l : lists) out.push_back(VertexSet::from_labels(l));
  return out;
}

}  // namespace testing_support
