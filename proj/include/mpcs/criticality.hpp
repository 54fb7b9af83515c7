#ifndef MPCS_CRITICALITY_HPP
#define MPCS_CRITICALITY_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "mpcs/graph.hpp"
#include "mpcs/spectral.hpp"

namespace mpcs {

enum class CertificateKind { Critical, PerfectCritical };

/// A vertex set together with an eigenvector that vanishes outside it.
struct CriticalCertificate {
  VertexSet set;
  double lambda = 0.0;
  /// Full-length unit eigenvector; entries outside `set` are exactly zero.
  Eigen::VectorXd witness;
  CertificateKind kind = CertificateKind::Critical;

  /// Support of the witness after eps_zero thresholding.
  VertexSet support(double eps_zero) const {
    std::vector<Vertex> out;
    for (Eigen::Index i = 0; i < witness.size(); ++i) {
      if (std::abs(witness(i)) > eps_zero) out.push_back(static_cast<Vertex>(i));
    }
    return VertexSet::from_indices(std::move(out));
  }
};

enum class Provenance { Exhaustive, TwinPair, Theorem7, Propagation, Obstruction };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Exhaustive: return "exhaustive";
    case Provenance::TwinPair: return "twin-pair";
    case Provenance::Theorem7: return "theorem7";
    case Provenance::Propagation: return "propagation";
    case Provenance::Obstruction: return "obstruction";
  }
  return "unknown";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::Exhaustive, Provenance::TwinPair, Provenance::Theorem7, Provenance::Propagation,
                 Provenance::Obstruction}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

struct MpcsEntry {
  CriticalCertificate certificate;
  Provenance provenance = Provenance::Exhaustive;

  const VertexSet& set() const { return certificate.set; }
};

/// Minimal perfect critical sets found for one graph. `complete` is set only
/// when the search proves no other MPCS exists.
struct MpcsFamily {
  std::vector<MpcsEntry> members;
  bool complete = false;
  std::size_t search_cap = 0;

  std::vector<VertexSet> sets() const {
    std::vector<VertexSet> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.set());
    return out;
  }

  bool contains(const VertexSet& s) const {
    return std::any_of(members.begin(), members.end(), [&](const MpcsEntry& m) { return m.set() == s; });
  }

  /// Adds an entry unless the same set is already present; returns whether it was added.
  bool add(MpcsEntry entry) {
    if (contains(entry.set())) return false;
    members.push_back(std::move(entry));
    return true;
  }

  void sort() {
    std::stable_sort(members.begin(), members.end(), [](const MpcsEntry& a, const MpcsEntry& b) {
      if (a.set().size() != b.set().size()) return a.set().size() < b.set().size();
      return a.set() < b.set();
    });
  }

  bool is_antichain() const {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < members.size(); ++j) {
        if (i != j && members[i].set().is_subset_of(members[j].set())) return false;
      }
    }
    return true;
  }
};

struct ControlVerdict {
  bool controllable = true;
  /// When uncontrollable: a critical set inside the followers, with an
  /// eigenvector that vanishes on every leader.
  std::optional<CriticalCertificate> obstruction;
};

constexpr std::uint64_t kDefaultWitnessSeed = 0x5EED;

/// A connected graph bundled with its Laplacian spectrum. All CS/PCS queries
/// and controllability tests run against the cached eigenspaces.
class SpectralGraph {
 public:
  explicit SpectralGraph(Graph g, ToleranceConfig tol = {}, std::uint64_t seed = kDefaultWitnessSeed)
      : graph_(std::move(g)), tol_(tol), seed_(seed) {
    tol_.validate();
    require_connected(graph_);
    lap_ = laplacian(graph_);
    real_ = lap_.real();
    spectrum_ = mpcs::spectrum(lap_, tol_);
  }

  const Graph& graph() const noexcept { return graph_; }
  const LaplacianMatrix& laplacian_matrix() const noexcept { return lap_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  const ToleranceConfig& tolerances() const noexcept { return tol_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t order() const noexcept { return graph_.order(); }

  double kernel_threshold() const { return tol_.eps_group * spectrum_.scale(); }

  /// Constrained kernel for the i-th distinct eigenvalue.
  Eigen::MatrixXd kernel(std::size_t eig, const VertexSet& s) const {
    return detail::kernel_basis(detail::shifted_columns(real_, spectrum_[eig].value, s), kernel_threshold());
  }

  /// Embeds a restricted vector back into R^n, normalises it and zeroes
  /// entries at or below eps_zero.
  Eigen::VectorXd embed(const VertexSet& s, const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(order()));
    for (std::size_t i = 0; i < s.size(); ++i) y(s[i]) = x(static_cast<Eigen::Index>(i));
    y /= y.norm();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (std::abs(y(i)) <= tol_.eps_zero) y(i) = 0.0;
    }
    return y;
  }

  double residual(const Eigen::VectorXd& y, double lambda) const {
    return (real_ * y - lambda * y).cwiseAbs().maxCoeff();
  }

  /// Checks the certificate invariants: eigen-equation residual, zero entries
  /// outside the set and, for perfect-critical certificates, full support on it.
  bool validate(const CriticalCertificate& c) const {
    if (c.witness.size() != static_cast<Eigen::Index>(order()) || c.witness.norm() == 0.0) return false;
    const double scale = c.witness.cwiseAbs().maxCoeff();
    if (residual(c.witness, c.lambda) > kernel_threshold() * std::max(1.0, scale)) return false;
    for (Vertex v = 0; v < order(); ++v) {
      const double x = std::abs(c.witness(v));
      if (!c.set.contains(v) && x != 0.0) return false;
      if (c.kind == CertificateKind::PerfectCritical && c.set.contains(v) && x <= tol_.eps_zero) return false;
    }
    return true;
  }

  std::optional<CriticalCertificate> find_critical(const VertexSet& s) const {
    check_set(s);
    for (std::size_t e = 0; e < spectrum_.distinct_count(); ++e) {
      Eigen::MatrixXd k = kernel(e, s);
      if (k.cols() == 0) continue;
      CriticalCertificate c{s, spectrum_[e].value, embed(s, k.col(0)), CertificateKind::Critical};
      if (!validate(c)) continue;
      return c;
    }
    return std::nullopt;
  }

  std::optional<CriticalCertificate> find_perfect_critical(const VertexSet& s) const {
    check_set(s);
    for (std::size_t e = 0; e < spectrum_.distinct_count(); ++e) {
      Eigen::MatrixXd k = kernel(e, s);
      if (k.cols() == 0) continue;
      // A row that vanishes across the whole kernel forces that coordinate to
      // zero in every admissible eigenvector.
      bool full = true;
      for (Eigen::Index r = 0; r < k.rows(); ++r) {
        if (k.row(r).norm() <= tol_.eps_zero) {
          full = false;
          break;
        }
      }
      if (!full) continue;
      return sample_full_support(s, spectrum_[e].value, k);
    }
    return std::nullopt;
  }

  /// S is an MPCS iff it is a PCS and no S minus one vertex is critical
  /// (a proper critical subset always contains a perfect critical one).
  std::optional<CriticalCertificate> verify_mpcs(const VertexSet& s) const {
    auto cert = find_perfect_critical(s);
    if (!cert) return std::nullopt;
    if (s.size() <= 1) return cert;
    for (Vertex v : s) {
      if (find_critical(s.minus(VertexSet::from_indices({v})))) return std::nullopt;
    }
    return cert;
  }

  /// Eigenvector test: the leaders control the graph iff no eigenvector
  /// vanishes on all of them. Evaluated on the eigenspace bases, so a
  /// lambda-eigenspace with basis U is blocked iff U restricted to the
  /// leader rows has a nontrivial kernel.
  ControlVerdict controllability(const VertexSet& leaders) const {
    check_set(leaders);
    if (leaders.empty()) throw Error(ErrorCode::InvalidArgument, "leader set must be nonempty");
    const VertexSet followers = leaders.complement(order());
    if (followers.empty()) return {};
    for (std::size_t e = 0; e < spectrum_.distinct_count(); ++e) {
      Eigen::MatrixXd k = leader_kernel(e, leaders);
      if (k.cols() == 0) continue;
      Eigen::VectorXd y = spectrum_[e].basis * k.col(0);
      for (Vertex v : leaders) y(v) = 0.0;
      y /= y.norm();
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::abs(y(i)) <= tol_.eps_zero) y(i) = 0.0;
      }
      return ControlVerdict{false, CriticalCertificate{followers, spectrum_[e].value, y, CertificateKind::Critical}};
    }
    return {};
  }

  /// Sum over eigenvalues of (multiplicity - rank of the basis rows at the
  /// leaders); zero exactly when the leaders control the graph.
  std::size_t rank_deficiency(const VertexSet& leaders) const {
    std::size_t d = 0;
    for (std::size_t e = 0; e < spectrum_.distinct_count(); ++e) {
      d += static_cast<std::size_t>(leader_kernel(e, leaders).cols());
    }
    return d;
  }

 private:
  void check_set(const VertexSet& s) const {
    graph_.check(s);
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "vertex set must be nonempty");
  }

  Eigen::MatrixXd leader_kernel(std::size_t e, const VertexSet& leaders) const {
    const Eigen::MatrixXd& basis = spectrum_[e].basis;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(leaders.size()), basis.cols());
    for (std::size_t i = 0; i < leaders.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = basis.row(leaders[i]);
    return detail::kernel_basis(rows, tol_.eps_group);
  }

  CriticalCertificate sample_full_support(const VertexSet& s, double lambda, const Eigen::MatrixXd& k) const {
    std::mt19937_64 rng(seed_);
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kRetries = 64;
    for (int attempt = 0; attempt < kRetries; ++attempt) {
      Eigen::VectorXd c(k.cols());
      if (k.cols() == 1) {
        c(0) = 1.0;
      } else {
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
      }
      CriticalCertificate cert{s, lambda, embed(s, k * c), CertificateKind::PerfectCritical};
      if (validate(cert)) return cert;
    }
    throw Error(ErrorCode::WitnessSamplingFailed, "no full-support witness for " + s.to_string());
  }

  Graph graph_;
  ToleranceConfig tol_;
  std::uint64_t seed_;
  LaplacianMatrix lap_;
  Eigen::MatrixXd real_;
  Spectrum spectrum_;
};

inline std::optional<CriticalCertificate> is_critical(const Graph& g, const VertexSet& s,
                                                      const ToleranceConfig& tol = {}) {
  return SpectralGraph(g, tol).find_critical(s);
}

inline std::optional<CriticalCertificate> is_perfect_critical(const Graph& g, const VertexSet& s,
                                                              const ToleranceConfig& tol = {},
                                                              std::uint64_t seed = kDefaultWitnessSeed) {
  return SpectralGraph(g, tol, seed).find_perfect_critical(s);
}

/// Sufficient condition for a critical set: every outside vertex sees either
/// none or all of s.
inline bool uniform_boundary_cs(const Graph& g, const VertexSet& s) {
  g.check(s);
  if (s.size() < 2) throw Error(ErrorCode::InvalidArgument, "uniform_boundary_cs needs |S| >= 2");
  for (Vertex v = 0; v < g.order(); ++v) {
    if (s.contains(v)) continue;
    const std::size_t c = count_neighbors_in(g, v, s);
    if (c != 0 && c != s.size()) return false;
  }
  return true;
}

inline ControlVerdict is_controllable(const SpectralGraph& sg, const VertexSet& leaders) {
  return sg.controllability(leaders);
}

inline ControlVerdict is_controllable(const Graph& g, const VertexSet& leaders, const ToleranceConfig& tol = {}) {
  return SpectralGraph(g, tol).controllability(leaders);
}

/// Kalman rank test on the follower dynamics x' = A x + B u with
/// A = L[F,F] and B = L[F, leaders]. The Krylov blocks use the affinely
/// rescaled A' = (A - cI)/r, which spans the same column space as the plain
/// powers while keeping the columns bounded.
inline bool kalman_controllable(const Graph& g, const VertexSet& leaders, const ToleranceConfig& tol = {}) {
  require_connected(g);
  g.check(leaders);
  if (leaders.empty()) throw Error(ErrorCode::InvalidArgument, "leader set must be nonempty");
  const VertexSet followers = leaders.complement(g.order());
  if (followers.empty()) return true;
  const Eigen::MatrixXd lap = laplacian(g).real();
  const auto nf = static_cast<Eigen::Index>(followers.size());
  const auto nl = static_cast<Eigen::Index>(leaders.size());
  Eigen::MatrixXd a(nf, nf), b(nf, nl);
  for (Eigen::Index i = 0; i < nf; ++i) {
    for (Eigen::Index j = 0; j < nf; ++j) a(i, j) = lap(followers[i], followers[j]);
    for (Eigen::Index j = 0; j < nl; ++j) b(i, j) = lap(followers[i], leaders[j]);
  }
  double lo = 0.0, hi = 0.0;
  for (Eigen::Index i = 0; i < nf; ++i) {
    const double radius = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    lo = std::min(lo, a(i, i) - radius);
    hi = std::max(hi, a(i, i) + radius);
  }
  const double center = 0.5 * (lo + hi);
  const double half = std::max(1.0, 0.5 * (hi - lo));
  const Eigen::MatrixXd scaled = (a - center * Eigen::MatrixXd::Identity(nf, nf)) / half;

  Eigen::MatrixXd c(nf, nf * nl);
  Eigen::MatrixXd block = b;
  for (Eigen::Index p = 0; p < nf; ++p) {
    for (Eigen::Index j = 0; j < nl; ++j) {
      const double norm = block.col(j).norm();
      c.col(p * nl + j) = norm > 0 ? Eigen::VectorXd(block.col(j) / norm) : Eigen::VectorXd(block.col(j));
    }
    block = scaled * block;
  }
  return numeric_rank(c, tol) == static_cast<std::size_t>(nf);
}

inline std::uint64_t to_mask(const VertexSet& s) {
  std::uint64_t m = 0;
  for (Vertex v : s) m |= std::uint64_t{1} << v;
  return m;
}

inline VertexSet from_mask(std::uint64_t m) {
  std::vector<Vertex> out;
  while (m) {
    out.push_back(static_cast<Vertex>(std::countr_zero(m)));
    m &= m - 1;
  }
  return VertexSet::from_indices(std::move(out));
}

struct EnumerationOptions {
  /// Largest subset size scanned; 0 means n.
  std::size_t size_cap = 0;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Skip subsets with an outside vertex seeing exactly 1 or |S|-1 of them
  /// (no perfect critical set admits such a vertex).
  bool lemma1_filter = true;
};

/// Default exhaustive cap: the full scan up to 18 vertices.
constexpr std::size_t kExhaustiveDefaultLimit = 18;
/// Subsets are bit masks, which bounds the exhaustive scan.
constexpr std::size_t kMaskBits = 64;

/// Scans subsets by increasing cardinality and records every perfect
/// critical set that contains no previously found one. The family is marked
/// complete only for a full scan (cap == n).
inline MpcsFamily enumerate_mpcs_exhaustive(const SpectralGraph& sg, EnumerationOptions opts = {}) {
  const std::size_t n = sg.order();
  if (n > kMaskBits) throw Error(ErrorCode::CapExceeded, "exhaustive enumeration supports at most 64 vertices");
  const std::size_t cap = opts.size_cap == 0 ? n : opts.size_cap;
  if (cap > n) throw Error(ErrorCode::InvalidArgument, "size cap exceeds vertex count");

  std::vector<std::uint64_t> adj(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex u : sg.graph().neighbors(v)) adj[v] |= std::uint64_t{1} << u;
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

  MpcsFamily family;
  family.search_cap = cap;
  std::vector<std::uint64_t> found;
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());

  auto passes_filter = [&](std::uint64_t mask, std::size_t k) {
    if (!opts.lemma1_filter || k == n) return true;
    std::uint64_t outside = all & ~mask;
    while (outside) {
      const int v = std::countr_zero(outside);
      outside &= outside - 1;
      const auto c = static_cast<std::size_t>(std::popcount(adj[static_cast<std::size_t>(v)] & mask));
      if (c == 1 || c + 1 == k) return false;
    }
    return true;
  };

  for (std::size_t k = std::min<std::size_t>(2, n); k <= cap && k >= 1; ++k) {
    if (k == 1 && n > 1) continue;
    std::vector<std::pair<std::uint64_t, CriticalCertificate>> level;
    std::mutex level_mutex;
    std::atomic<std::size_t> next{0};

    // Task i enumerates the k-subsets whose smallest member is i.
    auto worker = [&]() {
      std::vector<std::pair<std::uint64_t, CriticalCertificate>> local;
      for (std::size_t i = next++; i + k <= n; i = next++) {
        const std::size_t rest = n - i - 1;
        const std::size_t pick = k - 1;
        const std::uint64_t low = std::uint64_t{1} << i;
        std::uint64_t comb = pick == 0 ? 0 : (std::uint64_t{1} << pick) - 1;
        const std::uint64_t limit = rest == 64 ? 0 : std::uint64_t{1} << rest;
        while (true) {
          const std::uint64_t mask = low | (comb << (i + 1));
          bool pruned = false;
          for (std::uint64_t f : found) {
            if ((mask & f) == f) {
              pruned = true;
              break;
            }
          }
          if (!pruned && passes_filter(mask, k)) {
            const VertexSet s = from_mask(mask);
            if (auto cert = sg.find_perfect_critical(s)) local.emplace_back(mask, std::move(*cert));
          }
          if (pick == 0) break;
          // Gosper's hack: next combination with the same popcount.
          const std::uint64_t c = comb & (~comb + 1);
          const std::uint64_t r = comb + c;
          comb = (((r ^ comb) >> 2) / c) | r;
          if (comb >= limit || comb == 0) break;
        }
      }
      std::lock_guard lock(level_mutex);
      for (auto& item : local) level.push_back(std::move(item));
    };

    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    std::sort(level.begin(), level.end(),
              [](const auto& a, const auto& b) { return a.second.set < b.second.set; });
    for (auto& [mask, cert] : level) {
      found.push_back(mask);
      family.members.push_back(MpcsEntry{std::move(cert), Provenance::Exhaustive});
    }
  }
  family.complete = cap == n;
  return family;
}

inline MpcsFamily enumerate_mpcs_exhaustive(const Graph& g, std::size_t size_cap, const ToleranceConfig& tol = {}) {
  EnumerationOptions opts;
  opts.size_cap = size_cap;
  return enumerate_mpcs_exhaustive(SpectralGraph(g, tol), opts);
}

/// Shrinks a critical set to an MPCS inside it by repeatedly deleting a
/// vertex while some eigenvector still vanishes outside the remainder.
inline std::optional<CriticalCertificate> extract_mpcs(const SpectralGraph& sg, const VertexSet& critical) {
  auto current = sg.find_critical(critical);
  if (!current) return std::nullopt;
  VertexSet s = current->support(sg.tolerances().eps_zero);
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (Vertex v : s) {
      auto smaller = sg.find_critical(s.minus(VertexSet::from_indices({v})));
      if (smaller) {
        s = smaller->support(sg.tolerances().eps_zero);
        shrunk = true;
        break;
      }
    }
  }
  return sg.find_perfect_critical(s);
}

}  // namespace mpcs

#endif  // MPCS_CRITICALITY_HPP
