#ifndef MPCS_TREE_RULES_HPP
#define MPCS_TREE_RULES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpcs/criticality.hpp"
#include "mpcs/graph.hpp"
#include "mpcs/spectral.hpp"

namespace mpcs {

/// G with the outside vertices that see all of S (full) or none of S (none)
/// deleted. A lambda-eigenvector of L(G) supported on S restricts to a
/// (lambda - eigenvalue_shift)-eigenvector of L(G~), and the converse holds
/// when the restriction sums to zero or nothing was removed as full.
struct SimplifiedGraph {
  Graph base;
  /// base vertex i is retained[i] in the original graph.
  std::vector<Vertex> retained;
  VertexSet removed_full;
  VertexSet removed_none;
  /// Number of full removals; every S vertex loses exactly that much degree.
  std::size_t eigenvalue_shift = 0;
  /// S in base numbering.
  VertexSet s_local;

  VertexSet to_parent(const VertexSet& local) const {
    std::vector<Vertex> out;
    for (Vertex v : local) out.push_back(retained.at(v));
    return VertexSet::from_indices(std::move(out));
  }

  std::optional<Vertex> to_local(Vertex v) const {
    auto it = std::lower_bound(retained.begin(), retained.end(), v);
    if (it == retained.end() || *it != v) return std::nullopt;
    return static_cast<Vertex>(it - retained.begin());
  }
};

inline SimplifiedGraph simplify(const Graph& g, const VertexSet& s) {
  g.check(s);
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "simplify needs a nonempty set");
  std::vector<Vertex> full, none, keep;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (s.contains(v)) {
      keep.push_back(v);
      continue;
    }
    const std::size_t c = count_neighbors_in(g, v, s);
    if (c == s.size()) {
      full.push_back(v);
    } else if (c == 0) {
      none.push_back(v);
    } else {
      keep.push_back(v);
    }
  }
  auto sub = induced_subgraph(g, VertexSet::from_indices(keep));
  SimplifiedGraph out;
  out.base = std::move(sub.graph);
  out.retained = std::move(sub.parent_vertex);
  out.eigenvalue_shift = full.size();
  out.removed_full = VertexSet::from_indices(std::move(full));
  out.removed_none = VertexSet::from_indices(std::move(none));
  std::vector<Vertex> local;
  for (Vertex v : s) local.push_back(*out.to_local(v));
  out.s_local = VertexSet::from_indices(std::move(local));
  return out;
}

/// Critical-set test carried out on G~: looks for an eigenvector of L(G~)
/// supported on S (summing to zero when full removals happened) and reports
/// the matching eigenvalue of L(G). G~ may be disconnected.
inline std::optional<double> critical_in_simplified(const SimplifiedGraph& sg, const ToleranceConfig& tol = {}) {
  const auto lap = laplacian(sg.base);
  const Spectrum spec = spectrum(lap, tol);
  const Eigen::MatrixXd a = lap.real();
  const double threshold = tol.eps_group * spec.scale();
  for (const auto& e : spec.eigenspaces()) {
    Eigen::MatrixXd m = detail::shifted_columns(a, e.value, sg.s_local);
    if (sg.eigenvalue_shift > 0) {
      m.conservativeResize(m.rows() + 1, Eigen::NoChange);
      m.row(m.rows() - 1).setOnes();
    }
    if (detail::kernel_basis(m, threshold).cols() > 0) return e.value + static_cast<double>(sg.eigenvalue_shift);
  }
  return std::nullopt;
}

/// Pairs whose remaining neighbourhoods coincide. Each is an MPCS with the
/// difference vector e_u - e_v as witness.
inline MpcsFamily twin_pair_mpcs(const Graph& g) {
  require_connected(g);
  MpcsFamily fam;
  const auto n = static_cast<Eigen::Index>(g.order());
  for (Vertex u = 0; u < g.order(); ++u) {
    for (Vertex v = u + 1; v < g.order(); ++v) {
      const bool adj = g.adjacent(u, v);
      if (g.degree(u) != g.degree(v)) continue;
      std::vector<Vertex> nu, nv;
      for (Vertex w : g.neighbors(u)) {
        if (w != v) nu.push_back(w);
      }
      for (Vertex w : g.neighbors(v)) {
        if (w != u) nv.push_back(w);
      }
      if (nu != nv) continue;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      y(u) = 1.0 / std::sqrt(2.0);
      y(v) = -1.0 / std::sqrt(2.0);
      const double lambda = static_cast<double>(g.degree(u) + (adj ? 1 : 0));
      fam.members.push_back(MpcsEntry{
          CriticalCertificate{VertexSet::from_indices({u, v}), lambda, y, CertificateKind::PerfectCritical},
          Provenance::TwinPair});
    }
  }
  return fam;
}

enum class Verdict { InS, InSbar, Undetermined, Mpcs, Conflict };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::InS: return "in-S";
    case Verdict::InSbar: return "in-Sbar";
    case Verdict::Undetermined: return "undetermined";
    case Verdict::Mpcs: return "mpcs";
    case Verdict::Conflict: return "conflict";
  }
  return "unknown";
}

/// One row of a classification run. Vertex rows carry a verdict for a single
/// vertex; mpcs rows list a verified set in refs; conflict rows close a seed
/// that produced nothing.
struct TraceStep {
  Vertex seed = 0;
  std::optional<Vertex> vertex;
  Verdict verdict = Verdict::Undetermined;
  std::string rule;
  std::vector<Vertex> refs;

  bool operator==(const TraceStep&) const = default;
};

struct ClassificationTrace {
  std::vector<TraceStep> steps;

  void write_csv(std::ostream& out) const {
    out << "seed,vertex,rule,verdict,refs\n";
    for (const auto& s : steps) {
      out << to_label(s.seed) << ',';
      if (s.vertex) out << to_label(*s.vertex);
      out << ',' << s.rule << ',' << to_string(s.verdict) << ',';
      for (std::size_t i = 0; i < s.refs.size(); ++i) out << (i ? " " : "") << to_label(s.refs[i]);
      out << '\n';
    }
  }
};

struct PropagationOptions {
  /// Branch nodes explored per seed once deduction and probing stall.
  std::size_t branch_limit = 512;
};

struct PropagationResult {
  ClassificationTrace trace;
  /// Verified MPCS in discovery order (twin pairs first).
  MpcsFamily family;
  /// Candidates that reached a full assignment but failed numerical verification.
  std::vector<VertexSet> rejected;
};

namespace detail {

enum class Mark : unsigned char { Unknown, In, Out };

struct Step {
  Vertex vertex;
  Mark mark;
  std::string rule;
  std::vector<Vertex> refs;
};

struct Conflict {
  std::string rule;
  std::vector<Vertex> refs;
};

// Deduction rules for the lambda = 1 hypothesis on a tree. Each rule sweep
// applies its deductions in label order; any deduction restarts the cycle
// at the first rule.
class Propagator {
 public:
  explicit Propagator(const SpectralGraph& sg)
      : g_(sg.graph()), lap_(sg.laplacian_matrix().real()), threshold_(sg.kernel_threshold()),
        eps_zero_(sg.tolerances().eps_zero) {
    const std::size_t n = g_.order();
    pendant_.assign(n, false);
    for (Vertex v = 0; v < n; ++v) pendant_[v] = g_.degree(v) == 1;
    siblings_.resize(n);
    for (Vertex p = 0; p < n; ++p) {
      if (!pendant_[p]) continue;
      for (Vertex q = 0; q < n; ++q) {
        if (q != p && pendant_[q] && g_.neighbors(q)[0] == g_.neighbors(p)[0] && !g_.adjacent(p, q)) {
          siblings_[p].push_back(q);
        }
      }
    }
  }

  const Graph& graph() const { return g_; }
  bool pendant(Vertex v) const { return pendant_[v]; }
  const std::vector<Vertex>& siblings(Vertex v) const { return siblings_[v]; }

  /// Runs the rules to a fixpoint, probing unknowns when they stall. Probes
  /// and runs without probing skip the costly eigen-equation rule.
  std::optional<Conflict> run(std::vector<Mark>& st, std::vector<Step>* log, bool probe) const {
    while (true) {
      bool changed = false;
      if (auto c = apply_rules(st, log, changed, probe)) return c;
      if (changed) continue;
      if (!probe) return std::nullopt;
      bool probed = false;
      for (Vertex x = 0; x < g_.order() && !probed; ++x) {
        if (st[x] != Mark::Unknown) continue;
        for (Mark tryit : {Mark::Out, Mark::In}) {
          auto copy = st;
          copy[x] = tryit;
          if (auto c = run(copy, nullptr, false)) {
            const Mark forced = tryit == Mark::Out ? Mark::In : Mark::Out;
            set(st, x, forced, "probe:" + c->rule, c->refs, log);
            probed = true;
            break;
          }
        }
      }
      if (!probed) return std::nullopt;
    }
  }

  void set(std::vector<Mark>& st, Vertex v, Mark m, std::string rule, std::vector<Vertex> refs,
           std::vector<Step>* log) const {
    st[v] = m;
    if (log) {
      std::sort(refs.begin(), refs.end());
      refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
      log->push_back(Step{v, m, std::move(rule), std::move(refs)});
    }
  }

  /// Verdict-independent checks on a complete assignment.
  std::optional<Conflict> final_check(const std::vector<Mark>& st) const {
    std::vector<Vertex> in;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (st[v] == Mark::In) in.push_back(v);
    }
    if (in.size() < 2) return Conflict{"size", in};
    std::size_t pendants = 0;
    bool isolated = true;
    for (Vertex v : in) {
      pendants += pendant_[v] ? 1 : 0;
      for (Vertex u : g_.neighbors(v)) {
        if (st[u] == Mark::In) isolated = false;
      }
    }
    if (pendants < 2) return Conflict{"pendant-count", in};
    if (isolated && in.size() >= 3) return Conflict{"isolated-set", in};
    return std::nullopt;
  }

 private:
  std::optional<Vertex> anchor(const std::vector<Mark>& st) const {
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (st[v] == Mark::In && pendant_[v] && st[g_.neighbors(v)[0]] == Mark::Out) return v;
    }
    return std::nullopt;
  }

  std::pair<std::size_t, std::size_t> counts(const std::vector<Mark>& st, Vertex v) const {
    std::size_t in = 0, unknown = 0;
    for (Vertex u : g_.neighbors(v)) {
      in += st[u] == Mark::In;
      unknown += st[u] == Mark::Unknown;
    }
    return {in, unknown};
  }

  std::optional<Conflict> apply_rules(std::vector<Mark>& st, std::vector<Step>* log, bool& changed,
                                      bool spectral) const {
    using Rule = std::optional<Conflict> (Propagator::*)(std::vector<Mark>&, std::vector<Step>*, bool&) const;
    constexpr Rule rules[] = {&Propagator::neighbor_count, &Propagator::pendant_neighbor, &Propagator::degree_two,
                              &Propagator::isolated_set, &Propagator::eigenvalue_degree,
                              &Propagator::eigen_equation};
    for (Rule r : rules) {
      if (!spectral && r == &Propagator::eigen_equation) break;
      bool any = false;
      if (auto c = (this->*r)(st, log, any)) return c;
      if (any) {
        changed = true;
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  // An outside vertex never has exactly one neighbour in S.
  std::optional<Conflict> neighbor_count(std::vector<Mark>& st, std::vector<Step>* log, bool& any) const {
    for (Vertex w = 0; w < g_.order(); ++w) {
      auto [in, unknown] = counts(st, w);
      if (st[w] == Mark::Out) {
        if (in == 1 && unknown == 0) return Conflict{"neighbor-count", {w}};
        if (in == 0 && unknown == 1) {
          for (Vertex u : g_.neighbors(w)) {
            if (st[u] == Mark::Unknown) set(st, u, Mark::Out, "neighbor-count", {w}, log);
          }
          any = true;
        }
      } else if (st[w] == Mark::Unknown && unknown == 0 && in == 1) {
        set(st, w, Mark::In, "neighbor-count", g_.neighbors(w), log);
        any = true;
      }
    }
    return std::nullopt;
  }

  // At eigenvalue 1 every pendant's neighbour carries a zero entry.
  std::optional<Conflict> pendant_neighbor(std::vector<Mark>& st, std::vector<Step>* log, bool& any) const {
    auto a = anchor(st);
    if (!a) return std::nullopt;
    const Vertex hub = g_.neighbors(*a)[0];
    for (Vertex x = 0; x < g_.order(); ++x) {
      bool next_to_pendant = false;
      for (Vertex u : g_.neighbors(x)) next_to_pendant = next_to_pendant || pendant_[u];
      if (!next_to_pendant) continue;
      if (st[x] == Mark::In) return Conflict{"pendant-neighbor", {x, *a}};
      if (st[x] == Mark::Unknown) {
        set(st, x, Mark::Out, "pendant-neighbor", {hub, *a}, log);
        any = true;
      }
    }
    return std::nullopt;
  }

  // A retained outside vertex has exactly two neighbours, both in S.
  std::optional<Conflict> degree_two(std::vector<Mark>& st, std::vector<Step>* log, bool& any) const {
    for (Vertex w = 0; w < g_.order(); ++w) {
      if (st[w] != Mark::Out) continue;
      auto [in, unknown] = counts(st, w);
      if (in == 0) continue;
      if (in > 2) return Conflict{"degree-2", {w}};
      if (in == 1 && unknown == 1) {
        for (Vertex u : g_.neighbors(w)) {
          if (st[u] == Mark::Unknown) set(st, u, Mark::In, "degree-2", {w}, log);
        }
        any = true;
      } else if (in == 2 && unknown > 0) {
        for (Vertex u : g_.neighbors(w)) {
          if (st[u] == Mark::Unknown) set(st, u, Mark::Out, "degree-2", {w}, log);
        }
        any = true;
      }
    }
    return std::nullopt;
  }

  // Three or more mutually non-adjacent S vertices never form an MPCS.
  std::optional<Conflict> isolated_set(std::vector<Mark>& st, std::vector<Step>*, bool&) const {
    std::vector<Vertex> in;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (st[v] == Mark::Unknown) return std::nullopt;
      if (st[v] == Mark::In) in.push_back(v);
    }
    if (in.size() < 3) return std::nullopt;
    for (Vertex v : in) {
      if (counts(st, v).first > 0) return std::nullopt;
    }
    return Conflict{"isolated-set", in};
  }

  // An S vertex with no S neighbour satisfies d(v) = lambda = 1.
  std::optional<Conflict> eigenvalue_degree(std::vector<Mark>& st, std::vector<Step>* log, bool& any) const {
    auto a = anchor(st);
    if (!a) return std::nullopt;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (st[v] != Mark::In || g_.degree(v) == 1) continue;
      auto [in, unknown] = counts(st, v);
      if (in > 0) continue;
      if (unknown == 0) return Conflict{"eigenvalue-degree", {v}};
      if (unknown == 1) {
        for (Vertex u : g_.neighbors(v)) {
          if (st[u] == Mark::Unknown) set(st, u, Mark::In, "eigenvalue-degree", {v, *a}, log);
        }
        any = true;
      }
    }
    return std::nullopt;
  }

  // Coordinates that vanish across every admissible eigenvector leave S.
  std::optional<Conflict> eigen_equation(std::vector<Mark>& st, std::vector<Step>* log, bool& any) const {
    std::vector<Vertex> cols;
    for (Vertex v = 0; v < g_.order(); ++v) {
      if (st[v] != Mark::Out) cols.push_back(v);
    }
    if (cols.empty()) return Conflict{"eigen-equation", {}};
    const VertexSet c = VertexSet::from_indices(cols);
    Eigen::MatrixXd k = kernel_basis(shifted_columns(lap_, 1.0, c), threshold_);
    if (k.cols() == 0) return Conflict{"eigen-equation", {}};
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (k.row(static_cast<Eigen::Index>(i)).norm() > eps_zero_) continue;
      const Vertex v = c[i];
      if (st[v] == Mark::In) return Conflict{"eigen-equation", {v}};
      set(st, v, Mark::Out, "eigen-equation", {}, log);
      any = true;
    }
    return std::nullopt;
  }

  const Graph& g_;
  Eigen::MatrixXd lap_;
  double threshold_;
  double eps_zero_;
  std::vector<bool> pendant_;
  std::vector<std::vector<Vertex>> siblings_;
};

}  // namespace detail

/// Table-style classification of a tree: every twin pair first, then one
/// run per pendant seed p (p in S; p's twin siblings, or else p's neighbour,
/// outside S) under the eigenvalue-1 hypothesis. Fully classified runs are
/// verified numerically before being reported.
inline PropagationResult propagate_classification(const SpectralGraph& sg, const PropagationOptions& opts = {}) {
  const Graph& g = sg.graph();
  require_tree(g);
  PropagationResult out;
  for (auto& m : twin_pair_mpcs(g).members) {
    out.trace.steps.push_back(
        TraceStep{m.set()[0], std::nullopt, Verdict::Mpcs, "twin-pair", m.set().indices()});
    out.family.add(std::move(m));
  }

  detail::Propagator prop(sg);
  // Spectral verdicts on complete assignments, shared across seeds.
  std::map<std::vector<detail::Mark>, bool> leaf_ok;
  using detail::Mark;
  for (Vertex p = 0; p < g.order(); ++p) {
    if (!prop.pendant(p) || g.order() < 3) continue;
    std::vector<Mark> st(g.order(), Mark::Unknown);
    std::vector<detail::Step> log;
    prop.set(st, p, Mark::In, "initial", {}, &log);
    if (prop.siblings(p).empty()) {
      prop.set(st, g.neighbors(p)[0], Mark::Out, "initial", {}, &log);
    } else {
      for (Vertex q : prop.siblings(p)) prop.set(st, q, Mark::Out, "initial", {}, &log);
    }
    auto conflict = prop.run(st, &log, true);
    for (auto& s : log) {
      out.trace.steps.push_back(TraceStep{p, s.vertex, s.mark == Mark::In ? Verdict::InS : Verdict::InSbar,
                                          s.rule, s.refs});
    }
    if (conflict) {
      out.trace.steps.push_back(TraceStep{p, std::nullopt, Verdict::Conflict, conflict->rule, conflict->refs});
      continue;
    }

    // Depth-first search over what deduction left open. Two twin siblings
    // never share a larger MPCS, so choosing one excludes the others.
    std::vector<VertexSet> found;
    std::size_t nodes = 0;
    std::function<void(std::vector<Mark>&)> explore = [&](std::vector<Mark>& cur) {
      if (++nodes > opts.branch_limit) return;
      auto x = std::find(cur.begin(), cur.end(), Mark::Unknown);
      if (x == cur.end()) {
        if (prop.final_check(cur)) return;
        auto [it, fresh] = leaf_ok.try_emplace(cur, false);
        if (fresh) it->second = !prop.run(cur, nullptr, true);
        if (!it->second) return;
        std::vector<Vertex> in;
        for (Vertex v = 0; v < g.order(); ++v) {
          if (cur[v] == Mark::In) in.push_back(v);
        }
        found.push_back(VertexSet::from_indices(std::move(in)));
        return;
      }
      // Branch where the most neighbours are already decided.
      auto xv = static_cast<Vertex>(x - cur.begin());
      std::size_t best = 0;
      for (Vertex v = xv; v < g.order(); ++v) {
        if (cur[v] != Mark::Unknown) continue;
        std::size_t decided = 0;
        for (Vertex u : g.neighbors(v)) decided += cur[u] != Mark::Unknown;
        if (decided > best) {
          best = decided;
          xv = v;
        }
      }
      for (Mark choice : {Mark::In, Mark::Out}) {
        auto next = cur;
        next[xv] = choice;
        if (choice == Mark::In) {
          for (Vertex q : prop.siblings(xv)) {
            if (next[q] == Mark::Unknown) next[q] = Mark::Out;
          }
        }
        if (prop.run(next, nullptr, false)) continue;
        explore(next);
      }
    };
    explore(st);

    for (const auto& cand : found) {
      if (out.family.contains(cand)) {
        out.trace.steps.push_back(TraceStep{p, std::nullopt, Verdict::Mpcs, "verified", cand.indices()});
        continue;
      }
      if (auto cert = sg.verify_mpcs(cand)) {
        out.trace.steps.push_back(TraceStep{p, std::nullopt, Verdict::Mpcs, "verified", cand.indices()});
        out.family.add(MpcsEntry{std::move(*cert), Provenance::Propagation});
      } else {
        out.rejected.push_back(cand);
        out.trace.steps.push_back(TraceStep{p, std::nullopt, Verdict::Conflict, "verification", cand.indices()});
      }
    }
    if (found.empty()) {
      out.trace.steps.push_back(TraceStep{p, std::nullopt, Verdict::Conflict, "exhausted", {}});
    }
  }
  return out;
}

inline PropagationResult propagate_classification(const Graph& g, const PropagationOptions& opts = {}) {
  require_tree(g);
  return propagate_classification(SpectralGraph(g), opts);
}

/// Bipartite graph between the components of G~[S] (u nodes) and the retained
/// outside vertices (w nodes); path_length holds each u node's distance from
/// the root u node.
struct QuotientGraph {
  std::vector<VertexSet> u_nodes;
  std::vector<Vertex> w_nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t root = 0;
  std::vector<std::size_t> path_length;
};

namespace detail {

struct Theorem7Setup {
  SimplifiedGraph simplified;
  Vertex v0 = 0;
};

inline Theorem7Setup theorem7_setup(const Graph& g, const VertexSet& s) {
  require_tree(g);
  g.check(s);
  if (s.size() < 2) throw Error(ErrorCode::PreconditionUnmet, "need at least two vertices");
  SimplifiedGraph sg = simplify(g, s);
  if (!is_connected(sg.base)) throw Error(ErrorCode::PreconditionUnmet, "simplified graph is disconnected");
  std::optional<Vertex> v0;
  for (Vertex v : sg.s_local) {
    std::size_t inside = 0, outside = 0;
    for (Vertex u : sg.base.neighbors(v)) (sg.s_local.contains(u) ? inside : outside)++;
    if (outside > 1) {
      throw Error(ErrorCode::PreconditionUnmet,
                  "vertex " + std::to_string(to_label(sg.retained[v])) + " has several outside neighbours");
    }
    if (inside == 0 && !v0) v0 = v;
  }
  if (!v0) throw Error(ErrorCode::PreconditionUnmet, "no isolated vertex of S in the simplified graph");
  return {std::move(sg), *v0};
}

}  // namespace detail

/// Decides MPCS membership for sets whose simplified graph is connected,
/// has an isolated S vertex and gives every S vertex at most one outside
/// neighbour. Throws PreconditionUnmet otherwise.
inline bool theorem7_check(const Graph& g, const VertexSet& s) {
  auto setup = detail::theorem7_setup(g, s);
  const auto& sg = setup.simplified;
  for (Vertex v = 0; v < sg.base.order(); ++v) {
    std::size_t outside = 0;
    for (Vertex u : sg.base.neighbors(v)) outside += sg.s_local.contains(u) ? 0 : 1;
    if (sg.s_local.contains(v)) {
      if (outside != 1) return false;
    } else if (outside != 0 || sg.base.degree(v) != 2) {
      return false;
    }
  }
  return true;
}

inline QuotientGraph quotient_graph(const Graph& g, const VertexSet& s) {
  auto setup = detail::theorem7_setup(g, s);
  const auto& sg = setup.simplified;
  QuotientGraph h;
  auto sub = induced_subgraph(sg.base, sg.s_local);
  std::vector<std::size_t> comp_of(sg.base.order(), static_cast<std::size_t>(-1));
  for (const auto& c : components(sub.graph)) {
    VertexSet local = sub.to_parent(c);
    for (Vertex v : local) comp_of[v] = h.u_nodes.size();
    if (local.contains(setup.v0)) h.root = h.u_nodes.size();
    h.u_nodes.push_back(sg.to_parent(local));
  }
  std::vector<std::size_t> w_of(sg.base.order(), static_cast<std::size_t>(-1));
  for (Vertex v = 0; v < sg.base.order(); ++v) {
    if (sg.s_local.contains(v)) continue;
    w_of[v] = h.w_nodes.size();
    h.w_nodes.push_back(sg.retained[v]);
  }
  for (Vertex v = 0; v < sg.base.order(); ++v) {
    if (!sg.s_local.contains(v)) continue;
    for (Vertex u : sg.base.neighbors(v)) {
      if (!sg.s_local.contains(u)) h.edges.emplace_back(comp_of[v], w_of[u]);
    }
  }
  std::sort(h.edges.begin(), h.edges.end());
  h.edges.erase(std::unique(h.edges.begin(), h.edges.end()), h.edges.end());

  // Breadth-first distances in H; u nodes sit at even depth.
  const std::size_t nu = h.u_nodes.size();
  const std::size_t total = nu + h.w_nodes.size();
  std::vector<std::vector<std::size_t>> adj(total);
  for (auto [u, w] : h.edges) {
    adj[u].push_back(nu + w);
    adj[nu + w].push_back(u);
  }
  std::vector<std::size_t> dist(total, static_cast<std::size_t>(-1));
  std::queue<std::size_t> q;
  dist[h.root] = 0;
  q.push(h.root);
  while (!q.empty()) {
    auto x = q.front();
    q.pop();
    for (auto y : adj[x]) {
      if (dist[y] == static_cast<std::size_t>(-1)) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
    }
  }
  h.path_length.assign(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(nu));
  return h;
}

/// Eigenvalue-1 witness: constant (-1)^(l_i/2) on the i-th component of
/// G~[S], zero elsewhere, normalised.
inline CriticalCertificate theorem7_witness(const Graph& g, const VertexSet& s) {
  if (!theorem7_check(g, s)) throw Error(ErrorCode::PreconditionUnmet, s.to_string() + " is not an MPCS");
  QuotientGraph h = quotient_graph(g, s);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.order()));
  for (std::size_t i = 0; i < h.u_nodes.size(); ++i) {
    const double sign = (h.path_length[i] / 2) % 2 == 0 ? 1.0 : -1.0;
    for (Vertex v : h.u_nodes[i]) y(v) = sign;
  }
  y.normalize();
  return CriticalCertificate{s, 1.0, y, CertificateKind::PerfectCritical};
}

struct PendantLeaders {
  std::size_t bound = 0;
  VertexSet leaders;
};

/// All pendants but the one with the largest label.
inline PendantLeaders pendant_leader_bound(const Graph& g) {
  require_tree(g);
  if (g.order() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two vertices");
  auto p = pendant_set(g).indices();
  p.pop_back();
  return {p.size(), VertexSet::from_indices(std::move(p))};
}

/// Whether L + diag(c) (c entries in {-1, 0}) has a kernel vector without
/// zero entries. For a tree Laplacian this holds exactly when c is zero.
inline bool lemma2_kernel_fullsupport(const LaplacianMatrix& lap, const std::vector<int>& c,
                                      const ToleranceConfig& tol = {}) {
  const Eigen::Index n = lap.dim();
  if (static_cast<Eigen::Index>(c.size()) != n) throw Error(ErrorCode::InvalidArgument, "length mismatch");
  for (int x : c) {
    if (x != 0 && x != -1) throw Error(ErrorCode::InvalidArgument, "entries must be 0 or -1");
  }
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < n; ++i) {
    int off = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const int x = lap(i, j);
      if (x != lap(j, i)) throw Error(ErrorCode::NotATreeLaplacian, "matrix is not symmetric");
      if (i == j) continue;
      if (x != 0 && x != -1) throw Error(ErrorCode::NotATreeLaplacian, "off-diagonal entries must be 0 or -1");
      off -= x;
      if (x == -1 && i < j) edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
    if (lap(i, i) != off) throw Error(ErrorCode::NotATreeLaplacian, "diagonal must equal the degree");
  }
  if (n == 0 || !is_tree(Graph::from_indices(static_cast<std::size_t>(n), edges))) {
    throw Error(ErrorCode::NotATreeLaplacian, "matrix is not the Laplacian of a tree");
  }
  Eigen::MatrixXd b = lap.real();
  for (Eigen::Index i = 0; i < n; ++i) b(i, i) += c[static_cast<std::size_t>(i)];
  const double scale = std::max(1.0, 2.0 * lap.matrix().diagonal().maxCoeff());
  Eigen::MatrixXd k = detail::kernel_basis(b, tol.eps_group * scale);
  if (k.cols() == 0) return false;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (k.row(r).norm() <= tol.eps_zero) return false;
  }
  return true;
}

}  // namespace mpcs

#endif  // MPCS_TREE_RULES_HPP
