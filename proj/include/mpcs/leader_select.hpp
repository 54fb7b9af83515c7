#ifndef MPCS_LEADER_SELECT_HPP
#define MPCS_LEADER_SELECT_HPP

#include <algorithm>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mpcs/criticality.hpp"
#include "mpcs/graph.hpp"

namespace mpcs {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct HittingSets {
  std::size_t n_l = 0;
  /// Exact number of minimum transversals.
  BigInt count = 0;
  /// Lexicographically sorted; holds every transversal unless truncated.
  std::vector<VertexSet> sets;
  bool truncated = false;
};

namespace detail {

// Minimum transversals of one connected block of sets, enumerated once each
// by branching on the first unhit set: the i-th branch takes its i-th
// element and forbids the earlier ones.
class TransversalSearch {
 public:
  TransversalSearch(std::vector<std::vector<Vertex>> sets, std::size_t n)
      : sets_(std::move(sets)), of_vertex_(n), hits_(sets_.size(), 0), banned_(n, false) {
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      for (Vertex v : sets_[i]) of_vertex_[v].push_back(i);
    }
  }

  std::size_t minimum() {
    for (std::size_t k = packing_bound(); ; ++k) {
      if (count(k, 1) > 0) return k;
    }
  }

  /// Counts transversals of size k; stops early once `stop_at` are found
  /// (0 = never) and keeps the first `keep` of them.
  BigInt count(std::size_t k, std::size_t stop_at = 0, std::size_t keep = 0) {
    found_ = 0;
    stop_at_ = stop_at;
    keep_ = keep;
    kept_.clear();
    chosen_.clear();
    search(k);
    return found_;
  }

  const std::vector<std::vector<Vertex>>& kept() const { return kept_; }

 private:
  std::size_t packing_bound() const {
    std::vector<bool> used(of_vertex_.size(), false);
    std::vector<std::size_t> order(sets_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sets_[a].size() < sets_[b].size(); });
    std::size_t k = 0;
    for (std::size_t i : order) {
      if (std::none_of(sets_[i].begin(), sets_[i].end(), [&](Vertex v) { return used[v]; })) {
        for (Vertex v : sets_[i]) used[v] = true;
        ++k;
      }
    }
    return k;
  }

  // Pairwise-disjoint unhit sets, counting only still-allowed elements.
  std::size_t remaining_bound() const {
    std::vector<bool> used(of_vertex_.size(), false);
    std::size_t k = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (hits_[i]) continue;
      bool clash = false;
      for (Vertex v : sets_[i]) clash = clash || (!banned_[v] && used[v]);
      if (clash) continue;
      for (Vertex v : sets_[i]) {
        if (!banned_[v]) used[v] = true;
      }
      ++k;
    }
    return k;
  }

  bool done() const { return stop_at_ && found_ >= stop_at_; }

  void search(std::size_t budget) {
    if (done()) return;
    std::optional<std::size_t> pick;
    std::size_t best = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (hits_[i]) continue;
      std::size_t avail = 0;
      for (Vertex v : sets_[i]) avail += banned_[v] ? 0 : 1;
      if (avail == 0) return;
      if (!pick || avail < best) {
        pick = i;
        best = avail;
      }
    }
    if (!pick) {
      if (kept_.size() < keep_) {
        auto t = chosen_;
        std::sort(t.begin(), t.end());
        kept_.push_back(std::move(t));
      }
      ++found_;
      return;
    }
    if (budget == 0 || remaining_bound() > budget) return;
    std::vector<Vertex> newly_banned;
    for (Vertex v : sets_[*pick]) {
      if (banned_[v]) continue;
      chosen_.push_back(v);
      for (auto i : of_vertex_[v]) ++hits_[i];
      search(budget - 1);
      for (auto i : of_vertex_[v]) --hits_[i];
      chosen_.pop_back();
      banned_[v] = true;
      newly_banned.push_back(v);
      if (done()) break;
    }
    for (Vertex v : newly_banned) banned_[v] = false;
  }

  std::vector<std::vector<Vertex>> sets_;
  std::vector<std::vector<std::size_t>> of_vertex_;
  std::vector<std::size_t> hits_;
  std::vector<bool> banned_;
  std::vector<Vertex> chosen_;
  BigInt found_ = 0;
  std::size_t stop_at_ = 0;
  std::size_t keep_ = 0;
  std::vector<std::vector<Vertex>> kept_;
};

// Inclusion-minimal members only; a transversal of those hits the rest.
inline std::vector<VertexSet> minimal_members(std::vector<VertexSet> sets) {
  std::sort(sets.begin(), sets.end(), [](const VertexSet& a, const VertexSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<VertexSet> out;
  for (auto& s : sets) {
    if (std::none_of(out.begin(), out.end(), [&](const VertexSet& m) { return m.is_subset_of(s); })) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Groups sets that share vertices; transversals factor over the groups.
inline std::vector<std::vector<VertexSet>> blocks(const std::vector<VertexSet>& sets, std::size_t n) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& s : sets) {
    for (std::size_t i = 1; i < s.size(); ++i) parent[find(s[i])] = find(s[0]);
  }
  std::vector<std::vector<VertexSet>> out;
  std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
  for (const auto& s : sets) {
    const std::size_t root = find(s[0]);
    if (slot[root] == static_cast<std::size_t>(-1)) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[slot[root]].push_back(s);
  }
  return out;
}

}  // namespace detail

constexpr std::size_t kDefaultMinSetCap = 1'000'000;

/// Minimum transversals of a set family over n vertices. An empty family is
/// hit by any single vertex, so it reports n_l = 1 with all n singletons.
inline HittingSets min_hitting_sets(const std::vector<VertexSet>& family, std::size_t n,
                                    std::size_t cap = kDefaultMinSetCap) {
  HittingSets out;
  for (const auto& s : family) {
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "family contains an empty set");
    if (s.indices().back() >= n) throw Error(ErrorCode::LabelOutOfRange, "family exceeds vertex count");
  }
  if (family.empty()) {
    out.n_l = n == 0 ? 0 : 1;
    out.count = n;
    for (Vertex v = 0; v < n && out.sets.size() < cap; ++v) out.sets.push_back(VertexSet::from_indices({v}));
    out.truncated = out.sets.size() < n;
    return out;
  }

  std::vector<std::vector<std::vector<Vertex>>> parts;
  BigInt total = 1;
  for (const auto& block : detail::blocks(detail::minimal_members(family), n)) {
    std::vector<std::vector<Vertex>> raw;
    for (const auto& s : block) raw.push_back(s.indices());
    detail::TransversalSearch search(std::move(raw), n);
    const std::size_t k = search.minimum();
    out.n_l += k;
    total *= search.count(k, 0, cap);
    parts.push_back(search.kept());
  }
  out.count = total;

  // Combine per-block choices odometer style until the cap.
  std::vector<std::size_t> idx(parts.size(), 0);
  bool more = std::none_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); });
  while (more && out.sets.size() < cap) {
    std::vector<Vertex> t;
    for (std::size_t b = 0; b < parts.size(); ++b) {
      t.insert(t.end(), parts[b][idx[b]].begin(), parts[b][idx[b]].end());
    }
    out.sets.push_back(VertexSet::from_indices(std::move(t)));
    more = false;
    for (std::size_t b = parts.size(); b-- > 0;) {
      if (++idx[b] < parts[b].size()) {
        more = true;
        break;
      }
      idx[b] = 0;
    }
  }
  std::sort(out.sets.begin(), out.sets.end());
  out.truncated = BigInt(out.sets.size()) < out.count;
  return out;
}

inline HittingSets min_hitting_sets(const MpcsFamily& family, std::size_t n, std::size_t cap = kDefaultMinSetCap) {
  return min_hitting_sets(family.sets(), n, cap);
}

/// Largest number of pairwise-disjoint members; exact up to 20 members,
/// greedy (smallest first) beyond.
inline std::size_t disjoint_packing(const std::vector<VertexSet>& family) {
  const std::size_t m = family.size();
  if (m == 0) return 0;
  if (m <= 20) {
    std::vector<std::uint32_t> clash(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j && family[i].intersects(family[j])) clash[i] |= 1u << j;
      }
    }
    std::size_t best = 0;
    std::function<void(std::size_t, std::uint32_t, std::size_t)> go = [&](std::size_t i, std::uint32_t taken,
                                                                          std::size_t size) {
      if (size + (m - i) <= best) return;
      if (i == m) {
        best = size;
        return;
      }
      if (!(clash[i] & taken)) go(i + 1, taken | (1u << i), size + 1);
      go(i + 1, taken, size);
    };
    go(0, 0, 0);
    return best;
  }
  std::vector<VertexSet> sorted = family;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const VertexSet& a, const VertexSet& b) { return a.size() < b.size(); });
  std::vector<VertexSet> picked;
  for (const auto& s : sorted) {
    if (std::none_of(picked.begin(), picked.end(), [&](const VertexSet& p) { return p.intersects(s); })) {
      picked.push_back(s);
    }
  }
  return picked.size();
}

struct Scientific {
  /// value = mantissa * 10^exp with a five-digit mantissa.
  BigInt mantissa = 0;
  long exp = 0;

  std::string to_string() const {
    if (mantissa == 0) return "0";
    std::string digits = mantissa.str();
    const long e = exp + static_cast<long>(digits.size()) - 1;
    std::string out = digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    char buf[32];
    std::snprintf(buf, sizeof buf, "e%c%02ld", e < 0 ? '-' : '+', e < 0 ? -e : e);
    return out + buf;
  }

  bool operator==(const Scientific&) const = default;
};

/// Rounds a positive rational to `digits` significant digits (half up).
inline Scientific to_scientific(const Rational& r, int digits = 5) {
  if (r <= 0) return {};
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  long e = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
  auto pow10 = [](long k) {
    BigInt p = 1;
    for (long i = 0; i < k; ++i) p *= 10;
    return p;
  };
  // Settle e so that 10^e <= r < 10^(e+1).
  auto below = [&](long k) {  // r < 10^k
    return k >= 0 ? num < den * pow10(k) : num * pow10(-k) < den;
  };
  while (below(e)) --e;
  while (!below(e + 1)) ++e;
  const long shift = digits - 1 - e;
  BigInt scaled_num = num, scaled_den = den;
  if (shift >= 0) {
    scaled_num *= pow10(shift);
  } else {
    scaled_den *= pow10(-shift);
  }
  BigInt m = (2 * scaled_num + scaled_den) / (2 * scaled_den);
  long exp = -shift;
  if (m == pow10(digits)) {
    m /= 10;
    ++exp;
  }
  return {m, exp};
}

inline BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Metrics {
  Rational n1;
  Rational n2;
};

/// N1 = n_l / n and N2 = n_s / C(n, n_l), exactly.
inline Metrics metrics(std::size_t n, std::size_t n_l, const BigInt& n_s) {
  if (n_l < 1 || n_l > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= n_l <= n");
  if (n_s < 1) throw Error(ErrorCode::InvalidArgument, "need n_s >= 1");
  return {Rational(n_l, n), Rational(n_s, binomial(n, n_l))};
}

struct LeaderReport {
  std::size_t n = 0;
  std::size_t n_l = 0;
  /// Number of minimum leader sets; absent when the minimum lies above the
  /// transversal number of the family and could not be enumerated.
  std::optional<BigInt> n_s;
  /// n_s counts exactly the controllable minimum leader sets.
  bool ns_certified = false;
  std::vector<VertexSet> min_sets;
  bool min_sets_truncated = false;
  std::size_t lower_bound = 0;
  std::size_t upper_bound = 0;
  bool certified = false;
  /// Controllability-verified leader set of size upper_bound.
  VertexSet witness;
  /// Minimum transversal size of the family.
  std::size_t transversal_number = 0;

  Rational n1() const { return n == 0 ? Rational(0) : Rational(n_l, n); }
  std::optional<Rational> n2() const {
    if (!n_s || n_l == 0) return std::nullopt;
    return Rational(*n_s, binomial(n, n_l));
  }
};

/// Sound lower bounds on the number of leaders: disjoint members each need a
/// leader, every eigenspace of multiplicity m needs m leaders, and every
/// family member must be hit.
inline std::size_t leader_lower_bound(const SpectralGraph& sg, const MpcsFamily& family,
                                      std::optional<std::size_t> tau = std::nullopt) {
  std::size_t lb = std::max(disjoint_packing(family.sets()), sg.spectrum().max_multiplicity());
  if (tau) lb = std::max(lb, *tau);
  return std::max<std::size_t>(lb, 1);
}

/// Checks the candidate and matches it against the lower bounds.
inline LeaderReport certify_min_leaders(const SpectralGraph& sg, const MpcsFamily& family,
                                        const VertexSet& candidate, std::optional<std::size_t> tau = std::nullopt) {
  sg.graph().check(candidate);
  for (const auto& m : family.members) {
    if (!m.set().intersects(candidate)) {
      throw Error(ErrorCode::CandidateNotTransversal, "candidate misses " + m.set().to_string());
    }
  }
  if (candidate.empty() || !sg.controllability(candidate).controllable) {
    throw Error(ErrorCode::CandidateNotControllable, candidate.to_string() + " does not control the graph");
  }
  LeaderReport r;
  r.n = sg.order();
  r.lower_bound = leader_lower_bound(sg, family, tau);
  r.upper_bound = candidate.size();
  if (r.lower_bound > r.upper_bound) {
    throw Error(ErrorCode::InvalidArgument, "lower bound exceeds a controllable leader set");
  }
  r.certified = r.lower_bound == r.upper_bound;
  r.n_l = r.upper_bound;
  r.witness = candidate;
  return r;
}

inline LeaderReport certify_min_leaders(const Graph& g, const MpcsFamily& family, const VertexSet& candidate,
                                        const ToleranceConfig& tol = {}) {
  return certify_min_leaders(SpectralGraph(g, tol), family, candidate);
}

/// Grows a leader set one vertex at a time, each time taking the smallest
/// label that most reduces the rank deficiency, until it controls the graph.
inline VertexSet controllable_completion(const SpectralGraph& sg, VertexSet leaders) {
  std::size_t deficiency = leaders.empty() ? sg.order() : sg.rank_deficiency(leaders);
  while (deficiency > 0) {
    std::optional<Vertex> best;
    std::size_t best_def = deficiency;
    for (Vertex v = 0; v < sg.order(); ++v) {
      if (leaders.contains(v)) continue;
      const std::size_t d = sg.rank_deficiency(leaders.united(VertexSet::from_indices({v})));
      if (!best || d < best_def) {
        best = v;
        best_def = d;
      }
    }
    leaders = leaders.united(VertexSet::from_indices({*best}));
    deficiency = best_def;
  }
  return leaders;
}

struct SelectionOptions {
  std::size_t min_set_cap = kDefaultMinSetCap;
  /// Largest number of minimum transversals checked one by one when the
  /// family is not known to be complete.
  std::size_t verify_cap = 100'000;
  /// Minimum transversals tried as leader candidates otherwise.
  std::size_t candidate_tries = 64;
};

/// Minimum leaders from an MPCS family. The first controllable minimum
/// transversal (or a greedy completion) is certified against the lower
/// bounds; n_s is exact when the family is complete or when every minimum
/// transversal was checked directly.
inline LeaderReport select_leaders(const SpectralGraph& sg, const MpcsFamily& family,
                                   const SelectionOptions& opts = {}) {
  const std::size_t n = sg.order();
  HittingSets hs = min_hitting_sets(family, n, std::max(opts.min_set_cap, opts.verify_cap));
  const bool check_all = !family.complete && !hs.truncated && hs.count <= opts.verify_cap;

  std::vector<VertexSet> good;
  std::optional<VertexSet> candidate;
  if (check_all) {
    for (const auto& t : hs.sets) {
      if (sg.controllability(t).controllable) good.push_back(t);
    }
    if (!good.empty()) candidate = good.front();
  } else {
    const std::size_t tries = family.complete ? 1 : opts.candidate_tries;
    for (std::size_t i = 0; i < tries && i < hs.sets.size() && !candidate; ++i) {
      if (sg.controllability(hs.sets[i]).controllable) candidate = hs.sets[i];
    }
  }
  if (!candidate) candidate = controllable_completion(sg, hs.sets.empty() ? VertexSet{} : hs.sets.front());

  LeaderReport r = certify_min_leaders(sg, family, *candidate, hs.n_l);
  r.transversal_number = hs.n_l;
  if (r.n_l == hs.n_l) {
    if (family.complete) {
      r.n_s = hs.count;
      r.ns_certified = true;
      r.min_sets = std::move(hs.sets);
      r.min_sets_truncated = hs.truncated;
    } else if (check_all) {
      r.n_s = BigInt(good.size());
      r.ns_certified = r.certified;
      r.min_sets = std::move(good);
    } else {
      r.n_s = hs.count;
      r.min_sets = std::move(hs.sets);
      r.min_sets_truncated = hs.truncated;
    }
  } else {
    r.min_sets = {r.witness};
    r.min_sets_truncated = true;
  }
  if (r.min_sets.size() > opts.min_set_cap) {
    r.min_sets.resize(opts.min_set_cap);
    r.min_sets_truncated = true;
  }
  return r;
}

struct ClosureOptions {
  /// Minimal transversals examined per pass before giving up on completeness.
  std::size_t transversal_cap = 50'000;
  /// Obstruction-derived MPCS added before giving up.
  std::size_t max_additions = 256;
};

namespace detail {

// Minimal transversals by branching on an unhit set and discarding any
// choice that leaves an earlier element without a private set. `visit`
// returns false to stop.
class MinimalTransversals {
 public:
  MinimalTransversals(const std::vector<VertexSet>& sets, std::size_t n)
      : sets_(sets), of_vertex_(n), hits_(sets.size(), 0), banned_(n, false) {
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      for (Vertex v : sets_[i]) of_vertex_[v].push_back(i);
    }
  }

  /// Returns false when stopped by the visitor or by the cap.
  bool run(const std::function<bool(const VertexSet&)>& visit, std::size_t cap) {
    visit_ = &visit;
    cap_ = cap;
    seen_ = 0;
    stopped_ = false;
    recurse();
    return !stopped_;
  }

 private:
  bool has_private(Vertex t) const {
    for (auto i : of_vertex_[t]) {
      if (hits_[i] == 1) return true;
    }
    return false;
  }

  void recurse() {
    if (stopped_) return;
    std::optional<std::size_t> pick;
    std::size_t best = 0;
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      if (hits_[i]) continue;
      std::size_t avail = 0;
      for (Vertex v : sets_[i]) avail += banned_[v] ? 0 : 1;
      if (avail == 0) return;
      if (!pick || avail < best) {
        pick = i;
        best = avail;
      }
    }
    if (!pick) {
      if (++seen_ > cap_ || !(*visit_)(VertexSet::from_indices(chosen_))) stopped_ = true;
      return;
    }
    std::vector<Vertex> newly_banned;
    for (Vertex v : sets_[*pick]) {
      if (banned_[v]) continue;
      for (auto i : of_vertex_[v]) ++hits_[i];
      chosen_.push_back(v);
      const bool minimal = std::all_of(chosen_.begin(), chosen_.end() - 1, [&](Vertex t) { return has_private(t); });
      if (minimal) recurse();
      chosen_.pop_back();
      for (auto i : of_vertex_[v]) --hits_[i];
      banned_[v] = true;
      newly_banned.push_back(v);
      if (stopped_) break;
    }
    for (Vertex v : newly_banned) banned_[v] = false;
  }

  const std::vector<VertexSet>& sets_;
  std::vector<std::vector<std::size_t>> of_vertex_;
  std::vector<std::size_t> hits_;
  std::vector<bool> banned_;
  std::vector<Vertex> chosen_;
  const std::function<bool(const VertexSet&)>* visit_ = nullptr;
  std::size_t cap_ = 0;
  std::size_t seen_ = 0;
  bool stopped_ = false;
};

}  // namespace detail

/// Enumerates every minimal transversal of `sets`, calling `visit` on each
/// until it returns false. Returns false if stopped early or past the cap.
inline bool for_each_minimal_transversal(const std::vector<VertexSet>& sets, std::size_t n,
                                         const std::function<bool(const VertexSet&)>& visit,
                                         std::size_t cap = static_cast<std::size_t>(-1)) {
  if (sets.empty()) return visit(VertexSet{});
  return detail::MinimalTransversals(sets, n).run(visit, cap);
}

/// Proves a family complete or extends it. A missing MPCS S would leave the
/// transversal V \ S, and hence a minimal transversal inside it,
/// uncontrollable; so if every minimal transversal controls the graph the
/// family holds every MPCS. Each uncontrollable transversal yields a new
/// MPCS extracted from its obstruction.
inline void close_family(const SpectralGraph& sg, MpcsFamily& family, const ClosureOptions& opts = {}) {
  if (family.complete) return;
  // Minimum transversals are minimal ones; too many of those means the scan
  // cannot finish within the cap.
  if (!family.members.empty() && min_hitting_sets(family, sg.order(), 1).count > opts.transversal_cap) return;
  for (std::size_t added = 0; added <= opts.max_additions; ++added) {
    std::optional<VertexSet> obstruction;
    const bool finished = for_each_minimal_transversal(
        family.sets(), sg.order(),
        [&](const VertexSet& t) {
          if (t.empty()) {
            obstruction = sg.graph().vertices();
            return false;
          }
          auto v = sg.controllability(t);
          if (v.controllable) return true;
          obstruction = v.obstruction->set;
          return false;
        },
        opts.transversal_cap);
    if (finished) {
      family.complete = true;
      family.sort();
      return;
    }
    if (!obstruction) return;
    auto m = extract_mpcs(sg, *obstruction);
    if (!m || family.contains(m->set)) return;
    family.add(MpcsEntry{std::move(*m), Provenance::Obstruction});
  }
}

}  // namespace mpcs

#endif  // MPCS_LEADER_SELECT_HPP
