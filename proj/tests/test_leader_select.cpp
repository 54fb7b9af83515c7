#include <catch_amalgamated.hpp>

#include <random>

#include "mpcs/criticality.hpp"
#include "mpcs/generators.hpp"
#include "mpcs/leader_select.hpp"
#include "mpcs/tree_rules.hpp"
#include "support.hpp"

using namespace mpcs;
using testing_support::to_sets;

namespace {

VertexSet L(std::initializer_list<Label> l) { return VertexSet::from_labels(l); }

// Minimum transversals by scanning every subset of the n vertices.
std::vector<VertexSet> brute_min_transversals(const std::vector<VertexSet>& fam, std::size_t n) {
  std::vector<VertexSet> best;
  std::size_t best_size = n + 1;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    const auto size = static_cast<std::size_t>(std::popcount(m));
    if (size > best_size) continue;
    VertexSet t = from_mask(m);
    if (!std::all_of(fam.begin(), fam.end(), [&](const VertexSet& s) { return s.intersects(t); })) continue;
    if (size < best_size) {
      best.clear();
      best_size = size;
    }
    best.push_back(t);
  }
  std::sort(best.begin(), best.end());
  return best;
}

std::vector<VertexSet> brute_minimal_transversals(const std::vector<VertexSet>& fam, std::size_t n) {
  std::vector<VertexSet> out;
  auto hits = [&](const VertexSet& t) {
    return std::all_of(fam.begin(), fam.end(), [&](const VertexSet& s) { return s.intersects(t); });
  };
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    VertexSet t = from_mask(m);
    if (!hits(t)) continue;
    bool minimal = true;
    for (Vertex v : t) minimal = minimal && !hits(t.minus(VertexSet::from_indices({v})));
    if (minimal) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexSet> random_family(std::mt19937_64& rng, std::size_t n) {
  std::vector<VertexSet> fam;
  const std::size_t m = 1 + rng() % 6;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v) {
      if (rng() % 3 == 0) s.push_back(v);
    }
    if (s.empty()) s.push_back(static_cast<Vertex>(rng() % n));
    fam.push_back(VertexSet::from_indices(s));
  }
  return fam;
}

}  // namespace

TEST_CASE("min_hitting_sets on fig1") {
  auto hs = min_hitting_sets(to_sets({{1, 2}, {1, 3}, {2, 3}, {5, 7}}), 7);
  CHECK(hs.n_l == 3);
  CHECK(hs.count == 6);
  CHECK(hs.sets == to_sets({{1, 2, 5}, {1, 2, 7}, {1, 3, 5}, {1, 3, 7}, {2, 3, 5}, {2, 3, 7}}));
  CHECK_FALSE(hs.truncated);
}

TEST_CASE("min_hitting_sets on fig5") {
  auto fam = enumerate_mpcs_exhaustive(gen::fig5(), 15);
  auto hs = min_hitting_sets(fam, 15);
  CHECK(hs.n_l == 2);
  CHECK(hs.count == 15);
  CHECK(hs.sets.size() == 15);
  CHECK(std::is_sorted(hs.sets.begin(), hs.sets.end()));
}

TEST_CASE("min_hitting_sets edge cases") {
  auto empty = min_hitting_sets(std::vector<VertexSet>{}, 4);
  CHECK(empty.n_l == 1);
  CHECK(empty.count == 4);
  CHECK(empty.sets == to_sets({{1}, {2}, {3}, {4}}));

  auto capped = min_hitting_sets(to_sets({{1, 2}, {3, 4}, {5, 6}}), 6, 5);
  CHECK(capped.count == 8);
  CHECK(capped.sets.size() == 5);
  CHECK(capped.truncated);

  CHECK_THROWS_AS(min_hitting_sets(std::vector<VertexSet>{VertexSet{}}, 3), Error);
}

TEST_CASE("property: min_hitting_sets matches brute force") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    auto fam = random_family(rng, n);
    auto hs = min_hitting_sets(fam, n);
    auto expect = brute_min_transversals(fam, n);
    REQUIRE(hs.sets == expect);
    CHECK(hs.count == expect.size());
    CHECK(hs.n_l == expect.front().size());
    CHECK(disjoint_packing(fam) <= hs.n_l);
  }
}

TEST_CASE("property: minimal transversals match brute force") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    auto fam = random_family(rng, n);
    std::vector<VertexSet> got;
    CHECK(for_each_minimal_transversal(fam, n, [&](const VertexSet& t) {
      got.push_back(t);
      return true;
    }));
    std::sort(got.begin(), got.end());
    CHECK(got == brute_minimal_transversals(fam, n));
  }
}

TEST_CASE("disjoint_packing") {
  CHECK(disjoint_packing(to_sets({{1, 2}, {2, 3}, {3, 4}})) == 2);
  CHECK(disjoint_packing(to_sets({{1, 2}, {1, 3}, {2, 3}, {5, 7}})) == 2);
  CHECK(disjoint_packing({}) == 0);
}

TEST_CASE("metrics") {
  auto m1 = metrics(4, 2, 3);
  CHECK(m1.n1 == Rational(1, 2));
  CHECK(m1.n2 == Rational(1, 2));
  CHECK(metrics(10, 3, 8).n2 == Rational(1, 15));
  auto m3 = metrics(22, 6, 64);
  CHECK(m3.n1 == Rational(3, 11));
  auto sci = to_scientific(m3.n2);
  CHECK(sci.mantissa == 85776);
  CHECK(sci.exp == -8);
  CHECK(sci.to_string() == "8.5776e-04");
  CHECK(to_scientific(metrics(46, 12, 4096).n2).to_string() == "1.0527e-07");
  CHECK(to_scientific(Rational(1, 2)).to_string() == "5.0000e-01");
  CHECK(to_scientific(Rational(99999, 10000000)).to_string() == "9.9999e-03");
  CHECK(to_scientific(Rational(999995, 100000)).to_string() == "1.0000e+01");
  CHECK_THROWS_AS(metrics(3, 4, 1), Error);
}

TEST_CASE("certify_min_leaders") {
  Graph g = gen::fig5();
  SpectralGraph sg(g);
  auto fam = enumerate_mpcs_exhaustive(sg);
  auto r = certify_min_leaders(sg, fam, L({6, 1}));
  CHECK(r.certified);
  CHECK(r.n_l == 2);
  CHECK(r.lower_bound == 2);

  auto code = [&](const VertexSet& c) {
    try {
      certify_min_leaders(sg, fam, c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code(L({1, 3})) == ErrorCode::CandidateNotTransversal);
  // Hits every member yet misses a set the family does not list.
  MpcsFamily partial;
  partial.members.push_back(fam.members.front());
  try {
    certify_min_leaders(sg, partial, L({6, 5}));
    FAIL("expected CandidateNotControllable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CandidateNotControllable);
  }
}

TEST_CASE("select_leaders") {
  SECTION("fig1") {
    SpectralGraph sg(gen::fig1());
    auto r = select_leaders(sg, enumerate_mpcs_exhaustive(sg));
    CHECK(r.n_l == 3);
    CHECK(r.n_s == 6);
    CHECK(r.certified);
    CHECK(r.ns_certified);
    CHECK(r.n1() == Rational(3, 7));
  }
  SECTION("fig5") {
    SpectralGraph sg(gen::fig5());
    auto r = select_leaders(sg, enumerate_mpcs_exhaustive(sg));
    CHECK(r.n_l == 2);
    CHECK(r.n_s == 15);
    CHECK(r.min_sets.size() == 15);
    for (const auto& s : r.min_sets) CHECK(is_controllable(gen::fig5(), s).controllable);
  }
  SECTION("incomplete family checks each transversal") {
    SpectralGraph sg(gen::fig5());
    auto fam = twin_pair_mpcs(gen::fig5());
    auto r = select_leaders(sg, fam);
    // Neither single-vertex pick controls the graph; the eigenvalue of
    // multiplicity 2 still certifies two leaders.
    CHECK(r.transversal_number == 1);
    CHECK(r.n_l == 2);
    CHECK(r.lower_bound == 2);
    CHECK(r.certified);
    CHECK(is_controllable(gen::fig5(), r.witness).controllable);
    CHECK_FALSE(r.n_s);
  }
  SECTION("dsfn(2) from its twin pairs") {
    Graph g = gen::dsfn(2);
    SpectralGraph sg(g);
    auto fam = twin_pair_mpcs(g);
    close_family(sg, fam);
    CHECK(fam.complete);
    auto r = select_leaders(sg, fam);
    CHECK(r.n_l == 3);
    CHECK(r.n_s == 8);
    CHECK(r.certified);
  }
  SECTION("cayley(2)") {
    Graph g = gen::cayley(2);
    SpectralGraph sg(g);
    auto fam = twin_pair_mpcs(g);
    close_family(sg, fam);
    CHECK(fam.complete);
    CHECK(fam.sets() == enumerate_mpcs_exhaustive(sg).sets());
    auto r = select_leaders(sg, fam);
    CHECK(r.n_l == 3);
    CHECK(r.n_s == 8);
    CHECK(*r.n2() == Rational(1, 15));
  }
}

TEST_CASE("close_family recovers missing members") {
  SECTION("fig5 from the twin pair alone") {
    SpectralGraph sg(gen::fig5());
    auto fam = twin_pair_mpcs(gen::fig5());
    close_family(sg, fam);
    CHECK(fam.complete);
    CHECK(fam.sets() == enumerate_mpcs_exhaustive(sg).sets());
    std::size_t obstructions = 0;
    for (const auto& m : fam.members) obstructions += m.provenance == Provenance::Obstruction;
    CHECK(obstructions == 2);
  }
  SECTION("path(4) from nothing") {
    SpectralGraph sg(gen::path(4));
    MpcsFamily fam;
    close_family(sg, fam);
    CHECK(fam.complete);
    CHECK(fam.sets() == to_sets({{1, 2, 3, 4}}));
  }
  SECTION("property: random graphs agree with exhaustive search") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const std::size_t n = 3 + seed % 8;
      Graph g = testing_support::random_connected(n, seed % 4, seed);
      SpectralGraph sg(g);
      MpcsFamily fam;
      close_family(sg, fam);
      REQUIRE(fam.complete);
      CHECK(fam.sets() == enumerate_mpcs_exhaustive(sg).sets());
    }
  }
}
