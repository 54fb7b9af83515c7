#include <catch_amalgamated.hpp>

#include <random>

#include "mpcs/criticality.hpp"
#include "mpcs/generators.hpp"
#include "support.hpp"

using namespace mpcs;
using Catch::Matchers::WithinAbs;
using testing_support::to_sets;

namespace {

VertexSet L(std::initializer_list<Label> l) { return VertexSet::from_labels(l); }

}  // namespace

TEST_CASE("is_critical on fig1") {
  Graph g = gen::fig1();
  auto c = is_critical(g, L({1, 2, 3, 4}));
  REQUIRE(c);
  CHECK_THAT(c->lambda, WithinAbs(1.0, 1e-9));
  CHECK_FALSE(is_critical(g, L({1, 5})));
  for (Vertex v = 0; v < 7; ++v) CHECK_FALSE(is_critical(g, VertexSet::from_indices({v})));
}

TEST_CASE("is_critical rejects disconnected graphs") {
  Graph g = Graph::from_edge_list({{1, 2}, {3, 4}}, 4);
  try {
    is_critical(g, L({1, 2}));
    FAIL("expected DisconnectedGraph");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DisconnectedGraph);
  }
}

TEST_CASE("is_perfect_critical on fig1") {
  Graph g = gen::fig1();
  SECTION("three leaves of v4") {
    auto c = is_perfect_critical(g, L({1, 2, 3}));
    REQUIRE(c);
    CHECK(c->kind == CertificateKind::PerfectCritical);
    CHECK_THAT(c->lambda, WithinAbs(1.0, 1e-9));
    CHECK_THAT(c->witness.head(3).sum(), WithinAbs(0.0, 1e-9));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(c->witness(i)) > 1e-9);
    for (int i = 3; i < 7; ++i) CHECK(c->witness(i) == 0.0);
  }
  SECTION("adding v4 forces its entry to zero") { CHECK_FALSE(is_perfect_critical(g, L({1, 2, 3, 4}))); }
  SECTION("v5, v7") {
    auto c = is_perfect_critical(g, L({5, 7}));
    REQUIRE(c);
    CHECK_THAT(c->witness(4) + c->witness(6), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("uniform_boundary_cs") {
  Graph g = gen::fig1();
  CHECK(uniform_boundary_cs(g, L({5, 7})));
  CHECK(is_critical(g, L({5, 7})));
  CHECK_FALSE(uniform_boundary_cs(g, L({1, 5})));
  CHECK(uniform_boundary_cs(g, g.vertices()));
  CHECK(uniform_boundary_cs(gen::fig5(), gen::fig5().vertices()));
}

TEST_CASE("enumerate_mpcs_exhaustive reproduces the known families") {
  SECTION("fig1") {
    auto fam = enumerate_mpcs_exhaustive(gen::fig1(), 7);
    CHECK(fam.sets() == to_sets({{1, 2}, {1, 3}, {2, 3}, {5, 7}}));
    CHECK(fam.complete);
    CHECK(fam.is_antichain());
  }
  SECTION("fig5") {
    auto fam = enumerate_mpcs_exhaustive(gen::fig5(), 15);
    CHECK(fam.sets() == to_sets({{6, 7}, {1, 3, 4, 6, 9, 10, 12, 14}, {1, 3, 4, 7, 9, 10, 12, 14}}));
    CHECK(fam.complete);
  }
  SECTION("path on three vertices matches the brute-force oracle") {
    Graph g = gen::path(3);
    auto fam = enumerate_mpcs_exhaustive(g, 3);
    CHECK(fam.sets() == to_sets({{1, 3}}));
    CHECK(fam.sets() == testing_support::oracle_mpcs(g));
  }
  SECTION("a partial cap is not complete") {
    auto fam = enumerate_mpcs_exhaustive(gen::fig5(), 4);
    CHECK(fam.sets() == to_sets({{6, 7}}));
    CHECK_FALSE(fam.complete);
  }
  SECTION("cap above n is rejected") { CHECK_THROWS_AS(enumerate_mpcs_exhaustive(gen::fig1(), 8), Error); }
}

TEST_CASE("enumeration is independent of thread count and of the neighbour-count filter") {
  SpectralGraph sg(gen::fig5());
  EnumerationOptions one, four, nofilter;
  one.threads = 1;
  four.threads = 4;
  nofilter.threads = 2;
  nofilter.lemma1_filter = false;
  auto a = enumerate_mpcs_exhaustive(sg, one).sets();
  CHECK(a == enumerate_mpcs_exhaustive(sg, four).sets());
  CHECK(a == enumerate_mpcs_exhaustive(sg, nofilter).sets());
}

TEST_CASE("is_controllable") {
  SECTION("fig5 with leaders 6,7") {
    auto v = is_controllable(gen::fig5(), L({6, 7}));
    CHECK(v.controllable);
    CHECK_FALSE(v.obstruction);
  }
  SECTION("fig1 with leaders 1,2 is blocked by {5,7}") {
    Graph g = gen::fig1();
    auto v = is_controllable(g, L({1, 2}));
    REQUIRE_FALSE(v.controllable);
    REQUIRE(v.obstruction);
    CHECK(v.obstruction->set == L({3, 4, 5, 6, 7}));
    CHECK(v.obstruction->witness(0) == 0.0);
    CHECK(v.obstruction->witness(1) == 0.0);
    // The follower set is critical and holds the twin pair {5,7}.
    CHECK(is_critical(g, v.obstruction->set));
    CHECK(L({5, 7}).is_subset_of(v.obstruction->set));
  }
  SECTION("all vertices as leaders") {
    CHECK(is_controllable(gen::fig1(), gen::fig1().vertices()).controllable);
    CHECK(is_controllable(gen::fig5(), gen::fig5().vertices()).controllable);
  }
}

TEST_CASE("kalman_controllable") {
  Graph g5 = gen::fig5();
  CHECK(kalman_controllable(g5, L({6, 7})));
  CHECK(testing_support::oracle_controllable(g5, L({6, 7})));
  CHECK(kalman_controllable(gen::path(2), L({1})));
  Graph g1 = gen::fig1();
  CHECK_FALSE(kalman_controllable(g1, L({4})));
  CHECK_FALSE(is_controllable(g1, L({4})).controllable);
  CHECK(kalman_controllable(g1, g1.vertices()));
}

TEST_CASE("extract_mpcs descends from an obstruction to an MPCS") {
  Graph g = gen::fig1();
  SpectralGraph sg(g);
  auto v = sg.controllability(L({1, 2}));
  REQUIRE(v.obstruction);
  auto m = extract_mpcs(sg, v.obstruction->set);
  REQUIRE(m);
  auto known = enumerate_mpcs_exhaustive(sg).sets();
  CHECK(std::find(known.begin(), known.end(), m->set) != known.end());
  CHECK(m->set.is_subset_of(v.obstruction->set));
}

TEST_CASE("verify_mpcs agrees with the exhaustive family on fig5") {
  SpectralGraph sg(gen::fig5());
  CHECK(sg.verify_mpcs(L({6, 7})));
  CHECK(sg.verify_mpcs(L({1, 3, 4, 6, 9, 10, 12, 14})));
  CHECK_FALSE(sg.verify_mpcs(L({6, 4, 3})));
  CHECK_FALSE(sg.verify_mpcs(L({1, 3, 4, 6, 7, 9, 10, 12, 14})));
}

TEST_CASE("certificates validate") {
  SpectralGraph sg(gen::fig5());
  auto c = sg.find_perfect_critical(L({1, 3, 4, 6, 9, 10, 12, 14}));
  REQUIRE(c);
  CHECK(sg.validate(*c));
  auto bad = *c;
  bad.witness(1) = 0.5;
  CHECK_FALSE(sg.validate(bad));
}

TEST_CASE("perfect-critical witnesses are reproducible per seed") {
  Graph g = gen::fig1();
  auto a = is_perfect_critical(g, L({1, 2, 3}), {}, 11);
  auto b = is_perfect_critical(g, L({1, 2, 3}), {}, 11);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->witness == b->witness);
}
