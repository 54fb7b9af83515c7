#include <catch_amalgamated.hpp>

#include <functional>

#include "mpcs/criticality.hpp"
#include "mpcs/generators.hpp"
#include "support.hpp"

using namespace mpcs;
using testing_support::to_sets;

namespace {

// Vertex count and root degree of D(g) from the recurrences alone:
// n(g) = 3 n(g-1) and the hub gains the 2 * 2^(g-1) bottom vertices of the copies.
std::size_t dsfn_order(std::size_t g) { return g == 0 ? 1 : 3 * dsfn_order(g - 1); }
std::size_t dsfn_root_degree(std::size_t g) { return g == 0 ? 0 : dsfn_root_degree(g - 1) + (std::size_t{1} << g); }

}  // namespace

TEST_CASE("fig1 generator") {
  Graph g = gen::fig1();
  CHECK(g.degree(3) == 5);
  CHECK(is_connected(g));
  CHECK_FALSE(is_tree(g));
  CHECK(g.edge_count() == 7);
}

TEST_CASE("fig5 generator") {
  Graph g = gen::fig5();
  CHECK(is_tree(g));
  CHECK(g.order() == 15);
  CHECK(pendant_set(g) == VertexSet::from_labels({1, 6, 7, 12, 14, 15}));
  CHECK(enumerate_mpcs_exhaustive(g, 15).members.size() == 3);
}

TEST_CASE("dsfn generator") {
  SECTION("g=0 is a single vertex") { CHECK(gen::dsfn(0).order() == 1); }
  SECTION("g=1 is a star with twin leaves") {
    Graph g = gen::dsfn(1);
    CHECK(g == Graph::from_edge_list({{1, 2}, {1, 3}}, 3));
    CHECK(enumerate_mpcs_exhaustive(g, 3).sets() == to_sets({{2, 3}}));
  }
  SECTION("g=2") {
    Graph g = gen::dsfn(2);
    CHECK(g == Graph::from_edge_list({{1, 2}, {1, 3}, {4, 5}, {4, 6}, {7, 8}, {7, 9}, {1, 5}, {1, 6}, {1, 8}, {1, 9}},
                                     9));
    CHECK(enumerate_mpcs_exhaustive(g, 9).sets() == to_sets({{2, 3}, {5, 6}, {8, 9}}));
  }
  SECTION("g=3 root degree") {
    Graph g = gen::dsfn(3);
    CHECK(g.order() == 27);
    CHECK(g.degree(0) == 14);
    CHECK(dsfn_root_degree(3) == 14);
  }
}

TEST_CASE("cayley generator") {
  CHECK(gen::cayley(1).order() == 4);
  CHECK(gen::cayley(3).order() == 22);
  CHECK(gen::cayley(5).order() == 94);
  CHECK(gen::cayley(1) == gen::star(4));
  CHECK_THROWS_AS(gen::cayley(0), Error);
}

TEST_CASE("random trees") {
  CHECK(gen::random_tree(1, 5).order() == 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 1 + seed % 20;
    Graph t = gen::random_tree(n, seed);
    CHECK(t.edge_count() + 1 == n);
    CHECK(is_connected(t));
    CHECK(t.edges() == gen::random_tree(n, seed).edges());
  }
}

TEST_CASE("builtin names") {
  CHECK(gen::builtin("path3") == gen::path(3));
  CHECK(gen::builtin("cayley2") == gen::cayley(2));
  CHECK(gen::builtin("dsfn2") == gen::dsfn(2));
  CHECK_FALSE(gen::builtin("path"));
  CHECK_FALSE(gen::builtin("pathx"));
  CHECK_FALSE(gen::builtin("tree.txt"));
}

TEST_CASE("property: family sizes") {
  for (std::size_t g = 0; g <= 8; ++g) {
    CHECK(gen::dsfn(g).order() == dsfn_order(g));
    CHECK(gen::dsfn(g).degree(0) == dsfn_root_degree(g));
  }
  for (std::size_t g = 1; g <= 8; ++g) {
    Graph c = gen::cayley(g);
    CHECK(c.order() == 3 * (std::size_t{1} << g) - 2);
    CHECK(pendant_set(c).size() == 3 * (std::size_t{1} << (g - 1)));
    CHECK(is_tree(c));
  }
}

TEST_CASE("property: DSFN twins share neighbourhoods") {
  for (std::size_t g = 1; g <= 4; ++g) {
    Graph d = gen::dsfn(g);
    std::size_t pairs = 0;
    for (Vertex a = 0; a < d.order(); ++a) {
      for (Vertex b = a + 1; b < d.order(); ++b) {
        if (d.neighbors(a) == d.neighbors(b)) {
          ++pairs;
          CHECK(uniform_boundary_cs(d, VertexSet::from_indices({a, b})));
        }
      }
    }
    CHECK(pairs == dsfn_order(g) / 3);
  }
}
