#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mpcs/generators.hpp"
#include "mpcs/graph.hpp"
#include "mpcs/graph_io.hpp"
#include "mpcs/spectral.hpp"
#include "support.hpp"

using namespace mpcs;

namespace {

std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d;
  for (Vertex v = 0; v < g.order(); ++v) d.push_back(g.degree(v));
  return d;
}

}  // namespace

TEST_CASE("from_edge_list builds the three-vertex star") {
  Graph g = Graph::from_edge_list({{1, 2}, {1, 3}}, 3);
  CHECK(g.order() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(degrees(g) == std::vector<std::size_t>{2, 1, 1});
}

TEST_CASE("fig1 degree sequence matches a recount of its edge list") {
  const std::vector<std::pair<Label, Label>> pairs{{1, 4}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {4, 7}};
  Graph g = Graph::from_edge_list(pairs, 7);
  std::vector<std::size_t> expected(7, 0);
  for (auto [a, b] : pairs) {
    ++expected[static_cast<std::size_t>(a - 1)];
    ++expected[static_cast<std::size_t>(b - 1)];
  }
  CHECK(degrees(g) == expected);
  CHECK(degrees(g) == std::vector<std::size_t>{1, 1, 1, 5, 2, 2, 2});
}

TEST_CASE("from_edge_list rejects malformed input") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([] { Graph::from_edge_list({{1, 1}}, 1); }) == ErrorCode::SelfLoop);
  CHECK(code_of([] { Graph::from_edge_list({{1, 2}, {2, 1}}, 2); }) == ErrorCode::DuplicateEdge);
  CHECK(code_of([] { Graph::from_edge_list({{1, 3}}, 2); }) == ErrorCode::LabelOutOfRange);
  CHECK(code_of([] { Graph::from_edge_list({{0, 1}}, 2); }) == ErrorCode::LabelOutOfRange);
}

TEST_CASE("laplacian of small graphs") {
  SECTION("K2") {
    auto l = laplacian(gen::path(2));
    CHECK(l(0, 0) == 1);
    CHECK(l(0, 1) == -1);
    CHECK(l(1, 0) == -1);
    CHECK(l(1, 1) == 1);
  }
  SECTION("three-vertex star has zero row sums") {
    auto l = laplacian(Graph::from_edge_list({{1, 2}, {1, 3}}, 3));
    CHECK(l(0, 0) == 2);
    CHECK(l(1, 1) == 1);
    CHECK(l(2, 2) == 1);
    CHECK(l(1, 2) == 0);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(l.matrix().row(i).sum() == 0);
  }
  SECTION("fig5 trace is twice the edge count") {
    Graph g = gen::fig5();
    CHECK(laplacian(g).trace() == 28);
    CHECK(static_cast<std::size_t>(laplacian(g).trace()) == 2 * g.edge_count());
  }
}

TEST_CASE("neighbors_in") {
  Graph g = gen::fig1();
  CHECK(neighbors_in(g, 3, VertexSet::from_labels({1, 2})) == VertexSet::from_labels({1, 2}));
  CHECK(neighbors_in(g, 3, VertexSet{}).empty());
  CHECK(neighbors_in(g, 5, VertexSet::from_labels({5, 7})) == VertexSet::from_labels({5, 7}));
  CHECK_THROWS_AS(neighbors_in(g, 7, VertexSet{}), Error);
}

TEST_CASE("pendant_set") {
  CHECK(pendant_set(gen::path(4)) == VertexSet::from_labels({1, 4}));
  CHECK(pendant_set(gen::cayley(2)) == VertexSet::from_labels({5, 6, 7, 8, 9, 10}));
  CHECK(pendant_set(gen::cycle(5)).empty());
}

TEST_CASE("is_tree and components") {
  CHECK(is_tree(gen::fig5()));
  CHECK_FALSE(is_tree(gen::fig1()));
  Graph two = Graph::from_edge_list({{1, 2}, {3, 4}}, 4);
  auto comps = components(two);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == VertexSet::from_labels({1, 2}));
  CHECK(comps[1] == VertexSet::from_labels({3, 4}));
  CHECK_FALSE(is_connected(two));
  CHECK_THROWS_AS(require_connected(two), Error);
}

TEST_CASE("induced_subgraph") {
  SECTION("fig1 leaves are isolated") {
    auto sub = induced_subgraph(gen::fig1(), VertexSet::from_labels({1, 2, 3}));
    CHECK(sub.graph.order() == 3);
    CHECK(sub.graph.edge_count() == 0);
  }
  SECTION("whole vertex set reproduces the graph") {
    Graph g = gen::fig5();
    CHECK(induced_subgraph(g, g.vertices()).graph == g);
  }
  SECTION("fig5 {5,6,7} is a star centred at 5") {
    auto sub = induced_subgraph(gen::fig5(), VertexSet::from_labels({5, 6, 7}));
    CHECK(sub.graph.edge_count() == 2);
    CHECK(sub.graph.degree(0) == 2);
    CHECK(sub.to_parent(VertexSet::from_indices({0})) == VertexSet::from_labels({5}));
  }
}

TEST_CASE("VertexSet algebra") {
  auto a = VertexSet::from_labels({3, 1, 2});
  CHECK(a.labels() == std::vector<Label>{1, 2, 3});
  CHECK(a.complement(5) == VertexSet::from_labels({4, 5}));
  CHECK(a.minus(VertexSet::from_labels({2})) == VertexSet::from_labels({1, 3}));
  CHECK(a.united(VertexSet::from_labels({5})) == VertexSet::from_labels({1, 2, 3, 5}));
  CHECK(a.intersected(VertexSet::from_labels({2, 5})) == VertexSet::from_labels({2}));
  CHECK(VertexSet::from_labels({1}).is_subset_of(a));
  CHECK(a.to_string() == "{1,2,3}");
}

TEST_CASE("edge list and DOT parsing") {
  SECTION("edge list with header and comments") {
    std::istringstream in("# fig\nn 5\n1 2\n2 3\n\n3 4\n");
    Graph g = io::parse_edge_list(in);
    CHECK(g.order() == 5);
    CHECK(g.edge_count() == 3);
  }
  SECTION("edge list without header uses the largest label") {
    std::istringstream in("1 2\n2 7\n");
    CHECK(io::parse_edge_list(in).order() == 7);
  }
  SECTION("malformed edge list") {
    std::istringstream bad("1 x\n");
    CHECK_THROWS_AS(io::parse_edge_list(bad), Error);
    std::istringstream range("n 2\n1 3\n");
    try {
      io::parse_edge_list(range);
      FAIL("expected LabelOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LabelOutOfRange);
    }
  }
  SECTION("DOT chains, attributes and comments") {
    std::istringstream in("graph G {\n  node [shape=circle];\n  1 -- 2 -- 3 [color=red]; // c\n  4;\n}\n");
    Graph g = io::parse_dot(in);
    CHECK(g.order() == 4);
    CHECK(g.edge_count() == 2);
    CHECK(g.adjacent(1, 2));
  }
  SECTION("digraph is rejected") {
    std::istringstream in("digraph { 1 -> 2 }");
    CHECK_THROWS_AS(io::parse_dot(in), Error);
  }
  SECTION("writers round-trip") {
    Graph g = gen::fig1();
    std::stringstream el, dot;
    io::write_edge_list(el, g);
    io::write_dot(dot, g);
    CHECK(io::parse_edge_list(el) == g);
    CHECK(io::parse_dot(dot) == g);
  }
}

TEST_CASE("property: Laplacian kills the all-ones vector and connected kernels are one-dimensional") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Graph g = testing_support::random_connected(2 + seed % 15, seed % 6, seed);
    Eigen::VectorXi ones = Eigen::VectorXi::Ones(static_cast<Eigen::Index>(g.order()));
    CHECK((laplacian(g).matrix() * ones).cwiseAbs().maxCoeff() == 0);
    auto spec = spectrum(g);
    CHECK(spec[0].value == 0.0);
    CHECK(spec[0].multiplicity() == 1);
  }
}

TEST_CASE("property: induced subgraph edge counts") {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Graph g = testing_support::random_connected(3 + seed % 12, seed % 5, seed);
    VertexSet s = testing_support::random_subset(g.order(), rng);
    std::size_t inside = 0;
    for (auto [a, b] : g.edges()) inside += s.contains(a) && s.contains(b);
    CHECK(induced_subgraph(g, s).graph.edge_count() == inside);
    CHECK(induced_subgraph(g, g.vertices()).graph == g);
  }
}

TEST_CASE("property: pendant_set agrees with degree recount on random trees") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 + seed % 29;
    Graph t = gen::random_tree(n, seed);
    std::vector<std::pair<Label, Label>> pairs;
    std::vector<int> deg(n, 0);
    for (auto [a, b] : t.edges()) {
      pairs.emplace_back(to_label(a), to_label(b));
      ++deg[a];
      ++deg[b];
    }
    std::vector<Vertex> expected;
    for (Vertex v = 0; v < n; ++v) {
      if (deg[v] == 1) expected.push_back(v);
    }
    CHECK(pendant_set(Graph::from_edge_list(pairs, n)) == VertexSet::from_indices(expected));
  }
}
