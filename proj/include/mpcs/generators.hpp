#ifndef MPCS_GENERATORS_HPP
#define MPCS_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mpcs/graph.hpp"

namespace mpcs::gen {

inline Graph path(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "path needs n >= 1");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  return Graph::from_indices(n, e);
}

/// Vertex 1 is the centre.
inline Graph star(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "star needs n >= 1");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(0, v);
  return Graph::from_indices(n, e);
}

inline Graph cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "cycle needs n >= 3");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(0, static_cast<Vertex>(n - 1));
  return Graph::from_indices(n, e);
}

/// Seven-vertex example with three mutual twins around vertex 4.
inline Graph fig1() {
  return Graph::from_edge_list({{1, 4}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {4, 7}}, 7);
}

/// Fifteen-vertex tree with three MPCS.
inline Graph fig5() {
  return Graph::from_edge_list({{1, 2},
                                {2, 3},
                                {3, 4},
                                {4, 5},
                                {5, 6},
                                {5, 7},
                                {2, 8},
                                {8, 15},
                                {3, 9},
                                {9, 13},
                                {13, 14},
                                {9, 10},
                                {10, 11},
                                {11, 12}},
                               15);
}

namespace detail {

struct DsfnBlock {
  std::vector<Edge> edges;
  std::vector<Vertex> bottom;
};

// Builds D(g) on labels [offset, offset + 3^g) with its root at offset.
inline DsfnBlock dsfn_block(std::size_t g, Vertex offset) {
  if (g == 0) return {{}, {offset}};
  std::size_t sub = 1;
  for (std::size_t i = 1; i < g; ++i) sub *= 3;
  DsfnBlock main = dsfn_block(g - 1, offset);
  DsfnBlock out{std::move(main.edges), {}};
  for (int copy = 1; copy <= 2; ++copy) {
    DsfnBlock c = dsfn_block(g - 1, offset + static_cast<Vertex>(copy * sub));
    out.edges.insert(out.edges.end(), c.edges.begin(), c.edges.end());
    for (Vertex b : c.bottom) {
      out.edges.emplace_back(offset, b);
      out.bottom.push_back(b);
    }
  }
  return out;
}

}  // namespace detail

/// Deterministic scale-free network D(g) with 3^g vertices; vertex 1 is the hub.
inline Graph dsfn(std::size_t g) {
  if (g > 12) throw Error(ErrorCode::InvalidArgument, "dsfn generation too large");
  std::size_t n = 1;
  for (std::size_t i = 0; i < g; ++i) n *= 3;
  auto block = detail::dsfn_block(g, 0);
  return Graph::from_indices(n, block.edges);
}

/// Cayley tree C(g): a centre with three children, then two new children per
/// pendant each generation. Labels follow breadth-first order, centre first.
inline Graph cayley(std::size_t g) {
  if (g < 1) throw Error(ErrorCode::InvalidArgument, "cayley needs g >= 1");
  if (g > 20) throw Error(ErrorCode::InvalidArgument, "cayley generation too large");
  std::vector<Edge> e;
  std::vector<Vertex> frontier;
  Vertex next = 1;
  for (int i = 0; i < 3; ++i) {
    e.emplace_back(0, next);
    frontier.push_back(next++);
  }
  for (std::size_t level = 2; level <= g; ++level) {
    std::vector<Vertex> grown;
    for (Vertex p : frontier) {
      for (int i = 0; i < 2; ++i) {
        e.emplace_back(p, next);
        grown.push_back(next++);
      }
    }
    frontier = std::move(grown);
  }
  return Graph::from_indices(next, e);
}

/// Uniform labelled tree by Pruefer decoding.
inline Graph random_tree(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "random_tree needs n >= 1");
  if (n == 1) return Graph::from_indices(1, {});
  if (n == 2) {
    std::vector<Edge> e{{0, 1}};
    return Graph::from_indices(2, e);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
  std::vector<Vertex> code(n - 2);
  for (auto& c : code) c = pick(rng);

  std::vector<std::size_t> degree(n, 1);
  for (Vertex c : code) ++degree[c];
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> leaves;
  for (Vertex v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::vector<Edge> e;
  for (Vertex c : code) {
    Vertex leaf = leaves.top();
    leaves.pop();
    e.emplace_back(leaf, c);
    if (--degree[c] == 1) leaves.push(c);
  }
  Vertex a = leaves.top();
  leaves.pop();
  e.emplace_back(a, leaves.top());
  return Graph::from_indices(n, e);
}

enum class Family { Path, Star, Cycle, Fig1, Fig5, Dsfn, Cayley, RandomTree };

struct GeneratorSpec {
  Family family = Family::Path;
  /// Generation for dsfn/cayley, vertex count otherwise; unused for fig1/fig5.
  std::size_t param = 1;
  std::uint64_t seed = 0;
};

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::Path: return "path";
    case Family::Star: return "star";
    case Family::Cycle: return "cycle";
    case Family::Fig1: return "fig1";
    case Family::Fig5: return "fig5";
    case Family::Dsfn: return "dsfn";
    case Family::Cayley: return "cayley";
    case Family::RandomTree: return "random-tree";
  }
  return "path";
}

inline std::optional<Family> family_from_string(std::string_view s) {
  if (s == "path") return Family::Path;
  if (s == "star") return Family::Star;
  if (s == "cycle") return Family::Cycle;
  if (s == "fig1") return Family::Fig1;
  if (s == "fig5") return Family::Fig5;
  if (s == "dsfn") return Family::Dsfn;
  if (s == "cayley") return Family::Cayley;
  if (s == "random-tree") return Family::RandomTree;
  return std::nullopt;
}

inline Graph generate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::Path: return path(spec.param);
    case Family::Star: return star(spec.param);
    case Family::Cycle: return cycle(spec.param);
    case Family::Fig1: return fig1();
    case Family::Fig5: return fig5();
    case Family::Dsfn: return dsfn(spec.param);
    case Family::Cayley: return cayley(spec.param);
    case Family::RandomTree: return random_tree(spec.param, spec.seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown generator family");
}

/// Resolves names such as "fig5", "path3", "star4", "cycle6", "dsfn2",
/// "cayley3". Returns nullopt for anything else.
inline std::optional<Graph> builtin(std::string_view name) {
  if (name == "fig1") return fig1();
  if (name == "fig5") return fig5();
  for (std::string_view prefix : {"path", "star", "cycle", "dsfn", "cayley"}) {
    if (name.substr(0, prefix.size()) != prefix || name.size() == prefix.size()) continue;
    auto digits = name.substr(prefix.size());
    std::size_t value = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + static_cast<std::size_t>(c - '0');
      if (value > 100000) return std::nullopt;
    }
    return generate({*family_from_string(prefix), value, 0});
  }
  return std::nullopt;
}

}  // namespace mpcs::gen

#endif  // MPCS_GENERATORS_HPP
