#ifndef MPCS_GRAPH_HPP
#define MPCS_GRAPH_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpcs/error.hpp"

namespace mpcs {

/// Internal vertex index. Indices are 0-based; every external surface (files,
/// CLI, JSON, VertexSet::labels) uses 1-based labels.
using Vertex = std::uint32_t;
using Label = long long;

constexpr Label to_label(Vertex v) { return static_cast<Label>(v) + 1; }

/// Sorted, duplicate-free set of vertex indices.
class VertexSet {
 public:
  using const_iterator = std::vector<Vertex>::const_iterator;

  VertexSet() = default;

  static VertexSet from_indices(std::vector<Vertex> vs) {
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    VertexSet s;
    s.items_ = std::move(vs);
    return s;
  }

  /// Builds a set from 1-based labels. Labels < 1 are rejected here; the
  /// upper bound is checked by whichever graph operation consumes the set.
  static VertexSet from_labels(std::span<const Label> labels) {
    std::vector<Vertex> vs;
    vs.reserve(labels.size());
    for (Label l : labels) {
      if (l < 1) {
        throw Error(ErrorCode::LabelOutOfRange, "vertex label " + std::to_string(l) + " < 1");
      }
      vs.push_back(static_cast<Vertex>(l - 1));
    }
    return from_indices(std::move(vs));
  }

  static VertexSet from_labels(std::initializer_list<Label> labels) {
    return from_labels(std::span<const Label>(labels.begin(), labels.size()));
  }

  static VertexSet range(std::size_t n) {
    std::vector<Vertex> vs(n);
    std::iota(vs.begin(), vs.end(), Vertex{0});
    VertexSet s;
    s.items_ = std::move(vs);
    return s;
  }

  const std::vector<Vertex>& indices() const noexcept { return items_; }

  std::vector<Label> labels() const {
    std::vector<Label> out;
    out.reserve(items_.size());
    for (Vertex v : items_) out.push_back(to_label(v));
    return out;
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const_iterator begin() const noexcept { return items_.begin(); }
  const_iterator end() const noexcept { return items_.end(); }
  Vertex operator[](std::size_t i) const { return items_[i]; }

  bool contains(Vertex v) const { return std::binary_search(items_.begin(), items_.end(), v); }

  bool is_subset_of(const VertexSet& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
  }

  bool intersects(const VertexSet& other) const {
    auto a = items_.begin();
    auto b = other.items_.begin();
    while (a != items_.end() && b != other.items_.end()) {
      if (*a == *b) return true;
      if (*a < *b) ++a; else ++b;
    }
    return false;
  }

  VertexSet complement(std::size_t n) const {
    std::vector<Vertex> out;
    out.reserve(n >= items_.size() ? n - items_.size() : 0);
    auto it = items_.begin();
    for (Vertex v = 0; v < n; ++v) {
      if (it != items_.end() && *it == v) {
        ++it;
        continue;
      }
      out.push_back(v);
    }
    VertexSet s;
    s.items_ = std::move(out);
    return s;
  }

  VertexSet united(const VertexSet& other) const {
    VertexSet s;
    std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                   std::back_inserter(s.items_));
    return s;
  }

  VertexSet minus(const VertexSet& other) const {
    VertexSet s;
    std::set_difference(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                        std::back_inserter(s.items_));
    return s;
  }

  VertexSet intersected(const VertexSet& other) const {
    VertexSet s;
    std::set_intersection(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                          std::back_inserter(s.items_));
    return s;
  }

  /// Renders as "{1,2,3}" using 1-based labels.
  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (i) os << ',';
      os << to_label(items_[i]);
    }
    os << '}';
    return os.str();
  }

  // Lexicographic over the sorted members, which is also lexicographic over labels.
  auto operator<=>(const VertexSet&) const = default;
  bool operator==(const VertexSet&) const = default;

 private:
  std::vector<Vertex> items_;
};

using Edge = std::pair<Vertex, Vertex>;

/// Immutable undirected simple graph on vertices 0..n-1.
class Graph {
 public:
  Graph() = default;

  /// Builds from 1-based label pairs; rejects self-loops, duplicate edges and
  /// labels outside 1..n.
  static Graph from_edge_list(std::span<const std::pair<Label, Label>> pairs, std::size_t n) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) {
      if (a < 1 || b < 1 || a > static_cast<Label>(n) || b > static_cast<Label>(n)) {
        throw Error(ErrorCode::LabelOutOfRange, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                    ") outside 1.." + std::to_string(n));
      }
      edges.emplace_back(static_cast<Vertex>(a - 1), static_cast<Vertex>(b - 1));
    }
    return from_indices(n, edges);
  }

  static Graph from_edge_list(std::initializer_list<std::pair<Label, Label>> pairs, std::size_t n) {
    return from_edge_list(std::span<const std::pair<Label, Label>>(pairs.begin(), pairs.size()), n);
  }

  static Graph from_indices(std::size_t n, std::span<const Edge> input) {
    Graph g;
    g.adj_.assign(n, {});
    g.edges_.reserve(input.size());
    for (auto [a, b] : input) {
      if (a >= n || b >= n) {
        throw Error(ErrorCode::LabelOutOfRange, "edge (" + std::to_string(to_label(a)) + "," +
                                                    std::to_string(to_label(b)) + ") outside 1.." +
                                                    std::to_string(n));
      }
      if (a == b) {
        throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(to_label(a)));
      }
      g.edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(g.edges_.begin(), g.edges_.end());
    if (auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end()); dup != g.edges_.end()) {
      throw Error(ErrorCode::DuplicateEdge, "edge (" + std::to_string(to_label(dup->first)) + "," +
                                                std::to_string(to_label(dup->second)) + ") listed twice");
    }
    for (auto [a, b] : g.edges_) {
      g.adj_[a].push_back(b);
      g.adj_[b].push_back(a);
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());
    return g;
  }

  std::size_t order() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  const std::vector<Vertex>& neighbors(Vertex v) const {
    check(v);
    return adj_[v];
  }

  std::size_t degree(Vertex v) const { return neighbors(v).size(); }

  bool adjacent(Vertex u, Vertex v) const {
    const auto& nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  void check(Vertex v) const {
    if (v >= adj_.size()) {
      throw Error(ErrorCode::LabelOutOfRange,
                  "vertex " + std::to_string(to_label(v)) + " outside 1.." + std::to_string(adj_.size()));
    }
  }

  void check(const VertexSet& s) const {
    if (!s.empty()) check(s.indices().back());
  }

  VertexSet vertices() const { return VertexSet::range(order()); }

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::vector<Vertex>> adj_;
  std::vector<Edge> edges_;
};

/// Integer Laplacian L = degree matrix minus adjacency matrix.
class LaplacianMatrix {
 public:
  LaplacianMatrix() = default;
  explicit LaplacianMatrix(Eigen::MatrixXi m) : m_(std::move(m)) {}

  const Eigen::MatrixXi& matrix() const noexcept { return m_; }
  Eigen::MatrixXd real() const { return m_.cast<double>(); }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  int operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  long long trace() const { return m_.cast<long long>().trace(); }

 private:
  Eigen::MatrixXi m_;
};

inline LaplacianMatrix laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.order());
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n, n);
  for (auto [a, b] : g.edges()) {
    m(a, b) = -1;
    m(b, a) = -1;
    ++m(a, a);
    ++m(b, b);
  }
  return LaplacianMatrix(std::move(m));
}

/// N_S(v): neighbours of v that lie in s.
inline VertexSet neighbors_in(const Graph& g, Vertex v, const VertexSet& s) {
  g.check(s);
  std::vector<Vertex> out;
  const auto& nb = g.neighbors(v);
  std::set_intersection(nb.begin(), nb.end(), s.begin(), s.end(), std::back_inserter(out));
  return VertexSet::from_indices(std::move(out));
}

inline std::size_t count_neighbors_in(const Graph& g, Vertex v, const VertexSet& s) {
  std::size_t c = 0;
  for (Vertex u : g.neighbors(v)) c += s.contains(u) ? 1 : 0;
  return c;
}

inline VertexSet pendant_set(const Graph& g) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (g.degree(v) == 1) out.push_back(v);
  }
  return VertexSet::from_indices(std::move(out));
}

inline std::vector<VertexSet> components(const Graph& g) {
  const std::size_t n = g.order();
  std::vector<int> comp(n, -1);
  std::vector<VertexSet> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Vertex> members;
    comp[s] = static_cast<int>(out.size());
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (Vertex u : g.neighbors(v)) {
        if (comp[u] < 0) {
          comp[u] = comp[v];
          stack.push_back(u);
        }
      }
    }
    out.push_back(VertexSet::from_indices(std::move(members)));
  }
  return out;
}

inline bool is_connected(const Graph& g) { return g.order() <= 1 || components(g).size() == 1; }

inline bool is_tree(const Graph& g) {
  return g.order() >= 1 && g.edge_count() + 1 == g.order() && is_connected(g);
}

/// Induced subgraph with its vertices renumbered 0..|s|-1 in increasing order;
/// parent_vertex maps each new index back to the original graph.
struct Subgraph {
  Graph graph;
  std::vector<Vertex> parent_vertex;

  VertexSet to_parent(const VertexSet& local) const {
    std::vector<Vertex> out;
    out.reserve(local.size());
    for (Vertex v : local) out.push_back(parent_vertex.at(v));
    return VertexSet::from_indices(std::move(out));
  }
};

inline Subgraph induced_subgraph(const Graph& g, const VertexSet& s) {
  g.check(s);
  std::vector<Vertex> local(g.order(), static_cast<Vertex>(-1));
  for (std::size_t i = 0; i < s.size(); ++i) local[s[i]] = static_cast<Vertex>(i);
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges()) {
    if (s.contains(a) && s.contains(b)) edges.emplace_back(local[a], local[b]);
  }
  return Subgraph{Graph::from_indices(s.size(), edges), s.indices()};
}

inline void require_connected(const Graph& g) {
  if (!is_connected(g)) {
    throw Error(ErrorCode::DisconnectedGraph, "operation requires a connected graph");
  }
}

inline void require_tree(const Graph& g) {
  if (!is_tree(g)) throw Error(ErrorCode::NotATree, "operation requires a tree");
}

}  // namespace mpcs

#endif  // MPCS_GRAPH_HPP
