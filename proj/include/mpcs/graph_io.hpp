#ifndef MPCS_GRAPH_IO_HPP
#define MPCS_GRAPH_IO_HPP

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpcs/graph.hpp"

namespace mpcs::io {

enum class GraphFormat { EdgeList, Dot };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::optional<Label> parse_label(std::string_view tok) {
  tok = trim(tok);
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') tok = tok.substr(1, tok.size() - 2);
  Label value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

inline Graph build(const std::vector<std::pair<Label, Label>>& pairs, std::optional<Label> declared_n,
                   Label max_label) {
  if (declared_n && *declared_n < max_label) {
    throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(max_label) + " exceeds declared n " +
                                                std::to_string(*declared_n));
  }
  const auto n = static_cast<std::size_t>(declared_n.value_or(max_label));
  return Graph::from_edge_list(pairs, n);
}

}  // namespace detail

/// Edge list: one "u v" pair per line, '#' comments, optional "n <count>" header.
inline Graph parse_edge_list(std::istream& in) {
  std::vector<std::pair<Label, Label>> pairs;
  std::optional<Label> declared_n;
  Label max_label = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream ls{std::string(body)};
    std::string a, b, extra;
    ls >> a >> b;
    if (ls >> extra) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected two fields");
    }
    if (a == "n") {
      auto n = detail::parse_label(b);
      if (!n || *n < 0 || declared_n || !pairs.empty()) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad header");
      }
      declared_n = *n;
      continue;
    }
    auto u = detail::parse_label(a);
    auto v = detail::parse_label(b);
    if (!u || !v) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected \"u v\"");
    }
    if (*u < 1 || *v < 1) {
      throw Error(ErrorCode::LabelOutOfRange, "line " + std::to_string(lineno) + ": labels are 1-based");
    }
    pairs.emplace_back(*u, *v);
    max_label = std::max({max_label, *u, *v});
  }
  return detail::build(pairs, declared_n, max_label);
}

/// Undirected DOT subset: `graph { 1 -- 2 -- 3; 4; }`. Attribute lists and
/// graph/node/edge defaults are skipped; node ids must be integers.
inline Graph parse_dot(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  std::string clean;
  clean.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 2, "//") == 0 || (text[i] == '#' && (i == 0 || text[i - 1] == '\n'))) {
      while (i < text.size() && text[i] != '\n') ++i;
      clean.push_back('\n');
    } else if (text.compare(i, 2, "/*") == 0) {
      auto end = text.find("*/", i + 2);
      if (end == std::string::npos) throw Error(ErrorCode::ParseError, "unterminated comment");
      i = end + 1;
    } else if (text[i] == '[') {
      auto end = text.find(']', i);
      if (end == std::string::npos) throw Error(ErrorCode::ParseError, "unterminated attribute list");
      i = end;
    } else {
      clean.push_back(text[i]);
    }
  }

  auto open = clean.find('{');
  auto close = clean.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorCode::ParseError, "DOT body must be enclosed in braces");
  }
  std::string header(detail::trim(std::string_view(clean).substr(0, open)));
  if (header.find("digraph") != std::string::npos) {
    throw Error(ErrorCode::ParseError, "directed graphs are not supported");
  }
  if (header.find("graph") == std::string::npos) {
    throw Error(ErrorCode::ParseError, "missing 'graph' keyword");
  }

  std::vector<std::pair<Label, Label>> pairs;
  Label max_label = 0;
  std::string body = clean.substr(open + 1, close - open - 1);
  for (char& c : body) {
    if (c == '\n') c = ';';
  }
  std::size_t start = 0;
  while (start <= body.size()) {
    auto end = body.find(';', start);
    if (end == std::string::npos) end = body.size();
    auto stmt = detail::trim(std::string_view(body).substr(start, end - start));
    start = end + 1;
    if (stmt.empty()) continue;
    if (stmt.find("->") != std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "directed edge in undirected graph");
    }
    if (stmt.find('=') != std::string_view::npos) continue;
    if (stmt == "node" || stmt == "edge" || stmt == "graph") continue;

    std::vector<Label> chain;
    std::size_t pos = 0;
    while (true) {
      auto dash = stmt.find("--", pos);
      auto tok = stmt.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
      auto id = detail::parse_label(tok);
      if (!id) {
        throw Error(ErrorCode::ParseError, "node id '" + std::string(detail::trim(tok)) + "' is not an integer");
      }
      if (*id < 1) throw Error(ErrorCode::LabelOutOfRange, "node ids are 1-based");
      chain.push_back(*id);
      max_label = std::max(max_label, *id);
      if (dash == std::string_view::npos) break;
      pos = dash + 2;
    }
    for (std::size_t i = 1; i < chain.size(); ++i) pairs.emplace_back(chain[i - 1], chain[i]);
  }
  return detail::build(pairs, std::nullopt, max_label);
}

inline GraphFormat format_for_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    auto ext = path.substr(dot);
    if (ext == ".dot" || ext == ".gv") return GraphFormat::Dot;
  }
  return GraphFormat::EdgeList;
}

inline Graph read_graph(const std::string& path, std::optional<GraphFormat> format = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return format.value_or(format_for_path(path)) == GraphFormat::Dot ? parse_dot(in) : parse_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.order() << '\n';
  for (auto [a, b] : g.edges()) out << to_label(a) << ' ' << to_label(b) << '\n';
}

inline void write_dot(std::ostream& out, const Graph& g, std::string_view name = "G") {
  out << "graph " << name << " {\n";
  std::vector<bool> touched(g.order(), false);
  for (auto [a, b] : g.edges()) touched[a] = touched[b] = true;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (!touched[v]) out << "  " << to_label(v) << ";\n";
  }
  for (auto [a, b] : g.edges()) out << "  " << to_label(a) << " -- " << to_label(b) << ";\n";
  out << "}\n";
}

}  // namespace mpcs::io

#endif  // MPCS_GRAPH_IO_HPP
