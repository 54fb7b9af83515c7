#ifndef MPCS_ANALYSIS_HPP
#define MPCS_ANALYSIS_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpcs/criticality.hpp"
#include "mpcs/generators.hpp"
#include "mpcs/graph.hpp"
#include "mpcs/leader_select.hpp"
#include "mpcs/tree_rules.hpp"

namespace mpcs {

/// Recognizers is never requested: auto picks it for non-tree graphs too
/// large for the exhaustive scan, starting from the twin pairs alone.
enum class Mode { Auto, Exhaustive, Tree, Recognizers };

constexpr std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Auto: return "auto";
    case Mode::Exhaustive: return "exhaustive";
    case Mode::Tree: return "tree";
    case Mode::Recognizers: return "recognizers";
  }
  return "auto";
}

inline Mode mode_from_string(std::string_view s) {
  if (s == "auto") return Mode::Auto;
  if (s == "exhaustive") return Mode::Exhaustive;
  if (s == "tree") return Mode::Tree;
  if (s == "recognizers") return Mode::Recognizers;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(s) + "'");
}

struct AnalysisOptions {
  Mode mode = Mode::Auto;
  /// Subset-size cap for the exhaustive scan; unset means default_size_cap(n).
  std::optional<std::size_t> size_cap;
  ToleranceConfig tol;
  unsigned threads = 0;
  std::uint64_t seed = kDefaultWitnessSeed;
  ClosureOptions closure;
  SelectionOptions selection;
};

struct AnalysisOutput {
  std::string input;
  Mode mode = Mode::Exhaustive;
  Graph graph;
  MpcsFamily family;
  LeaderReport leaders;
  ToleranceConfig tol;
  double timing_ms = 0.0;
  std::optional<ClassificationTrace> trace;
};

/// Full scan up to 18 vertices; beyond that the largest cap whose subset
/// count stays within 2^22.
inline std::size_t default_size_cap(std::size_t n) {
  if (n <= kExhaustiveDefaultLimit) return n;
  BigInt total = 0;
  std::size_t k = 0;
  while (k < n) {
    total += binomial(n, k + 1);
    if (total > BigInt(1) << 22) break;
    ++k;
  }
  return std::max<std::size_t>(k, 1);
}

namespace detail {

inline void relabel_theorem7(const Graph& g, MpcsFamily& family) {
  for (auto& m : family.members) {
    if (m.provenance != Provenance::Propagation) continue;
    try {
      if (theorem7_check(g, m.set())) m.provenance = Provenance::Theorem7;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PreconditionUnmet) throw;
    }
  }
}

}  // namespace detail

/// MPCS family and minimum leaders of a connected graph. Trees go through
/// twin pairs and propagation, other graphs through the exhaustive scan; in
/// both cases an incomplete family is then closed, or extended, through its
/// minimal transversals.
inline AnalysisOutput analyze(const Graph& g, const AnalysisOptions& opts = {}, std::string input = {}) {
  const auto start = std::chrono::steady_clock::now();
  opts.tol.validate();
  require_connected(g);
  if (g.order() == 0) throw Error(ErrorCode::InvalidArgument, "empty graph");
  SpectralGraph sg(g, opts.tol, opts.seed);

  AnalysisOutput out;
  out.input = std::move(input);
  out.graph = g;
  out.tol = opts.tol;
  out.mode = opts.mode;
  if (out.mode == Mode::Auto) {
    out.mode = is_tree(g) ? Mode::Tree : g.order() <= kMaskBits ? Mode::Exhaustive : Mode::Recognizers;
  }

  if (out.mode == Mode::Tree) {
    auto prop = propagate_classification(sg);
    out.family = std::move(prop.family);
    out.trace = std::move(prop.trace);
    detail::relabel_theorem7(g, out.family);
  } else if (out.mode == Mode::Recognizers) {
    out.family = twin_pair_mpcs(g);
  } else {
    EnumerationOptions eo;
    eo.size_cap = opts.size_cap.value_or(default_size_cap(g.order()));
    eo.threads = opts.threads;
    out.family = enumerate_mpcs_exhaustive(sg, eo);
  }
  close_family(sg, out.family, opts.closure);
  out.family.sort();
  out.leaders = select_leaders(sg, out.family, opts.selection);
  out.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.timing_ms = std::round(out.timing_ms * 1000.0) / 1000.0;
  return out;
}

/// One analysis per connected component, each with local labels.
inline std::vector<AnalysisOutput> analyze_components(const Graph& g, const AnalysisOptions& opts = {},
                                                      const std::string& input = {}) {
  std::vector<AnalysisOutput> out;
  const auto comps = components(g);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto sub = induced_subgraph(g, comps[i]);
    out.push_back(analyze(sub.graph, opts, input + " component " + std::to_string(i + 1) + " " +
                                               comps[i].to_string()));
  }
  return out;
}

// JSON ---------------------------------------------------------------------

using Json = nlohmann::ordered_json;

namespace detail {

inline Json big_to_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return Json(v.convert_to<std::uint64_t>());
  return Json(v.str());
}

inline BigInt big_from_json(const Json& j) {
  if (j.is_string()) return BigInt(j.get<std::string>());
  return BigInt(j.get<std::uint64_t>());
}

inline Json set_to_json(const VertexSet& s) { return Json(s.labels()); }

inline VertexSet set_from_json(const Json& j) { return VertexSet::from_labels(j.get<std::vector<Label>>()); }

// Eigenvalues carry 12 significant digits in the output.
inline double round12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Verdict verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::InS, Verdict::InSbar, Verdict::Undetermined, Verdict::Mpcs, Verdict::Conflict}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::ParseError, "unknown verdict '" + std::string(s) + "'");
}

}  // namespace detail

inline Json to_json(const AnalysisOutput& a) {
  Json j;
  j["version"] = "v1";
  j["input"] = a.input;
  j["mode"] = std::string(to_string(a.mode));
  Json edges = Json::array();
  for (auto [u, v] : a.graph.edges()) edges.push_back({to_label(u), to_label(v)});
  j["graph"] = {{"n", a.graph.order()}, {"edges", std::move(edges)}};

  Json mpcs = Json::array();
  for (const auto& m : a.family.members) {
    mpcs.push_back({{"set", detail::set_to_json(m.set())},
                    {"lambda", detail::round12(m.certificate.lambda)},
                    {"provenance", std::string(to_string(m.provenance))}});
  }
  j["mpcs"] = std::move(mpcs);
  j["complete"] = a.family.complete;
  j["search_cap"] = a.family.search_cap;

  const auto& r = a.leaders;
  Json leaders;
  leaders["n_l"] = r.n_l;
  leaders["n_s"] = r.n_s ? detail::big_to_json(*r.n_s) : Json(nullptr);
  leaders["n_s_exact"] = r.ns_certified;
  const Rational n1 = r.n1();
  leaders["N1"] = {{"num", detail::big_to_json(boost::multiprecision::numerator(n1))},
                   {"den", detail::big_to_json(boost::multiprecision::denominator(n1))}};
  if (auto n2 = r.n2()) {
    auto sci = to_scientific(*n2);
    leaders["N2"] = {{"mantissa", detail::big_to_json(sci.mantissa)}, {"exp", sci.exp}};
  } else {
    leaders["N2"] = nullptr;
  }
  leaders["lower_bound"] = r.lower_bound;
  leaders["upper_bound"] = r.upper_bound;
  leaders["transversal_number"] = r.transversal_number;
  leaders["witness"] = detail::set_to_json(r.witness);
  leaders["min_sets_truncated"] = r.min_sets_truncated;
  Json sets = Json::array();
  for (const auto& s : r.min_sets) sets.push_back(detail::set_to_json(s));
  leaders["min_sets"] = std::move(sets);
  j["leaders"] = std::move(leaders);
  j["certified"] = r.certified;
  j["tolerances"] = {{"eps_group", a.tol.eps_group}, {"eps_zero", a.tol.eps_zero}, {"eps_rank", a.tol.eps_rank}};
  j["timing_ms"] = a.timing_ms;
  if (a.trace) {
    Json rows = Json::array();
    for (const auto& s : a.trace->steps) {
      Json refs = Json::array();
      for (Vertex v : s.refs) refs.push_back(to_label(v));
      rows.push_back({{"seed", to_label(s.seed)},
                      {"vertex", s.vertex ? Json(to_label(*s.vertex)) : Json(nullptr)},
                      {"rule", s.rule},
                      {"verdict", std::string(to_string(s.verdict))},
                      {"refs", std::move(refs)}});
    }
    j["trace"] = std::move(rows);
  }
  return j;
}

inline std::string to_json_string(const AnalysisOutput& a) { return to_json(a).dump(2) + "\n"; }

inline AnalysisOutput analysis_from_json(const Json& j) {
  try {
    if (j.at("version") != "v1") throw Error(ErrorCode::ParseError, "unsupported version");
    AnalysisOutput a;
    a.input = j.at("input").get<std::string>();
    a.mode = mode_from_string(j.at("mode").get<std::string>());
    std::vector<std::pair<Label, Label>> edges;
    for (const auto& e : j.at("graph").at("edges")) edges.emplace_back(e.at(0).get<Label>(), e.at(1).get<Label>());
    a.graph = Graph::from_edge_list(edges, j.at("graph").at("n").get<std::size_t>());

    for (const auto& m : j.at("mpcs")) {
      CriticalCertificate c{detail::set_from_json(m.at("set")), m.at("lambda").get<double>(), {},
                            CertificateKind::PerfectCritical};
      const auto prov = m.at("provenance").get<std::string>();
      auto p = provenance_from_string(prov);
      if (!p) throw Error(ErrorCode::ParseError, "unknown provenance '" + prov + "'");
      a.family.members.push_back(MpcsEntry{std::move(c), *p});
    }
    a.family.complete = j.at("complete").get<bool>();
    a.family.search_cap = j.at("search_cap").get<std::size_t>();

    const auto& l = j.at("leaders");
    auto& r = a.leaders;
    r.n = a.graph.order();
    r.n_l = l.at("n_l").get<std::size_t>();
    if (!l.at("n_s").is_null()) r.n_s = detail::big_from_json(l.at("n_s"));
    r.ns_certified = l.at("n_s_exact").get<bool>();
    r.lower_bound = l.at("lower_bound").get<std::size_t>();
    r.upper_bound = l.at("upper_bound").get<std::size_t>();
    r.transversal_number = l.at("transversal_number").get<std::size_t>();
    r.witness = detail::set_from_json(l.at("witness"));
    r.min_sets_truncated = l.at("min_sets_truncated").get<bool>();
    for (const auto& s : l.at("min_sets")) r.min_sets.push_back(detail::set_from_json(s));
    r.certified = j.at("certified").get<bool>();

    const auto& t = j.at("tolerances");
    a.tol = {t.at("eps_group").get<double>(), t.at("eps_zero").get<double>(), t.at("eps_rank").get<double>()};
    a.timing_ms = j.at("timing_ms").get<double>();
    if (j.contains("trace")) {
      ClassificationTrace trace;
      auto idx = [](const Json& v) { return static_cast<Vertex>(v.get<Label>() - 1); };
      for (const auto& row : j.at("trace")) {
        TraceStep s;
        s.seed = idx(row.at("seed"));
        if (!row.at("vertex").is_null()) s.vertex = idx(row.at("vertex"));
        s.rule = row.at("rule").get<std::string>();
        s.verdict = detail::verdict_from_string(row.at("verdict").get<std::string>());
        for (const auto& v : row.at("refs")) s.refs.push_back(idx(v));
        trace.steps.push_back(std::move(s));
      }
      a.trace = std::move(trace);
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed analysis JSON: ") + e.what());
  }
}

inline AnalysisOutput parse_analysis_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return analysis_from_json(j);
}

// Family reports -------------------------------------------------------------

/// Values printed in the published table, kept for comparison.
struct PublishedRow {
  std::size_t n_l = 0;
  Rational n1;
  /// N2 as printed: exact when the table gives a fraction, else five digits.
  std::optional<Rational> n2_exact;
  std::optional<Scientific> n2_sci;
};

inline std::optional<PublishedRow> published_row(gen::Family family, std::size_t g) {
  using gen::Family;
  if (family == Family::Cayley) {
    switch (g) {
      case 1: return PublishedRow{2, Rational(1, 2), Rational(1, 2), std::nullopt};
      case 2: return PublishedRow{3, Rational(3, 10), Rational(1, 15), std::nullopt};
      case 3: return PublishedRow{6, Rational(3, 11), std::nullopt, Scientific{85776, -8}};
      case 4: return PublishedRow{12, Rational(6, 23), std::nullopt, Scientific{10527, -11}};
      case 5: return PublishedRow{26, Rational(23, 47), std::nullopt, Scientific{22685, -18}};
      default: return std::nullopt;
    }
  }
  if (family == Family::Dsfn && g >= 1) {
    // n_l = 3^(g-1) over n = 3^g vertices, with 2^(n_l) minimum sets.
    std::size_t n_l = 1;
    for (std::size_t i = 1; i < g; ++i) n_l *= 3;
    const Metrics m = metrics(3 * n_l, n_l, BigInt(1) << n_l);
    return PublishedRow{n_l, m.n1, m.n2, std::nullopt};
  }
  return std::nullopt;
}

struct ReportRow {
  std::size_t g = 0;
  std::size_t n = 0;
  std::size_t n_l = 0;
  Rational n1;
  std::optional<BigInt> n_s;
  std::optional<Rational> n2;
  bool certified = false;
  bool ns_exact = false;
  bool complete = false;
  std::size_t lower_bound = 0;
  double timing_ms = 0.0;
  /// Certification gaps and disagreements with the published values.
  std::vector<std::string> flags;

  std::string n1_text() const {
    return boost::multiprecision::numerator(n1).str() + "/" + boost::multiprecision::denominator(n1).str();
  }
  std::string n2_text() const { return n2 ? to_scientific(*n2).to_string() : std::string(); }
};

inline bool row_failed_certification(const ReportRow& r) { return !r.certified; }

inline ReportRow report_row(gen::Family family, std::size_t g, const AnalysisOptions& opts = {}) {
  const Graph graph = gen::generate({family, g, 0});
  const AnalysisOutput a = analyze(graph, opts, std::string(gen::to_string(family)) + std::to_string(g));
  ReportRow row;
  row.g = g;
  row.n = graph.order();
  row.n_l = a.leaders.n_l;
  row.n1 = a.leaders.n1();
  row.n_s = a.leaders.n_s;
  row.n2 = a.leaders.n2();
  row.certified = a.leaders.certified;
  row.ns_exact = a.leaders.ns_certified;
  row.complete = a.family.complete;
  row.lower_bound = a.leaders.lower_bound;
  row.timing_ms = a.timing_ms;

  if (!row.certified) {
    row.flags.push_back("uncertified: bounds " + std::to_string(row.lower_bound) + ".." + std::to_string(row.n_l));
  }
  if (!row.ns_exact) row.flags.push_back("n_s not certified");
  if (auto p = published_row(family, g)) {
    if (p->n_l != row.n_l) row.flags.push_back("n_l differs from published " + std::to_string(p->n_l));
    if (p->n1 != row.n1) {
      row.flags.push_back("N1 differs from published " + boost::multiprecision::numerator(p->n1).str() + "/" +
                          boost::multiprecision::denominator(p->n1).str());
    }
    if (row.n2 && p->n2_exact && *p->n2_exact != *row.n2) {
      row.flags.push_back("N2 differs from published " + to_scientific(*p->n2_exact).to_string());
    }
    if (row.n2 && p->n2_sci && !(*p->n2_sci == to_scientific(*row.n2))) {
      row.flags.push_back("N2 differs from published " + p->n2_sci->to_string());
    }
  }
  return row;
}

inline std::vector<ReportRow> report(gen::Family family, std::size_t gmax, const AnalysisOptions& opts = {}) {
  if (family != gen::Family::Dsfn && family != gen::Family::Cayley) {
    throw Error(ErrorCode::InvalidArgument, "reports cover dsfn and cayley only");
  }
  std::vector<ReportRow> rows;
  for (std::size_t g = 1; g <= gmax; ++g) rows.push_back(report_row(family, g, opts));
  return rows;
}

}  // namespace mpcs

#endif  // MPCS_ANALYSIS_HPP
