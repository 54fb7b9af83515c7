// mpcs: MPCS families, minimum leader sets and family reports.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mpcs/mpcs.hpp"

using namespace mpcs;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Loaded {
  Graph graph;
  std::string name;
};

// A path that exists wins over a builtin of the same name.
Loaded load(const std::string& input, const std::string& format) {
  std::optional<io::GraphFormat> fmt;
  if (format == "edgelist") fmt = io::GraphFormat::EdgeList;
  if (format == "dot") fmt = io::GraphFormat::Dot;
  if (std::filesystem::exists(input)) return {io::read_graph(input, fmt), input};
  if (auto g = gen::builtin(input)) return {*g, input};
  throw Error(ErrorCode::ParseError, "no such file or builtin graph: " + input);
}

unsigned env_threads() {
  const char* v = std::getenv("MPCS_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw Error(ErrorCode::InvalidArgument, "MPCS_THREADS must be a non-negative integer");
  return static_cast<unsigned>(n);
}

std::string labels_text(const VertexSet& s) {
  std::string out;
  for (Label l : s.labels()) out += (out.empty() ? "" : " ") + std::to_string(l);
  return out;
}

std::string fmt12(double x, double eps_zero) {
  if (std::abs(x) <= eps_zero) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string rational_text(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

void print_human(std::ostream& out, const AnalysisOutput& a) {
  const auto& r = a.leaders;
  out << "input: " << a.input << " (" << a.graph.order() << " vertices, " << a.graph.edge_count() << " edges)\n";
  out << "mode: " << to_string(a.mode) << "\n";
  out << "MPCS: " << a.family.members.size() << (a.family.complete ? " (complete)" : " (not proven complete)")
      << "\n";
  for (const auto& m : a.family.members) {
    out << "  " << m.set().to_string() << "  lambda=" << fmt12(m.certificate.lambda, 0.0) << "  "
        << to_string(m.provenance) << "\n";
  }
  out << "n_l = " << r.n_l << (r.certified ? " (certified" : " (not certified") << ", bounds " << r.lower_bound
      << ".." << r.upper_bound << ")\n";
  out << "n_s = " << (r.n_s ? r.n_s->str() : "unknown") << (r.n_s && !r.ns_certified ? " (not certified)" : "")
      << "\n";
  out << "N1 = " << rational_text(r.n1()) << "\n";
  out << "N2 = " << (r.n2() ? to_scientific(*r.n2()).to_string() : "unknown") << "\n";
  out << "leader witness: " << r.witness.to_string() << "\n";
  out << "minimum leader sets (" << r.min_sets.size() << (r.min_sets_truncated ? ", truncated" : "") << "):\n";
  for (const auto& s : r.min_sets) out << "  " << s.to_string() << "\n";
  out << "time: " << a.timing_ms << " ms\n";
}

void print_csv(std::ostream& out, const AnalysisOutput& a) {
  const auto& r = a.leaders;
  out << "record,set,detail\n";
  for (const auto& m : a.family.members) {
    out << "mpcs," << labels_text(m.set()) << ",lambda=" << fmt12(m.certificate.lambda, 0.0)
        << ";provenance=" << to_string(m.provenance) << "\n";
  }
  for (const auto& s : r.min_sets) out << "min-set," << labels_text(s) << ",\n";
  out << "summary,,n=" << a.graph.order() << ";n_l=" << r.n_l << ";n_s=" << (r.n_s ? r.n_s->str() : "")
      << ";N1=" << rational_text(r.n1()) << ";N2=" << (r.n2() ? to_scientific(*r.n2()).to_string() : "")
      << ";certified=" << (r.certified ? "true" : "false") << ";complete=" << (a.family.complete ? "true" : "false")
      << "\n";
}

struct ToleranceFlags {
  double eps_group = ToleranceConfig{}.eps_group;
  double eps_zero = ToleranceConfig{}.eps_zero;
  double eps_rank = ToleranceConfig{}.eps_rank;

  void attach(CLI::App* app) {
    app->add_option("--eps-group", eps_group, "Eigenvalue grouping tolerance (relative)");
    app->add_option("--eps-zero", eps_zero, "Entries at or below this are zero");
    app->add_option("--eps-rank", eps_rank, "Relative rank threshold");
  }
  ToleranceConfig config() const {
    ToleranceConfig t{eps_group, eps_zero, eps_rank};
    t.validate();
    return t;
  }
};

int cmd_analyze(const std::string& input, const std::string& format, const std::string& mode,
                std::optional<std::size_t> size_cap, const ToleranceFlags& tol, bool trace,
                const std::string& trace_out, bool json, bool csv, bool per_component, std::size_t max_sets) {
  const Loaded in = load(input, format);
  AnalysisOptions opts;
  opts.mode = mode_from_string(mode);
  opts.size_cap = size_cap;
  opts.tol = tol.config();
  opts.threads = env_threads();
  opts.selection.min_set_cap = max_sets;
  std::vector<AnalysisOutput> outs;
  if (per_component) {
    outs = analyze_components(in.graph, opts, in.name);
  } else {
    outs.push_back(analyze(in.graph, opts, in.name));
  }
  const bool want_trace = trace || !trace_out.empty();
  if (!want_trace) {
    for (auto& o : outs) o.trace.reset();
  }

  if (!trace_out.empty()) {
    std::ofstream f(trace_out);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + trace_out);
    for (const auto& o : outs) {
      if (o.trace) o.trace->write_csv(f);
    }
  }
  if (json) {
    if (per_component) {
      Json arr = Json::array();
      for (const auto& o : outs) arr.push_back(to_json(o));
      std::cout << arr.dump(2) << "\n";
    } else {
      std::cout << to_json_string(outs.front());
    }
    return 0;
  }
  if (trace && trace_out.empty()) {
    for (const auto& o : outs) {
      if (!o.trace) throw Error(ErrorCode::InvalidArgument, "--trace needs tree mode");
      o.trace->write_csv(std::cout);
    }
    return 0;
  }
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (i) std::cout << "\n";
    csv ? print_csv(std::cout, outs[i]) : print_human(std::cout, outs[i]);
  }
  return 0;
}

int cmd_check(const std::string& input, const std::string& format, const std::vector<Label>& leader_labels,
              const ToleranceFlags& tol, bool json) {
  const Loaded in = load(input, format);
  if (leader_labels.empty()) throw Error(ErrorCode::InvalidArgument, "--leaders must list at least one vertex");
  const VertexSet leaders = VertexSet::from_labels(std::span<const Label>(leader_labels));
  in.graph.check(leaders);
  const ToleranceConfig t = tol.config();
  SpectralGraph sg(in.graph, t);
  const ControlVerdict v = sg.controllability(leaders);
  std::optional<CriticalCertificate> mpcs;
  if (v.obstruction) mpcs = extract_mpcs(sg, v.obstruction->set);

  auto witness_json = [&](const Eigen::VectorXd& w) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back(fmt12(w(i), t.eps_zero));
    return arr;
  };
  if (json) {
    Json j;
    j["leaders"] = leaders.labels();
    j["controllable"] = v.controllable;
    if (v.obstruction) {
      j["obstruction"] = {{"set", v.obstruction->set.labels()},
                          {"lambda", detail::round12(v.obstruction->lambda)},
                          {"witness", witness_json(v.obstruction->witness)}};
    }
    if (mpcs) {
      j["mpcs"] = {{"set", mpcs->set.labels()},
                   {"lambda", detail::round12(mpcs->lambda)},
                   {"witness", witness_json(mpcs->witness)}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << (v.controllable ? "controllable" : "uncontrollable") << "\n";
  auto show = [&](const char* title, const CriticalCertificate& c) {
    std::cout << title << ": " << c.set.to_string() << "\n  lambda = " << fmt12(c.lambda, 0.0) << "\n  witness =";
    for (Eigen::Index i = 0; i < c.witness.size(); ++i) std::cout << ' ' << fmt12(c.witness(i), t.eps_zero);
    std::cout << "\n";
  };
  if (v.obstruction) show("obstruction (critical set)", *v.obstruction);
  if (mpcs) show("MPCS inside the obstruction", *mpcs);
  return 0;
}

int cmd_gen(const std::string& family_name, std::optional<std::size_t> g, std::optional<std::size_t> n,
            std::uint64_t seed, const std::string& format, const std::string& output) {
  auto family = gen::family_from_string(family_name);
  if (!family) throw Error(ErrorCode::InvalidArgument, "unknown family '" + family_name + "'");
  std::size_t param = 1;
  switch (*family) {
    case gen::Family::Dsfn:
    case gen::Family::Cayley:
      if (!g) throw Error(ErrorCode::InvalidArgument, family_name + " needs --g");
      param = *g;
      break;
    case gen::Family::Fig1:
    case gen::Family::Fig5: break;
    default:
      if (!n) throw Error(ErrorCode::InvalidArgument, family_name + " needs --n");
      param = *n;
  }
  const Graph graph = gen::generate({*family, param, seed});
  std::ostringstream text;
  if (format == "dot") {
    io::write_dot(text, graph);
  } else {
    io::write_edge_list(text, graph);
  }
  if (output.empty() || output == "-") {
    std::cout << text.str();
  } else {
    std::ofstream f(output);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + output);
    f << text.str();
  }
  return 0;
}

int cmd_report(const std::string& family_name, std::size_t gmax, bool uncertified, bool strict, bool json,
               bool csv) {
  const auto family = gen::family_from_string(family_name);
  const std::size_t limit = family == gen::Family::Dsfn ? 6 : 5;
  if (gmax < 1) throw CLI::ValidationError("--gmax", "must be at least 1");
  if (gmax > limit && !uncertified) {
    throw CLI::ValidationError("--gmax", "above " + std::to_string(limit) + " needs --uncertified");
  }
  AnalysisOptions opts;
  opts.threads = env_threads();
  opts.selection.min_set_cap = 0;
  const auto rows = report(*family, gmax, opts);

  if (json) {
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json row;
      row["g"] = r.g;
      row["n"] = r.n;
      row["n_l"] = r.n_l;
      row["N1"] = {{"num", detail::big_to_json(boost::multiprecision::numerator(r.n1))},
                   {"den", detail::big_to_json(boost::multiprecision::denominator(r.n1))}};
      if (r.n2) {
        auto sci = to_scientific(*r.n2);
        row["N2"] = {{"mantissa", detail::big_to_json(sci.mantissa)}, {"exp", sci.exp}};
      } else {
        row["N2"] = nullptr;
      }
      row["n_s"] = r.n_s ? detail::big_to_json(*r.n_s) : Json(nullptr);
      row["certified"] = r.certified;
      row["n_s_exact"] = r.ns_exact;
      row["complete"] = r.complete;
      row["flags"] = r.flags;
      arr.push_back(std::move(row));
    }
    std::cout << Json{{"family", family_name}, {"rows", std::move(arr)}}.dump(2) << "\n";
  } else if (csv) {
    std::cout << "g,n,n_l,N1,N2,n_s,certified,n_s_exact,complete,flags\n";
    for (const auto& r : rows) {
      std::string flags;
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : "; ") + f;
      std::cout << r.g << ',' << r.n << ',' << r.n_l << ',' << r.n1_text() << ',' << r.n2_text() << ','
                << (r.n_s ? r.n_s->str() : "") << ',' << (r.certified ? "true" : "false") << ','
                << (r.ns_exact ? "true" : "false") << ',' << (r.complete ? "true" : "false") << ",\"" << flags
                << "\"\n";
    }
  } else {
    std::cout << std::left << std::setw(4) << "g" << std::setw(8) << "n" << std::setw(8) << "n_l" << std::setw(10)
              << "N1" << std::setw(14) << "N2" << "notes\n";
    for (const auto& r : rows) {
      std::string flags;
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : "; ") + f;
      std::cout << std::setw(4) << r.g << std::setw(8) << r.n << std::setw(8) << r.n_l << std::setw(10)
                << r.n1_text() << std::setw(14) << (r.n2 ? r.n2_text() : "-") << flags << "\n";
    }
  }
  if (strict && std::any_of(rows.begin(), rows.end(), row_failed_certification)) return kExitNumerical;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal perfect critical sets and minimum leader selection for Laplacian dynamics"};
  app.require_subcommand(1);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "MPCS family and minimum leaders of a graph");
  std::string a_input, a_format = "auto", a_mode = "auto", a_trace_out;
  std::optional<std::size_t> a_cap;
  ToleranceFlags a_tol;
  bool a_trace = false, a_json = false, a_csv = false, a_per_component = false;
  std::size_t a_max_sets = kDefaultMinSetCap;
  analyze_cmd->add_option("input", a_input, "Graph file or builtin (fig1, fig5, path3, dsfn2, cayley3, ...)")
      ->required();
  analyze_cmd->add_option("--mode", a_mode, "auto, exhaustive or tree")
      ->check(CLI::IsMember({"auto", "exhaustive", "tree"}));
  analyze_cmd->add_option("--size-cap", a_cap, "Largest subset size in the exhaustive scan");
  a_tol.attach(analyze_cmd);
  analyze_cmd->add_flag("--trace", a_trace, "Print the classification trace as CSV");
  analyze_cmd->add_option("--trace-out", a_trace_out, "Write the classification trace CSV to a file");
  auto* a_json_opt = analyze_cmd->add_flag("--json", a_json, "JSON output");
  analyze_cmd->add_flag("--csv", a_csv, "CSV output")->excludes(a_json_opt);
  analyze_cmd->add_option("--format", a_format, "Input format")->check(CLI::IsMember({"auto", "edgelist", "dot"}));
  analyze_cmd->add_flag("--per-component", a_per_component, "Analyze each connected component separately");
  analyze_cmd->add_option("--max-sets", a_max_sets, "Largest number of minimum leader sets listed");

  // check
  auto* check_cmd = app.add_subcommand("check", "Test whether a leader set controls the graph");
  std::string c_input, c_format = "auto";
  std::vector<Label> c_leaders;
  ToleranceFlags c_tol;
  bool c_json = false;
  check_cmd->add_option("input", c_input, "Graph file or builtin")->required();
  check_cmd->add_option("--leaders", c_leaders, "Comma-separated leader labels")->required()->delimiter(',');
  check_cmd->add_option("--format", c_format, "Input format")->check(CLI::IsMember({"auto", "edgelist", "dot"}));
  check_cmd->add_flag("--json", c_json, "JSON output");
  c_tol.attach(check_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Write a generated graph");
  std::string g_family, g_format = "edgelist", g_output;
  std::optional<std::size_t> g_g, g_n;
  std::uint64_t g_seed = 1;
  gen_cmd->add_option("family", g_family, "path, star, cycle, fig1, fig5, dsfn, cayley or random-tree")
      ->required()
      ->check(CLI::IsMember({"path", "star", "cycle", "fig1", "fig5", "dsfn", "cayley", "random-tree"}));
  gen_cmd->add_option("--g", g_g, "Generation (dsfn, cayley)");
  gen_cmd->add_option("--n", g_n, "Vertex count (path, star, cycle, random-tree)");
  gen_cmd->add_option("--seed", g_seed, "Seed for random-tree");
  gen_cmd->add_option("--format", g_format, "Output format")->check(CLI::IsMember({"edgelist", "dot"}));
  gen_cmd->add_option("-o,--output", g_output, "Output file (default stdout)");

  // report
  auto* report_cmd = app.add_subcommand("report", "Per-generation n_l, N1 and N2 for dsfn or cayley");
  std::string r_family;
  std::size_t r_gmax = 3;
  bool r_uncertified = false, r_strict = false, r_json = false, r_csv = false;
  report_cmd->add_option("family", r_family, "dsfn or cayley")->required()->check(CLI::IsMember({"dsfn", "cayley"}));
  report_cmd->add_option("--gmax", r_gmax, "Last generation");
  report_cmd->add_flag("--uncertified", r_uncertified, "Allow generations beyond the default range");
  report_cmd->add_flag("--strict", r_strict, "Exit 3 when a row fails certification");
  auto* r_json_opt = report_cmd->add_flag("--json", r_json, "JSON output");
  report_cmd->add_flag("--csv", r_csv, "CSV output")->excludes(r_json_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze_cmd) {
      return cmd_analyze(a_input, a_format, a_mode, a_cap, a_tol, a_trace, a_trace_out, a_json, a_csv,
                         a_per_component, a_max_sets);
    }
    if (*check_cmd) return cmd_check(c_input, c_format, c_leaders, c_tol, c_json);
    if (*gen_cmd) return cmd_gen(g_family, g_g, g_n, g_seed, g_format, g_output);
    if (*report_cmd) return cmd_report(r_family, r_gmax, r_uncertified, r_strict, r_json, r_csv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_numerical() ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
