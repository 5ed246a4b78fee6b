// dstab: delay-stability analysis of reaction networks.
//
// Exit codes: 0 analysis complete (DelayStable for `analyze`), 1 NotDecided or
// PreconditionFailed, 2 input error, 3 internal inconsistency.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dstab/ddesim.hpp"
#include "dstab/dsr.hpp"
#include "dstab/modified.hpp"
#include "dstab/parser.hpp"
#include "dstab/report.hpp"

using namespace dstab;
using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NetworkFile load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_network_file(ss.str());
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) +
                     (e.column() ? ":" + std::to_string(e.column()) : std::string()) + ": " + e.message());
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  return out;
}

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("malformed number '" + s + "'");
  }
  if (used != s.size()) throw InputError("malformed number '" + s + "'");
  return v;
}

// Positional "1,2,3" (one per reaction) or named "k1=1,k2=2" overriding the
// file's bindings. Returns nullopt entries for parameters still unknown.
std::vector<std::optional<double>> parameter_values(const ReactionNetwork& net, const std::string& spec,
                                                    bool delays, const char* flag) {
  const std::size_t m = net.num_reactions();
  std::vector<std::optional<double>> out(m);
  for (std::size_t r = 0; r < m; ++r) {
    out[r] = delays ? net.reaction(r).delay.value : net.reaction(r).rate.value;
  }
  if (spec.empty()) return out;
  const auto items = split(spec, ',');
  const bool named = spec.find('=') != std::string::npos;
  if (!named) {
    if (items.size() != m) {
      throw InputError(std::string(flag) + " expects " + std::to_string(m) + " values, got " +
                       std::to_string(items.size()));
    }
    for (std::size_t r = 0; r < m; ++r) out[r] = to_number(items[r]);
    return out;
  }
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError(std::string(flag) + ": expected name=value, got '" + item + "'");
    const std::string name = split(item.substr(0, eq), ',').front();
    const double v = to_number(split(item.substr(eq + 1), ',').front());
    bool used = false;
    for (std::size_t r = 0; r < m; ++r) {
      const std::string& sym = delays ? net.reaction(r).delay.name : net.reaction(r).rate.name;
      if (sym == name) {
        out[r] = v;
        used = true;
      }
    }
    if (!used) throw InputError(std::string(flag) + ": no reaction uses parameter '" + name + "'");
  }
  return out;
}

Eigen::VectorXd rates(const ReactionNetwork& net, const std::string& spec) {
  const auto vals = parameter_values(net, spec, false, "--kappa");
  Eigen::VectorXd k(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t r = 0; r < vals.size(); ++r) {
    if (!vals[r]) {
      throw InputError("no numeric rate for reaction " + std::to_string(r + 1) + " (" + net.reaction_string(r) +
                       "); bind it in the file or pass --kappa");
    }
    if (!(*vals[r] > 0.0)) throw InputError("rate constants must be positive");
    k(static_cast<Eigen::Index>(r)) = *vals[r];
  }
  return k;
}

// Reactions without a delay value are instantaneous.
Eigen::VectorXd delays(const ReactionNetwork& net, const std::string& spec) {
  const auto vals = parameter_values(net, spec, true, "--tau");
  Eigen::VectorXd t(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t r = 0; r < vals.size(); ++r) {
    const double v = vals[r].value_or(0.0);
    if (!(v >= 0.0)) throw InputError("delays must be nonnegative");
    t(static_cast<Eigen::Index>(r)) = v;
  }
  return t;
}

Eigen::VectorXd vector_arg(const std::string& spec, std::size_t n, const char* flag) {
  const auto items = split(spec, ',');
  if (items.size() == 1 && n != 1) return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), to_number(items[0]));
  if (items.size() != n) {
    throw InputError(std::string(flag) + " expects 1 or " + std::to_string(n) + " values");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = to_number(items[i]);
  return v;
}

void print_structural(const ReactionNetwork& net, const ConditionReport& c) {
  auto mark = [](bool b) { return b ? "yes" : "no"; };
  std::cout << net.num_species() << " species, " << net.num_reactions() << " reactions\n";
  std::cout << "N1  every species has a generalized outflow: " << mark(c.n1);
  if (!c.n1) {
    std::cout << " (missing:";
    for (auto i : c.species_without_outflow) std::cout << " " << net.species()[i].name;
    std::cout << ")";
  }
  std::cout << "\nN1' determinant condition: " << to_string(c.n1_prime);
  if (c.n1_prime == Verdict3::True) {
    std::cout << " (reactions";
    for (auto r : c.n1_prime_subset) std::cout << " " << r + 1;
    std::cout << ", product " << to_string(c.n1_prime_product) << ")";
  }
  std::cout << "\nN2  no one-step catalysis: " << mark(c.n2);
  if (c.one_step_catalysis_witness) std::cout << " (" << net.reaction_string(*c.one_step_catalysis_witness) << ")";
  std::cout << "\nN3  at most two reactant species: " << mark(c.n3);
  if (c.too_many_reactants_witness) std::cout << " (" << net.reaction_string(*c.too_many_reactants_witness) << ")";
  std::cout << "\nN4  bispecies reactions irreversible: " << mark(c.n4);
  if (c.reversible_bispecies_witness) std::cout << " (" << net.reaction_string(*c.reversible_bispecies_witness) << ")";
  std::cout << "\nnon-autocatalytic: " << mark(c.non_autocatalytic) << "\n";
}

json scan_json(const RootScanResult& s) {
  json roots = json::array();
  for (std::size_t i = 0; i < s.roots.size(); ++i) {
    roots.push_back({{"re", s.roots[i].real()}, {"im", s.roots[i].imag()}, {"residual", s.residuals[i]}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"rect", {s.rect.re_min, s.rect.re_max, s.rect.im_min, s.rect.im_max}},
          {"winding", s.winding},
          {"roots", roots},
          {"boundary_points", s.boundary_points},
          {"retries", s.retries}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-stability analysis of chemical reaction networks"};
  app.require_subcommand(1);

  std::string file;
  std::string json_out, dot_out, csv_out, crn_out;
  std::string kappa_spec, tau_spec, history_spec, rect_spec, xstar_spec;
  std::size_t numeric_samples = 0, simulate_runs = 0;
  std::uint64_t seed = 1, cycle_budget = 1'000'000, n1_budget = 1'000'000;
  bool modified = false;
  double t_end = 10.0, dt = 0.01;

  auto* validate = app.add_subcommand("validate", "Parse a network and report conditions N1-N4");
  validate->add_option("file", file, "network file (.crn)")->required();

  auto* analyze = app.add_subcommand("analyze", "Decide delay stability from the DSR graph");
  analyze->add_option("file", file, "network file (.crn)")->required();
  analyze->add_option("--numeric-samples", numeric_samples, "P0 samples of -J and -J~");
  analyze->add_option("--simulate", simulate_runs, "number of DDE / root-scan spot checks");
  analyze->add_option("--seed", seed, "random seed");
  analyze->add_option("--json", json_out, "write the JSON report here ('-' for stdout)");
  analyze->add_option("--cycle-budget", cycle_budget, "maximum number of oriented cycles");
  analyze->add_option("--n1-budget", n1_budget, "maximum reaction subsets examined for N1'");

  auto* dsr = app.add_subcommand("dsr", "Export the DSR graph in DOT format");
  dsr->add_option("file", file, "network file (.crn)")->required();
  dsr->add_flag("--modified", modified, "use the modified network");
  dsr->add_option("--dot", dot_out, "DOT output (default stdout)");
  dsr->add_option("--json", json_out, "cycle report");

  auto* mod = app.add_subcommand("modified", "Write the modified network");
  mod->add_option("file", file, "network file (.crn)")->required();
  mod->add_option("-o,--output", crn_out, "modified network (.crn, default stdout)");
  mod->add_option("--json", json_out, "rate formula sidecar");

  auto* sim = app.add_subcommand("simulate", "Integrate the delay system");
  sim->add_option("file", file, "network file (.crn)")->required();
  sim->add_option("--kappa", kappa_spec, "rates: v1,v2,... or name=value,...");
  sim->add_option("--tau", tau_spec, "delays: v1,v2,... or name=value,...");
  sim->add_option("--history", history_spec, "const:v or const:v1,...,vn (default: 1.1 x equilibrium)");
  sim->add_option("--t-end", t_end, "final time");
  sim->add_option("--dt", dt, "base step");
  sim->add_option("--seed", seed, "accepted for uniformity; simulation is deterministic");
  sim->add_option("--csv", csv_out, "CSV output (default stdout)");

  auto* roots = app.add_subcommand("roots", "Scan characteristic roots in a rectangle");
  roots->add_option("file", file, "network file (.crn)")->required();
  roots->add_option("--kappa", kappa_spec, "rates: v1,v2,... or name=value,...");
  roots->add_option("--tau", tau_spec, "delays: v1,v2,... or name=value,...");
  roots->add_option("--x-star", xstar_spec, "linearization point (default: equilibrium)");
  roots->add_option("--rect", rect_spec, "re_min,re_max,im_min,im_max (default 0,50,0,200)");
  roots->add_option("--seed", seed, "accepted for uniformity; the scan is deterministic");
  roots->add_option("--json", json_out, "JSON output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const NetworkFile nf = load(file);
    const ReactionNetwork& net = nf.network;

    if (*validate) {
      print_structural(net, check_structural_conditions(net));
      if (!nf.free_parameters.empty()) {
        std::cout << "free parameters:";
        for (const auto& p : nf.free_parameters) std::cout << " " << p;
        std::cout << "\n";
      }
      return 0;
    }

    if (*analyze) {
      AnalysisOptions opts;
      opts.numeric_samples = numeric_samples;
      opts.simulate_runs = simulate_runs;
      opts.seed = seed;
      opts.cycle_budget = cycle_budget;
      opts.n1_prime_budget = n1_budget;
      const StabilityReport rep = analyze_network(net, opts);
      if (json_out == "-") {
        std::cout << report_to_json(rep) << "\n";
      } else {
        std::cout << report_to_text(rep);
        if (!json_out.empty()) write_output(json_out, report_to_json(rep) + "\n");
      }
      if (!rep.internal_error.empty()) return 3;
      return rep.verdict == VerdictKind::DelayStable ? 0 : 1;
    }

    if (*dsr) {
      const ReactionNetwork target = modified ? build_modified_network(net).network : net;
      const DsrGraph g = build_dsr(target);
      const auto cycles = enumerate_cycles(g, cycle_budget);
      DotOptions dopts;
      dopts.name = modified ? "modified_dsr" : "dsr";
      write_output(dot_out, export_dot(g, dopts));
      if (!json_out.empty()) {
        json list = json::array();
        for (const auto& group : group_by_edge_set(cycles)) {
          const auto& c = cycles[group.front()];
          list.push_back({{"path", cycle_string(g, c)},
                          {"edges", c.edge_set()},
                          {"orientations", group.size()},
                          {"c_pairs", c.c_pairs},
                          {"e_cycle", c.e_cycle()},
                          {"s_cycle", c.s_cycle()},
                          {"alternating_product", to_string(c.alternating_product)},
                          {"bispecies_production_edge", c.has_bpe}});
        }
        json pairs = json::array();
        for (std::size_t i = 0; i < cycles.size(); ++i) {
          for (std::size_t j = i + 1; j < cycles.size(); ++j) {
            if (s_to_r_intersection(cycles[i], cycles[j]) || s_to_r_intersection(cycles[j], cycles[i])) {
              pairs.push_back({cycle_string(g, cycles[i]), cycle_string(g, cycles[j])});
            }
          }
        }
        json out = {{"schema_version", kReportSchemaVersion},
                    {"snodes", g.num_snodes()},
                    {"rnodes", g.rnodes.size()},
                    {"edges", g.edges.size()},
                    {"cycles", list},
                    {"s_to_r_pairs", pairs}};
        write_output(json_out, out.dump(2) + "\n");
      }
      return 0;
    }

    if (*mod) {
      const ModifiedNetwork m = build_modified_network(net);
      write_output(crn_out, serialize_network(m.network));
      if (!json_out.empty()) {
        json formulas = json::array();
        for (std::size_t r = 0; r < m.rate_formulas.size(); ++r) {
          const auto& f = m.rate_formulas[r];
          json exps = json::object();
          for (std::size_t k = 0; k < f.exponents.size(); ++k) {
            if (f.exponents[k] != 0) exps[net.species()[k].name] = to_string(f.exponents[k]);
          }
          formulas.push_back({{"reaction", m.network.reaction_string(r)},
                              {"rate", m.network.reaction(r).rate.name},
                              {"parent", f.parent + 1},
                              {"parent_rate", net.reaction(f.parent).rate.name},
                              {"pivot", f.pivot ? json(net.species()[*f.pivot].name) : json(nullptr)},
                              {"x_star_exponents", exps}});
        }
        json dups = json::array();
        for (const auto& [a, b] : m.duplicates) dups.push_back({a + 1, b + 1});
        write_output(json_out, json{{"schema_version", kReportSchemaVersion},
                                    {"rate_formulas", formulas},
                                    {"duplicates", dups}}
                                       .dump(2) +
                                   "\n");
      }
      return 0;
    }

    const Eigen::VectorXd kappa = rates(net, kappa_spec);
    const Eigen::VectorXd tau = delays(net, tau_spec);
    const auto n = net.num_species();

    if (*sim) {
      Eigen::VectorXd start;
      if (history_spec.empty()) {
        start = 1.1 * find_equilibrium(net, kappa, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
      } else {
        if (history_spec.rfind("const:", 0) != 0) throw InputError("--history must be const:v or const:v1,...");
        start = vector_arg(history_spec.substr(6), n, "--history");
        if (start.size() && start.minCoeff() < 0.0) throw InputError("history must be nonnegative");
      }
      const Trajectory tr = simulate_dde(net, kappa, tau, [start](double) { return start; }, t_end, dt);
      std::ostringstream os;
      os.precision(17);
      os << "t";
      for (const auto& s : net.species()) os << "," << s.name;
      os << "\n";
      for (std::size_t i = 0; i < tr.t.size(); ++i) {
        os << tr.t[i];
        for (Eigen::Index k = 0; k < tr.x[i].size(); ++k) os << "," << tr.x[i](k);
        os << "\n";
      }
      write_output(csv_out, os.str());
      return 0;
    }

    if (*roots) {
      const Eigen::VectorXd x_star =
          xstar_spec.empty() ? find_equilibrium(net, kappa, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)))
                             : vector_arg(xstar_spec, n, "--x-star");
      Rect rect{0.0, 50.0, 0.0, 200.0};
      if (!rect_spec.empty()) {
        const auto v = split(rect_spec, ',');
        if (v.size() != 4) throw InputError("--rect expects re_min,re_max,im_min,im_max");
        rect = {to_number(v[0]), to_number(v[1]), to_number(v[2]), to_number(v[3])};
      }
      const RootScanResult s = scan_characteristic_roots(net, x_star, kappa, tau, rect);
      write_output(json_out, scan_json(s).dump(2) + "\n");
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StructuralMismatch& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const CycleBudgetExceeded& e) {
    std::cerr << "not decided: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
