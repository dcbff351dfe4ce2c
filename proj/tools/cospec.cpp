// Command-line front end. Exit codes: 0 success, 2 validation error,
// 3 resource-cap error, 1 anything else (I/O).

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cospec/cospec.hpp"

namespace {

using cospec::Config;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cospec::ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const ordered_json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    cospec::write_text_file(out, j.dump(2) + "\n");
  }
}

// Generators are given comma-separated on the command line.
std::vector<cospec::Word> parse_gens(std::string text, int rank) {
  std::replace(text.begin(), text.end(), ',', '\n');
  return cospec::parse_generator_list(text, rank);
}

std::vector<cospec::PointId> parse_points(const std::string& text) {
  std::vector<cospec::PointId> out;
  for (auto x : cospec::parse_site_set(text)) out.push_back(static_cast<cospec::PointId>(x));
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw cospec::ValidationError("bad number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-spectral radius toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // --out and --seed may follow the subcommand
  std::string out;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "write the result to this file (experiments: path prefix)");
  app.add_option("--seed", seed, "random seed");

  // ball
  auto* ball_cmd = app.add_subcommand("ball", "generate a Schreier ball and print its summary");
  std::string oracle_spec;
  int radius = 2;
  std::string dot_path;
  ball_cmd->add_option("--oracle", oracle_spec, "oracle specification")->required();
  ball_cmd->add_option("--radius", radius, "ball radius");
  ball_cmd->add_option("--dot", dot_path, "also write the ball as DOT");

  // spectral
  auto* spectral_cmd = app.add_subcommand("spectral", "lower bounds for the co-spectral radius");
  std::string method = "dirichlet";
  int steps = 10;
  double tol = 1e-10;
  spectral_cmd->add_option("--oracle", oracle_spec, "oracle specification")->required();
  spectral_cmd->add_option("--radius", radius, "ball radius (dirichlet) or truncation radius (return)");
  spectral_cmd->add_option("--method", method, "dirichlet or return")->check(CLI::IsMember({"dirichlet", "return"}));
  spectral_cmd->add_option("--n", steps, "half the number of steps for the return-probability bound");
  spectral_cmd->add_option("--tol", tol, "power-iteration tolerance");

  // intersect
  auto* intersect_cmd = app.add_subcommand("intersect", "intersect two subgroups of a free group");
  int rank = 2;
  std::string gens1, gens2;
  intersect_cmd->add_option("--rank", rank, "rank of the free group");
  intersect_cmd->add_option("--h1", gens1, "comma-separated generators of H1")->required();
  intersect_cmd->add_option("--h2", gens2, "comma-separated generators of H2")->required();
  intersect_cmd->add_option("--dot", dot_path, "write the intersection automaton as DOT");

  // cogrowth
  auto* cogrowth_cmd = app.add_subcommand("cogrowth", "cogrowth and critical exponent of a subgroup of F_d");
  cogrowth_cmd->add_option("--rank", rank, "rank of the free group");
  cogrowth_cmd->add_option("--gens", gens1, "comma-separated generators")->required();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a random subgroup sample");
  sample_cmd->require_subcommand(1);
  auto* perc_cmd = sample_cmd->add_subcommand("percolation", "Bernoulli percolation subset of [-W, W]");
  double p = 0.5;
  long long window = 1000;
  perc_cmd->add_option("--p", p, "site density");
  perc_cmd->add_option("--window", window, "window half-width W");
  auto* perm_cmd = sample_cmd->add_subcommand("permutation", "uniform random permutations of [N]");
  int points = 50;
  perm_cmd->add_option("--N", points, "number of points");
  perm_cmd->add_option("--d", rank, "number of permutations");

  // graphing
  auto* graphing_cmd = app.add_subcommand("graphing", "finite measure-preserving graphings");
  graphing_cmd->require_subcommand(1);
  std::string graphing_file;
  auto* mtp_cmd = graphing_cmd->add_subcommand("mtp", "mass transport check");
  std::string kernel = "edge";
  mtp_cmd->add_option("--file", graphing_file, "graphing text file")->required();
  mtp_cmd->add_option("--kernel", kernel, "edge, ones or random")->check(CLI::IsMember({"edge", "ones", "random"}));
  auto* rokhlin_cmd = graphing_cmd->add_subcommand("rokhlin", "Rokhlin-type partition");
  double delta = 0.1;
  int class_cap = cospec::kDefaultRokhlinClassCap;
  rokhlin_cmd->add_option("--file", graphing_file, "graphing text file")->required();
  rokhlin_cmd->add_option("--delta", delta, "relative weight allowed in B");
  rokhlin_cmd->add_option("--class-cap", class_cap, "class budget per map");
  auto* embedded_cmd = graphing_cmd->add_subcommand("embedded", "embedded spectral radius of a point set");
  std::string set_text;
  embedded_cmd->add_option("--file", graphing_file, "graphing text file")->required();
  embedded_cmd->add_option("--set", set_text, "points, e.g. 0..6+9")->required();
  auto* testfn_cmd = graphing_cmd->add_subcommand("testfn", "product test function on a Schreier window times a graphing");
  std::string values_text, component_text, x1_spec;
  int folner_radius = -1;
  testfn_cmd->add_option("--file", graphing_file, "graphing text file for X2 (total maps)")->required();
  testfn_cmd->add_option("--x1", x1_spec, "oracle specification for X1")->required();
  testfn_cmd->add_option("--radius", radius, "radius of the X1 window");
  testfn_cmd->add_option("--folner-radius", folner_radius, "F = ball of this radius (default: Folner search)");
  testfn_cmd->add_option("--values", values_text, "comma-separated values of f2")->required();
  testfn_cmd->add_option("--component", component_text, "component P2, e.g. 0..1")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run a configured experiment");
  std::string exp_name, config_path;
  int radius_override = -1;
  exp_cmd->add_option("name", exp_name, "main_theorem, sup_conjugates, wreath_counterexample or cogrowth_sweep")->required();
  exp_cmd->add_option("--config", config_path, "key = value config file")->required();
  exp_cmd->add_option("--radius", radius_override, "override the config radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ball_cmd) {
      const auto oracle = cospec::make_oracle(oracle_spec, seed);
      const auto ball = cospec::generate_ball(*oracle, radius);
      if (!dot_path.empty()) cospec::write_text_file(dot_path, cospec::to_dot(ball, *oracle));
      emit(cospec::ball_summary(ball), out);
    } else if (*spectral_cmd) {
      const auto oracle = cospec::make_oracle(oracle_spec, seed);
      if (method == "dirichlet") {
        emit(cospec::dirichlet_lower_bound(cospec::generate_ball(*oracle, radius), tol).to_json(), out);
      } else {
        const int truncation = spectral_cmd->count("--radius") ? radius : -1;
        emit(cospec::return_probability_bound(*oracle, steps, truncation).to_json(), out);
      }
    } else if (*intersect_cmd) {
      const auto a1 = cospec::build_automaton(parse_gens(gens1, rank), rank);
      const auto a2 = cospec::build_automaton(parse_gens(gens2, rank), rank);
      const auto meet = cospec::intersect_automata(a1, a2);
      if (!dot_path.empty()) cospec::write_text_file(dot_path, cospec::to_dot(meet));
      ordered_json j;
      j["states"] = meet.num_states();
      const auto index = cospec::subgroup_index(meet);
      j["index"] = index ? ordered_json(*index) : ordered_json("infinite");
      j["generators"] = ordered_json::array();
      for (const auto& w : cospec::subgroup_generators(meet)) j["generators"].push_back(cospec::to_string(w));
      emit(j, out);
    } else if (*cogrowth_cmd) {
      const auto a = cospec::build_automaton(parse_gens(gens1, rank), rank);
      const auto c = cospec::cogrowth_rate(a);
      ordered_json j;
      j["alpha"] = c.alpha;
      const auto d = cospec::critical_exponent(c);
      j["delta"] = d ? ordered_json(*d) : ordered_json("undefined");
      j["iterations"] = c.iterations;
      j["residual"] = c.residual;
      j["converged"] = c.converged;
      if (rank >= 2) j["rho"] = cospec::grigorchuk_rho(std::min(c.alpha, 2.0 * rank - 1), rank);
      emit(j, out);
    } else if (*sample_cmd) {
      if (*perc_cmd) {
        emit(cospec::to_json(cospec::sample_bernoulli_percolation(p, window, seed)), out);
      } else {
        emit(cospec::permutation_sample_json(points, rank, seed), out);
      }
    } else if (*graphing_cmd) {
      const auto g = cospec::parse_graphing(read_file(graphing_file));
      if (*mtp_cmd) {
        cospec::TransportKernel k;
        std::vector<double> table;
        if (kernel == "ones") {
          k = [](cospec::PointId, cospec::PointId) { return 1.0; };
        } else if (kernel == "edge") {
          k = [&g](cospec::PointId x, cospec::PointId y) {
            return !g.maps().empty() && g.apply(0, x) == y ? 1.0 : 0.0;
          };
        } else {
          cospec::Rng rng(seed);
          table.resize(g.size() * g.size());
          for (auto& v : table) v = rng.uniform01();
          k = [&table, n = g.size()](cospec::PointId x, cospec::PointId y) {
            return table[static_cast<std::size_t>(x) * n + static_cast<std::size_t>(y)];
          };
        }
        emit(cospec::mtp_check(g, k).to_json(), out);
      } else if (*rokhlin_cmd) {
        emit(cospec::to_json(cospec::rokhlin_partition(g, delta, class_cap), g, delta), out);
      } else if (*embedded_cmd) {
        const auto r = cospec::embedded_spectral_radius(g, parse_points(set_text));
        emit(ordered_json{{"value", r.value}, {"component_values", r.component_values}, {"converged", r.converged}}, out);
      } else {
        const auto x1 = cospec::make_oracle(x1_spec, seed);
        const auto ball = cospec::generate_ball(*x1, radius);
        std::vector<std::int32_t> folner_set;
        if (folner_radius >= 0) {
          for (std::size_t v = 0; v < ball.size(); ++v) {
            if (ball.dist[v] <= folner_radius) folner_set.push_back(static_cast<std::int32_t>(v));
          }
        } else {
          folner_set = cospec::folner_search(ball).set.members;
        }
        const cospec::TestFunction f2{parse_values(values_text), parse_points(component_text)};
        emit(cospec::product_test_function(ball, folner_set, g, f2).report.to_json(), out);
      }
    } else if (*exp_cmd) {
      auto config = Config::load(config_path);
      if (app.count("--seed")) config.set("seed", std::to_string(seed));
      if (radius_override >= 0) config.set("radius", std::to_string(radius_override));
      const auto report = cospec::run_experiment(exp_name, config);
      if (out.empty()) out = config.get("out", "");
      if (out.empty()) {
        std::cout << report.to_json().dump(2) << '\n';
      } else {
        cospec::export_report(report, out);
        std::cout << report.summary.dump(2) << '\n';
      }
    }
  } catch (const cospec::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cospec::ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
