// Command-line front end: scenario generation, offline synthesis, online
// rollouts, the exact oracle, benchmarks and SVG rendering.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mqgcs/benchmark.hpp"
#include "mqgcs/certificate.hpp"
#include "mqgcs/oracle.hpp"
#include "mqgcs/policy.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/svg.hpp"
#include "mqgcs/synthesis.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace mqgcs;

struct Global {
  std::uint64_t seed = 0;
  double accuracy = 1e-8;
  int threads = 1;
  bool json_out = false;

  SolverOptions solver() const {
    SolverOptions o;
    o.accuracy = accuracy;
    o.threads = threads;
    return o;
  }
};

/// "x,y,..." or "x y ..." to a vector.
Vector ParsePoint(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  if (values.empty() || !in.eof()) throw std::invalid_argument("malformed point '" + text + "'");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json PointJson(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

json TrajectoryJson(const Trajectory& t) {
  json j{{"path", t.path}, {"points", json::array()}};
  for (const auto& p : t.points) j["points"].push_back(PointJson(p));
  return j;
}

/// Point of a vertex given explicitly, or the vertex's only point.
Vector PointOrSingleton(const GcsGraph& graph, const std::string& v, const std::string& text) {
  if (!text.empty()) return ParsePoint(text);
  if (const auto p = graph.vertex(v).set.SingletonPoint()) return *p;
  throw std::invalid_argument("a point is required for vertex '" + v + "'");
}

void Emit(const Global& g, const json& j, const std::string& text) {
  if (g.json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

std::vector<int> ParseInts(const std::string& text) {
  std::vector<int> out;
  std::string s = text;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  int v;
  while (in >> v) out.push_back(v);
  return out;
}

std::vector<std::string> ParseNames(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-query shortest paths in graphs of convex sets"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--accuracy", g.accuracy, "Solver accuracy")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();
  app.add_flag("--json-out", g.json_out, "Print JSON instead of text");

  // gen / bezier
  EnvGenParams env;
  std::string out_file;
  auto add_env_options = [&](CLI::App* cmd) {
    cmd->add_option("--boxes", env.num_boxes, "Number of boxes")->capture_default_str();
    cmd->add_option("--workspace", env.workspace, "Workspace side length")->capture_default_str();
    cmd->add_option("--min-size", env.min_size, "Smallest box side")->capture_default_str();
    cmd->add_option("--max-size", env.max_size, "Largest box side")->capture_default_str();
    cmd->add_option("--min-overlap", env.min_overlap, "Overlap needed for an edge")
        ->capture_default_str();
    cmd->add_option("--sources", env.num_sources, "Number of sources")->capture_default_str();
    cmd->add_option("--targets", env.num_targets, "Number of targets")->capture_default_str();
    cmd->add_option("--max-touching", env.max_touching,
                    "Most earlier boxes a new box may overlap (0: no limit)")
        ->capture_default_str();
    cmd->add_option("--out", out_file, "Scenario file to write")->required();
  };
  CLI::App* gen = app.add_subcommand("gen", "Random box environment (squared Euclidean)");
  add_env_options(gen);
  gen->add_option("--edge-cost", env.edge_cost, "Constant added to every edge length")
      ->capture_default_str();
  CLI::App* bezier = app.add_subcommand("bezier", "Random box environment with Bezier curves");
  add_env_options(bezier);
  bezier->add_option("--degree", env.bezier_degree, "Curve degree")->capture_default_str();
  bezier->add_option("--smoothness", env.smoothness, "0: continuous, 1: differentiable")
      ->capture_default_str();

  // example1
  std::string instance = "two_segment";
  CLI::App* example = app.add_subcommand("example1", "Built-in small instances");
  example->add_option("--instance", instance, "two_segment or nine_vertex")->capture_default_str();
  example->add_option("--out", out_file, "Scenario file to write")->required();

  // synthesize
  std::string scenario_file, target, target_point, mode = "quadratic", target_mode = "fixed_point";
  bool no_penalties = false, td_penalties = false, cycle_penalties = false, products = false;
  bool verify = false;
  CLI::App* synth = app.add_subcommand("synthesize", "Offline lower-bound synthesis");
  synth->add_option("--scenario", scenario_file, "Scenario file")->required();
  synth->add_option("--target", target, "Target vertex (default: first target)");
  synth->add_option("--target-point", target_point, "Fixed-point mode target point");
  synth->add_option("--mode", mode, "quadratic or affine")->capture_default_str();
  synth->add_option("--target-mode", target_mode, "fixed_point or joint_target")
      ->capture_default_str();
  synth->add_flag("--no-penalties", no_penalties, "Disable revisit penalties");
  synth->add_flag("--target-dependent-penalties", td_penalties, "Penalties quadratic in x_t");
  synth->add_flag("--cycle-penalties", cycle_penalties, "Add 2-cycle penalties");
  synth->add_flag("--pairwise-products", products, "Products of affine constraints");
  synth->add_flag("--verify", verify, "Re-verify the certificate");
  synth->add_option("--out", out_file, "Certificate file to write")->required();

  // rollout
  std::string cert_file, source, source_point;
  int horizon = 1, max_iters = 10000;
  CLI::App* roll = app.add_subcommand("rollout", "Online lookahead rollout");
  roll->add_option("--scenario", scenario_file, "Scenario file")->required();
  roll->add_option("--cert", cert_file, "Certificate file")->required();
  roll->add_option("--source-vertex", source, "Source vertex")->required();
  roll->add_option("--source-point", source_point, "Source point");
  roll->add_option("--target-vertex", target, "Target vertex")->required();
  roll->add_option("--target-point", target_point, "Target point");
  roll->add_option("--horizon", horizon, "Lookahead horizon")->capture_default_str();
  roll->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();

  // oracle
  int max_edges = -1;
  bool walks = false;
  CLI::App* orc = app.add_subcommand("oracle", "Exact path enumeration");
  orc->add_option("--scenario", scenario_file, "Scenario file")->required();
  orc->add_option("--source", source, "Source vertex")->required();
  orc->add_option("--source-point", source_point, "Source point");
  orc->add_option("--target", target, "Target vertex")->required();
  orc->add_option("--target-point", target_point, "Target point");
  orc->add_option("--max-edges", max_edges, "Longest path (default |V|-1, walks 2|V|)");
  orc->add_flag("--walks", walks, "Allow vertex revisits");

  // bench
  std::string modes = "quadratic,affine", horizons = "1,2,3";
  int num_queries = 120;
  bool no_oracle = false, prune = false;
  CLI::App* bench = app.add_subcommand("bench", "Benchmark rollouts against the oracle");
  bench->add_option("--scenario", scenario_file, "Scenario file")->required();
  bench->add_option("--modes", modes, "Bound modes")->capture_default_str();
  bench->add_option("--horizons", horizons, "Lookahead horizons")->capture_default_str();
  bench->add_option("--queries", num_queries, "Number of queries")->capture_default_str();
  bench->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
  bench->add_flag("--no-oracle", no_oracle, "Skip the oracle");
  bench->add_flag("--prune-oracle", prune, "Branch and bound with the quadratic bounds");
  bench->add_flag("--no-penalties", no_penalties, "Disable revisit penalties");
  bench->add_flag("--pairwise-products", products, "Products of affine constraints");

  // render
  std::string trajectory_file;
  CLI::App* render = app.add_subcommand("render", "SVG of a planar scenario");
  render->add_option("--scenario", scenario_file, "Scenario file")->required();
  render->add_option("--cert", cert_file, "Certificate whose bounds are contoured");
  render->add_option("--rollout", trajectory_file, "Rollout JSON whose trajectory is drawn");
  render->add_option("--target-point", target_point, "Joint-mode target point");
  render->add_option("--out", out_file, "SVG file to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed() || bezier->parsed()) {
      env.seed = g.seed;
      env.cost = bezier->parsed() ? CostKind::kBezier : CostKind::kSquaredEuclidean;
      const Scenario scenario = GenerateRandomEnv(env);
      SaveScenario(scenario, out_file);
      Emit(g,
           json{{"file", out_file},
                {"vertices", scenario.graph.num_vertices()},
                {"edges", scenario.graph.edges().size()}},
           "wrote " + out_file + " (" + std::to_string(scenario.graph.num_vertices()) +
               " vertices, " + std::to_string(scenario.graph.edges().size()) + " edges)\n");
    } else if (example->parsed()) {
      if (instance != "two_segment" && instance != "nine_vertex") {
        throw std::invalid_argument("unknown instance '" + instance + "'");
      }
      const Scenario scenario =
          instance == "two_segment" ? BuildTwoSegmentScenario() : BuildNineVertexScenario();
      SaveScenario(scenario, out_file);
      Emit(g, json{{"file", out_file}}, "wrote " + out_file + "\n");
    } else if (synth->parsed()) {
      const Scenario scenario = LoadScenario(scenario_file);
      if (target.empty()) {
        if (scenario.graph.targets().empty()) throw std::invalid_argument("scenario has no targets");
        target = scenario.graph.targets().front();
      }
      SynthesisOptions so;
      so.mode = ParseBoundMode(mode);
      so.target_mode = ParseTargetMode(target_mode);
      so.penalties = !no_penalties;
      so.target_dependent_penalties = td_penalties;
      so.cycle_penalties = cycle_penalties;
      so.pairwise_products = products;
      if (!target_point.empty()) so.target_point = ParsePoint(target_point);
      so.solver = g.solver();
      const LowerBoundCertificate cert = SynthesizeBounds(scenario, target, so);
      SaveCertificate(cert, out_file);
      json j{{"file", out_file},
             {"target", target},
             {"objective", cert.objective},
             {"iterations", cert.solver_iterations},
             {"solve_time_s", cert.solve_time_s}};
      std::ostringstream text;
      text << "objective " << cert.objective << " (" << cert.solver_iterations << " iterations, "
           << cert.solve_time_s << " s); wrote " << out_file << "\n";
      if (verify) {
        const VerificationReport report = VerifyCertificate(scenario, cert);
        j["verified"] = report.ok();
        j["min_edge_eigenvalue"] = report.min_edge_eigenvalue;
        j["target_identity_error"] = report.target_identity_error;
        j["issues"] = report.issues;
        text << "verification " << (report.ok() ? "ok" : "FAILED") << ": min edge eigenvalue "
             << report.min_edge_eigenvalue << ", target identity error "
             << report.target_identity_error << "\n";
        for (const auto& issue : report.issues) text << "  " << issue << "\n";
      }
      Emit(g, j, text.str());
    } else if (roll->parsed()) {
      const Scenario scenario = LoadScenario(scenario_file);
      const LowerBoundCertificate cert = LoadCertificate(cert_file);
      PolicyOptions po;
      po.horizon = horizon;
      po.max_iters = max_iters;
      po.threads = g.threads;
      po.solver = g.solver();
      const Vector xs = PointOrSingleton(scenario.graph, source, source_point);
      const Vector xt = target_point.empty() && cert.target_mode == TargetMode::kFixedPoint
                            ? cert.target_point
                            : PointOrSingleton(scenario.graph, target, target_point);
      const RolloutResult r = Rollout(scenario.graph, cert, source, xs, target, xt, po);
      json j{{"status", ToString(r.status)},
             {"path", r.path},
             {"trajectory", TrajectoryJson(r.trajectory)},
             {"cost", r.success() ? json(r.cost) : json(nullptr)},
             {"incremental_cost", r.success() ? json(r.incremental_cost) : json(nullptr)},
             {"diagnostics",
              {{"iterations", r.diagnostics.iterations},
               {"backtracks", r.diagnostics.backtracks},
               {"programs_solved", r.diagnostics.programs_solved},
               {"wall_time_s", r.diagnostics.wall_time_s}}}};
      std::ostringstream text;
      text << ToString(r.status);
      if (r.success()) {
        text << " cost " << r.cost << " path";
        for (const auto& v : r.path) text << " " << v;
      }
      text << " (" << r.diagnostics.iterations << " iterations, " << r.diagnostics.backtracks
           << " backtracks)\n";
      Emit(g, j, text.str());
    } else if (orc->parsed()) {
      const Scenario scenario = LoadScenario(scenario_file);
      OracleOptions oo;
      oo.max_edges = max_edges;
      oo.threads = g.threads;
      oo.solver = g.solver();
      const Vector xs = PointOrSingleton(scenario.graph, source, source_point);
      const Vector xt = PointOrSingleton(scenario.graph, target, target_point);
      const OracleSolution sol = walks
                                     ? RelaxedWalkOracle(scenario.graph, source, xs, target, xt, oo)
                                     : ExactSppGcs(scenario.graph, source, xs, target, xt, oo);
      json j{{"cost", sol.feasible() ? json(sol.cost) : json(nullptr)},
             {"path", sol.path},
             {"trajectory", TrajectoryJson(sol.trajectory)},
             {"paths_examined", sol.paths_examined}};
      std::ostringstream text;
      if (sol.feasible()) {
        text << "cost " << sol.cost << " path";
        for (const auto& v : sol.path) text << " " << v;
      } else {
        text << "infeasible";
      }
      text << " (" << sol.paths_examined << " sequences)\n";
      Emit(g, j, text.str());
    } else if (bench->parsed()) {
      const Scenario scenario = LoadScenario(scenario_file);
      const std::vector<std::string> targets = scenario.graph.targets();
      std::map<std::string, std::map<std::string, LowerBoundCertificate>> certs;
      for (const std::string& m : ParseNames(modes)) {
        SynthesisOptions so;
        so.mode = ParseBoundMode(m);
        so.penalties = !no_penalties;
        so.pairwise_products = products;
        so.solver = g.solver();
        certs[m] = SynthesizeAllTargets(scenario, targets, so);
      }
      std::map<std::string, Vector> pinned;
      for (const auto& [t, cert] : certs.begin()->second) pinned[t] = cert.target_point;
      const std::vector<Query> queries = SampleQueries(scenario.graph, num_queries, g.seed, pinned);
      std::vector<BenchmarkMethod> methods;
      for (const std::string& m : ParseNames(modes)) {
        for (int h : ParseInts(horizons)) {
          methods.push_back({m + "/h" + std::to_string(h), &certs[m], h});
        }
      }
      BenchmarkOptions bo;
      bo.run_oracle = !no_oracle;
      bo.max_iters = max_iters;
      bo.threads = g.threads;
      bo.solver = g.solver();
      if (prune && certs.count("quadratic")) bo.oracle_bounds = &certs["quadratic"];
      const BenchmarkReport report = RunBenchmark(scenario, methods, queries, bo);
      if (g.json_out) {
        std::cout << report.ToJson() << "\n";
      } else {
        std::cout << report.Table();
      }
    } else if (render->parsed()) {
      const Scenario scenario = LoadScenario(scenario_file);
      RenderOptions ro;
      LowerBoundCertificate cert;
      if (!cert_file.empty()) {
        cert = LoadCertificate(cert_file);
        ro.cert = &cert;
      }
      if (!target_point.empty()) ro.target_point = ParsePoint(target_point);
      if (!trajectory_file.empty()) {
        const json j = json::parse(ReadFile(trajectory_file));
        const json& t = j.contains("trajectory") ? j.at("trajectory") : j;
        Trajectory traj;
        traj.path = t.at("path").get<PathSeq>();
        for (const auto& p : t.at("points")) {
          const auto v = p.get<std::vector<double>>();
          traj.points.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
        ro.trajectories.push_back(std::move(traj));
      }
      WriteFile(out_file, RenderSvg(scenario, ro));
      Emit(g, json{{"file", out_file}}, "wrote " + out_file + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
