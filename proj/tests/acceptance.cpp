// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
// with the measured quantities; the process exits nonzero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mqgcs/benchmark.hpp"
#include "mqgcs/certificate.hpp"
#include "mqgcs/oracle.hpp"
#include "mqgcs/policy.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/synthesis.hpp"

namespace {

using namespace mqgcs;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

/// Everything the soundness and re-verification criteria inspect.
struct Collected {
  struct RolloutRecord {
    std::string where;
    const GcsGraph* graph;
    Trajectory trajectory;
    double cost;
    double incremental_cost;
  };
  struct CertificateRecord {
    std::string where;
    const Scenario* scenario;
    LowerBoundCertificate cert;
  };
  std::vector<RolloutRecord> rollouts;
  std::vector<CertificateRecord> certificates;

  void Add(const std::string& where, const GcsGraph& graph, const RolloutResult& r) {
    if (r.success()) rollouts.push_back({where, &graph, r.trajectory, r.cost, r.incremental_cost});
  }
  void Add(const std::string& where, const Scenario& scenario, const LowerBoundCertificate& c) {
    certificates.push_back({where, &scenario, c});
  }
};

// Scenarios are kept alive for the whole run because the collected records
// point into them.
struct Scenarios {
  std::vector<Scenario> lemma_envs;
  Scenario two_segment = BuildTwoSegmentScenario();
  Scenario nine = BuildNineVertexScenario();
  std::vector<Scenario> singleton;
  Scenario fifty;
  Scenario three_targets;
};

const Vector kTwoSegmentSource{{0.0, 2.0}};
const Vector kTwoSegmentTarget{{10.0, -1.0}};

// Samples (vertex, point) pairs and compares the bound with the exact
// cost-to-go. Returns the worst excess bound - exact and the sample count.
struct LemmaCheck {
  double worst_excess = -std::numeric_limits<double>::infinity();
  int samples = 0;
  int violations = 0;
};

LemmaCheck CheckLemma(const Scenario& sc, const LowerBoundCertificate& cert, int count,
                      std::uint64_t seed, const std::function<Vector(std::mt19937_64&)>& target_point) {
  const GcsGraph& g = sc.graph;
  std::mt19937_64 rng(seed);
  std::vector<std::string> candidates;
  for (const auto& v : g.vertices()) {
    if (v.id != cert.target) candidates.push_back(v.id);
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  LemmaCheck out;
  while (out.samples < count) {
    const std::string v = candidates[pick(rng)];
    const Vector x = SampleSet(g.vertex(v).set, 1, rng).front();
    const Vector xt = target_point(rng);
    const double bound = cert.target_mode == TargetMode::kJointTarget
                             ? EvaluateBound(g, cert, v, x, xt)
                             : EvaluateBound(g, cert, v, x);
    const OracleSolution exact = ExactSppGcs(g, v, x, cert.target, xt);
    ++out.samples;
    if (!exact.feasible()) continue;  // +infinity cost-to-go bounds anything
    out.worst_excess = std::max(out.worst_excess, bound - exact.cost);
    if (bound > exact.cost + 1e-6) ++out.violations;
  }
  return out;
}

Outcome Criterion1(Scenarios& s, Collected& col) {
  const auto start = Clock::now();
  LemmaCheck total;
  int envs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EnvGenParams p;
    p.seed = seed;
    p.num_boxes = 10;
    p.max_touching = 3;
    s.lemma_envs.push_back(GenerateRandomEnv(p));
  }
  std::vector<const Scenario*> all;
  for (const auto& e : s.lemma_envs) all.push_back(&e);
  all.push_back(&s.two_segment);
  for (const Scenario* sc : all) {
    if (sc->graph.num_vertices() > 12) return {false, "environment with more than 12 vertices"};
    const std::string t = sc->graph.targets().front();
    // Opposite edges between overlapping boxes leave the plain program
    // without a strictly feasible point; products restore it.
    SynthesisOptions opts;
    opts.pairwise_products = sc != &s.two_segment;
    const LowerBoundCertificate cert = SynthesizeBounds(*sc, t, opts);
    col.Add("criterion 1 env " + std::to_string(envs), *sc, cert);
    const Vector xt = *sc->graph.vertex(t).set.SingletonPoint();
    const LemmaCheck c = CheckLemma(*sc, cert, 100, 100 + envs, [&](std::mt19937_64&) { return xt; });
    total.samples += c.samples;
    total.violations += c.violations;
    total.worst_excess = std::max(total.worst_excess, c.worst_excess);
    ++envs;
  }
  const double secs = Seconds(start);
  return {total.violations == 0 && secs <= 300.0,
          Format("%d environments, %d samples, %d violations, max(bound - exact) = %.3e, %.1f s",
                 envs, total.samples, total.violations, total.worst_excess, secs)};
}

// Random singleton digraph: 20 points, arcs with probability 0.25 and
// constant costs in [1, 10). Every vertex that reaches the target is a source.
Scenario RandomSingletonDigraph(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng(seed * 1000 + attempt);
    std::uniform_real_distribution<double> coord(0.0, 10.0), cost(1.0, 10.0), coin(0.0, 1.0);
    Scenario sc;
    const int n = 20;
    auto id = [](int i) { return Format("v%02d", i); };
    for (int i = 0; i < n; ++i) {
      sc.graph.AddVertex(id(i), ConvexSet::Point(Vector{{coord(rng), coord(rng)}}));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && coin(rng) < 0.25) {
          sc.graph.AddEdge(id(i), id(j), QuadraticForm::Constant(4, cost(rng)));
        }
      }
    }
    const DiscreteApspTables fw = FloydWarshall(ToDiscreteGraph(sc.graph));
    if (std::isinf(fw.cost[0][n - 1])) continue;
    for (int i = 0; i + 1 < n; ++i) {
      if (!std::isinf(fw.cost[i][n - 1])) sc.graph.AddSource(id(i));
    }
    sc.graph.AddTarget(id(n - 1));
    return sc;
  }
}

Outcome Criterion2(Scenarios& s, Collected& col) {
  double worst_bound = 0.0, worst_rollout = 0.0;
  int checked = 0;
  bool all_success = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    s.singleton.push_back(RandomSingletonDigraph(seed));
  }
  for (std::size_t k = 0; k < s.singleton.size(); ++k) {
    const Scenario& sc = s.singleton[k];
    const GcsGraph& g = sc.graph;
    const std::string t = g.targets().front();
    const Vector xt = *g.vertex(t).set.SingletonPoint();
    SynthesisOptions opts;
    opts.penalties = false;
    const LowerBoundCertificate cert = SynthesizeBounds(sc, t, opts);
    col.Add("criterion 2 graph " + std::to_string(k), sc, cert);
    const DiscreteApspTables fw = FloydWarshall(ToDiscreteGraph(g));
    const int ti = g.IndexOf(t);
    for (const std::string& v : g.sources()) {
      const Vector xv = *g.vertex(v).set.SingletonPoint();
      worst_bound = std::max(worst_bound,
                             std::abs(EvaluateBound(g, cert, v, xv) - fw.cost[g.IndexOf(v)][ti]));
      ++checked;
    }
    const std::string src = g.vertices().front().id;
    const RolloutResult r =
        Rollout(g, cert, src, *g.vertex(src).set.SingletonPoint(), t, xt, {.horizon = 1});
    col.Add("criterion 2 graph " + std::to_string(k), g, r);
    if (!r.success()) {
      all_success = false;
      continue;
    }
    worst_rollout = std::max(worst_rollout, std::abs(r.cost - fw.cost[0][ti]));
  }
  return {all_success && worst_bound <= 1e-5 && worst_rollout <= 1e-6,
          Format("10 graphs, %d bounds: max |J - FW| = %.3e; 1-step rollouts %s, max |cost - FW| = %.3e",
                 checked, worst_bound, all_success ? "all succeed" : "FAILED", worst_rollout)};
}

Outcome Criterion3(Scenarios& s, Collected& col) {
  const Scenario& sc = s.two_segment;
  const GcsGraph& g = sc.graph;
  const double walk = RelaxedWalkOracle(g, "s", kTwoSegmentSource, "t", kTwoSegmentTarget).cost;
  const double path = ExactSppGcs(g, "s", kTwoSegmentSource, "t", kTwoSegmentTarget).cost;
  SynthesisOptions off;
  off.penalties = false;
  const LowerBoundCertificate c_off = SynthesizeBounds(sc, "t", off);
  const LowerBoundCertificate c_on = SynthesizeBounds(sc, "t");
  col.Add("criterion 3 penalties off", sc, c_off);
  col.Add("criterion 3 penalties on", sc, c_on);
  const double js_off = EvaluateBound(g, c_off, "s", kTwoSegmentSource);
  const double js_on = EvaluateBound(g, c_on, "s", kTwoSegmentSource);
  const double hw = c_on.Penalty("w");
  for (const LowerBoundCertificate* c : {&c_off, &c_on}) {
    for (int h = 1; h <= 3; ++h) {
      PolicyOptions po;
      po.horizon = h;
      col.Add("criterion 3", g, Rollout(g, *c, "s", kTwoSegmentSource, "t", kTwoSegmentTarget, po));
    }
  }
  const bool a = std::abs(js_off - walk) <= 1e-4 && js_off < path;
  const bool b = std::abs(js_on - path) <= 1e-4 && hw > 0.0;
  return {a && b, Format("walk %.6f, path %.6f; penalties off J_s = %.6f; penalties on J_s = %.6f, "
                         "h_w = %.6f",
                         walk, path, js_off, js_on, hw)};
}

Outcome Criterion4(Scenarios& s, Collected& col) {
  const Scenario& sc = s.nine;
  const GcsGraph& g = sc.graph;
  SynthesisOptions opts;
  opts.penalties = false;
  opts.pairwise_products = true;
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t", opts);
  col.Add("criterion 4", sc, cert);
  const Vector xt = *g.vertex("t").set.SingletonPoint();
  std::mt19937_64 rng(7);
  const std::vector<Vector> samples = SampleSet(g.vertex("s").set, 50, rng);
  int chain = 0, optimal = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vector& x : samples) {
    const double js = EvaluateBound(g, cert, "s", x);
    const double l1 = LookaheadValue(g, cert, "s", x, 1, "t", xt);
    const double l2 = LookaheadValue(g, cert, "s", x, 2, "t", xt);
    const double exact = ExactSppGcs(g, "s", x, "t", xt).cost;
    const double excess = std::max({js - l1, l1 - l2, l2 - exact});
    worst = std::max(worst, excess);
    if (excess <= 1e-6) ++chain;
    PolicyOptions po;
    po.horizon = 2;
    const RolloutResult r = Rollout(g, cert, "s", x, "t", xt, po);
    col.Add("criterion 4", g, r);
    if (r.success() && std::abs(r.cost - exact) <= 1e-6 * (1.0 + exact)) ++optimal;
  }
  return {chain == 50 && optimal >= 45,
          Format("chain holds at %d/50 samples (max violation %.3e); 2-step rollout optimal at %d/50",
                 chain, worst, optimal)};
}

Outcome Criterion5(Scenarios& s, Collected& col) {
  const auto start = Clock::now();
  EnvGenParams p;
  p.seed = 1;
  p.num_boxes = 46;
  p.workspace = 14.0;
  p.max_touching = 3;
  // A per-hop cost keeps walks that bounce between overlapping boxes from
  // being nearly free, so the bounds stay informative.
  p.edge_cost = 1.0;
  p.num_sources = 2;
  p.num_targets = 2;
  s.fifty = GenerateRandomEnv(p);
  const Scenario& sc = s.fifty;
  SynthesisOptions quad_opts;
  quad_opts.pairwise_products = true;
  SynthesisOptions aff_opts = quad_opts;
  aff_opts.mode = BoundMode::kAffine;
  const auto quad = SynthesizeAllTargets(sc, sc.graph.targets(), quad_opts);
  const auto aff = SynthesizeAllTargets(sc, sc.graph.targets(), aff_opts);
  std::map<std::string, Vector> pinned;
  for (const auto& [t, c] : quad) {
    pinned[t] = c.target_point;
    col.Add("criterion 5 quadratic " + t, sc, c);
  }
  for (const auto& [t, c] : aff) col.Add("criterion 5 affine " + t, sc, c);
  const std::vector<Query> queries = SampleQueries(sc.graph, 120, 1, pinned);
  const std::vector<BenchmarkMethod> methods{{"quadratic-1", &quad, 1}, {"quadratic-2", &quad, 2},
                                             {"quadratic-3", &quad, 3}, {"affine-1", &aff, 1},
                                             {"affine-2", &aff, 2},     {"affine-3", &aff, 3}};
  BenchmarkOptions bo;
  bo.oracle_bounds = &quad;
  bo.max_iters = 10000;
  const BenchmarkReport report = RunBenchmark(sc, methods, queries, bo);
  for (const BenchmarkRecord& r : report.records) {
    if (r.status == "success") {
      col.rollouts.push_back({"criterion 5 " + r.method, &sc.graph, r.trajectory, r.cost,
                              r.incremental_cost});
    }
  }
  std::printf("%s", report.Table().c_str());
  const double secs = Seconds(start);
  auto gap = [&](const std::string& m) {
    const MethodSummary* ms = report.Summary(m);
    return ms && ms->median_gap ? *ms->median_gap : std::numeric_limits<double>::infinity();
  };
  auto fail = [&](const std::string& m) {
    const MethodSummary* ms = report.Summary(m);
    return ms ? ms->failure_rate : 100.0;
  };
  const double q1 = gap("quadratic-1"), q2 = gap("quadratic-2"), q3 = gap("quadratic-3");
  const double a3 = gap("affine-3");
  double quad_fail = 0.0, aff_fail = 0.0;
  for (int h = 1; h <= 3; ++h) {
    quad_fail = std::max(quad_fail, fail("quadratic-" + std::to_string(h)));
    aff_fail = std::max(aff_fail, fail("affine-" + std::to_string(h)));
  }
  const bool monotone = q2 <= q1 && q3 <= q2;
  const bool pass = monotone && q3 < a3 && aff_fail >= quad_fail && quad_fail == 0.0 &&
                    secs <= 1200.0;
  return {pass, Format("V = %d; quadratic median gaps %.2f%% / %.2f%% / %.2f%%, affine 3-step "
                       "%.2f%%; failure rates quadratic %.1f%%, affine %.1f%%; %.0f s",
                       sc.graph.num_vertices(), 100 * q1, 100 * q2, 100 * q3, 100 * a3, quad_fail,
                       aff_fail, secs)};
}

Outcome Criterion6(const Collected& col) {
  int bad = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::string first;
  for (const auto& r : col.rollouts) {
    const ValidationReport v = ValidateTrajectory(*r.graph, r.trajectory, 1e-7);
    const double excess = r.cost - r.incremental_cost;
    worst_excess = std::max(worst_excess, excess);
    if (!v.ok() || excess > 1e-8) {
      if (bad++ == 0) first = r.where + (v.ok() ? ": cost above incremental" : ": " + v.issues[0]);
    }
  }
  return {bad == 0 && !col.rollouts.empty(),
          Format("%zu successful rollouts, %d invalid, max(reoptimized - incremental) = %.3e%s%s",
                 col.rollouts.size(), bad, worst_excess, bad ? "; first: " : "", first.c_str())};
}

Outcome Criterion7(const Collected& col) {
  int bad = 0;
  double min_eig = std::numeric_limits<double>::infinity(), worst_identity = 0.0;
  std::string first;
  for (const auto& c : col.certificates) {
    const VerificationReport v = VerifyCertificate(*c.scenario, c.cert);
    min_eig = std::min(min_eig, v.min_edge_eigenvalue);
    worst_identity = std::max(worst_identity, v.target_identity_error);
    const bool ok = v.min_edge_eigenvalue >= -1e-7 && v.target_identity_error <= 1e-6;
    if (!ok && bad++ == 0) first = c.where;
  }
  return {bad == 0 && !col.certificates.empty(),
          Format("%zu certificates, min edge eigenvalue %.3e, max target identity error %.3e%s%s",
                 col.certificates.size(), min_eig, worst_identity, bad ? "; first failure: " : "",
                 first.c_str())};
}

Outcome Criterion8(Scenarios& s, Collected& col) {
  // Joint-target bounds with the segment w as the target set.
  const Scenario& two = s.two_segment;
  SynthesisOptions joint;
  joint.target_mode = TargetMode::kJointTarget;
  const LowerBoundCertificate jc = SynthesizeBounds(two, "w", joint);
  col.Add("criterion 8 joint target", two, jc);
  const ConvexSet& segment = two.graph.vertex("w").set;
  const LemmaCheck lemma = CheckLemma(two, jc, 100, 8, [&](std::mt19937_64& rng) {
    return SampleSet(segment, 1, rng).front();
  });
  const bool joint_ok = lemma.violations == 0;

  // Three targets solved together and one by one.
  EnvGenParams p;
  p.seed = 5;
  p.num_boxes = 10;
  p.max_touching = 3;
  p.num_targets = 3;
  s.three_targets = GenerateRandomEnv(p);
  const Scenario& multi = s.three_targets;
  SynthesisOptions mopts;
  mopts.solver.threads = 3;
  const auto together = SynthesizeAllTargets(multi, multi.graph.targets(), mopts);
  double worst_multi = 0.0;
  for (const std::string& t : multi.graph.targets()) {
    const LowerBoundCertificate alone = SynthesizeBounds(multi, t);
    col.Add("criterion 8 target " + t, multi, alone);
    worst_multi = std::max(worst_multi, std::abs(together.at(t).objective - alone.objective));
  }
  const bool multi_ok = together.size() == 3 && worst_multi <= 1e-9;

  // 2-cycle penalties on two instances that contain 2-cycles.
  double worst_drop = -std::numeric_limits<double>::infinity();
  for (const Scenario* sc : {&s.two_segment, &s.nine}) {
    SynthesisOptions plain;
    plain.pairwise_products = sc == &s.nine;
    SynthesisOptions cyc = plain;
    cyc.cycle_penalties = true;
    const LowerBoundCertificate a = SynthesizeBounds(*sc, "t", plain);
    const LowerBoundCertificate b = SynthesizeBounds(*sc, "t", cyc);
    col.Add("criterion 8 cycle penalties", *sc, b);
    worst_drop = std::max(worst_drop, (a.objective - b.objective) / (1.0 + std::abs(a.objective)));
  }
  const bool cycle_ok = worst_drop <= 1e-8;
  return {joint_ok && multi_ok && cycle_ok,
          Format("joint target: %d samples, %d violations, max(bound - exact) = %.3e; 3 targets: "
                 "max |together - alone| = %.3e; 2-cycle penalties: max relative drop %.3e",
                 lemma.samples, lemma.violations, lemma.worst_excess, worst_multi, worst_drop)};
}

}  // namespace

int main() {
  Scenarios scenarios;
  Collected collected;
  bool all = true;
  auto report = [&](int n, const std::function<Outcome()>& run) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s criterion %d: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str(),
                Seconds(start));
    std::fflush(stdout);
  };
  report(1, [&] { return Criterion1(scenarios, collected); });
  report(2, [&] { return Criterion2(scenarios, collected); });
  report(3, [&] { return Criterion3(scenarios, collected); });
  report(4, [&] { return Criterion4(scenarios, collected); });
  report(5, [&] { return Criterion5(scenarios, collected); });
  report(8, [&] { return Criterion8(scenarios, collected); });
  report(6, [&] { return Criterion6(collected); });
  report(7, [&] { return Criterion7(collected); });
  return all ? 0 : 1;
}
