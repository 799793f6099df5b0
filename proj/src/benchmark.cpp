#include "mqgcs/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "mqgcs/oracle.hpp"

namespace mqgcs {

namespace {

Vector SampleUniform(const ConvexSet& set, std::mt19937_64& rng) {
  if (const auto p = set.SingletonPoint()) return *p;
  const AxisBox box = set.BoundingBox();
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vector x(box.lower.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      std::uniform_real_distribution<double> u(box.lower(i), box.upper(i));
      x(i) = u(rng);
    }
    if (set.Contains(x)) return x;
  }
  // Thin sets: fall back to the generic sampler.
  return SampleSet(set, 1, rng).front();
}

std::string Percent(const std::optional<double>& gap) {
  if (!gap) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * *gap);
  return buf;
}

}  // namespace

std::vector<Query> SampleQueries(const GcsGraph& graph, int count, std::uint64_t seed,
                                 const std::map<std::string, Vector>& pinned_targets) {
  if (graph.sources().empty() || graph.targets().empty()) {
    throw std::invalid_argument("SampleQueries: graph needs sources and targets");
  }
  std::mt19937_64 rng(seed);
  std::vector<Query> queries;
  for (int q = 0; q < count; ++q) {
    std::uniform_int_distribution<std::size_t> ps(0, graph.sources().size() - 1);
    std::uniform_int_distribution<std::size_t> pt(0, graph.targets().size() - 1);
    Query query;
    query.id = q;
    query.source = graph.sources()[ps(rng)];
    query.target = graph.targets()[pt(rng)];
    query.source_point = SampleUniform(graph.vertex(query.source).set, rng);
    const auto pinned = pinned_targets.find(query.target);
    query.target_point = pinned != pinned_targets.end()
                             ? pinned->second
                             : SampleUniform(graph.vertex(query.target).set, rng);
    queries.push_back(std::move(query));
  }
  return queries;
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("Percentile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<MethodSummary> Summarize(const std::vector<BenchmarkRecord>& records,
                                     const std::vector<std::string>& methods) {
  std::vector<MethodSummary> out;
  for (const std::string& method : methods) {
    MethodSummary s;
    s.method = method;
    std::vector<double> gaps, times;
    for (const auto& r : records) {
      if (r.method != method) continue;
      ++s.queries;
      times.push_back(r.solve_time_s);
      if (r.status != "success") {
        ++s.failures;
      } else if (r.gap) {
        gaps.push_back(*r.gap);
      }
    }
    if (s.queries == 0) continue;
    s.failure_rate = 100.0 * s.failures / s.queries;
    if (!gaps.empty()) {
      s.median_gap = Percentile(gaps, 0.5);
      s.p75_gap = Percentile(gaps, 0.75);
    }
    s.median_time_s = Percentile(times, 0.5);
    s.p75_time_s = Percentile(times, 0.75);
    s.max_time_s = *std::max_element(times.begin(), times.end());
    out.push_back(s);
  }
  return out;
}

const MethodSummary* BenchmarkReport::Summary(const std::string& method) const {
  for (const auto& s : summaries) {
    if (s.method == method) return &s;
  }
  return nullptr;
}

std::string BenchmarkReport::Table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %12s %12s %12s %12s %9s\n", "method", "gap med %",
                "gap p75 %", "time med ms", "time p75 ms", "fail %");
  out << line;
  for (const auto& s : summaries) {
    std::snprintf(line, sizeof(line), "%-24s %12s %12s %12.1f %12.1f %9.1f\n", s.method.c_str(),
                  Percent(s.median_gap).c_str(), Percent(s.p75_gap).c_str(),
                  1e3 * s.median_time_s, 1e3 * s.p75_time_s, s.failure_rate);
    out << line;
  }
  return out.str();
}

std::string BenchmarkReport::ToJson() const {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json jr{{"query", r.query},   {"method", r.method}, {"horizon", r.horizon},
                              {"mode", r.mode},     {"status", r.status}, {"cost", r.cost},
                              {"solve_time_s", r.solve_time_s}, {"backtracks", r.backtracks}};
    jr["oracle_cost"] = r.oracle_cost ? nlohmann::ordered_json(*r.oracle_cost) : nullptr;
    jr["gap"] = r.gap ? nlohmann::ordered_json(*r.gap) : nullptr;
    j["records"].push_back(std::move(jr));
  }
  j["summaries"] = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json js{{"method", s.method},
                              {"queries", s.queries},
                              {"failures", s.failures},
                              {"failure_rate_percent", s.failure_rate},
                              {"median_time_s", s.median_time_s},
                              {"p75_time_s", s.p75_time_s},
                              {"max_time_s", s.max_time_s}};
    js["median_gap"] = s.median_gap ? nlohmann::ordered_json(*s.median_gap) : nullptr;
    js["p75_gap"] = s.p75_gap ? nlohmann::ordered_json(*s.p75_gap) : nullptr;
    j["summaries"].push_back(std::move(js));
  }
  return j.dump(2);
}

BenchmarkReport RunBenchmark(const Scenario& scenario, const std::vector<BenchmarkMethod>& methods,
                             const std::vector<Query>& queries, const BenchmarkOptions& options) {
  const std::string fingerprint = Fingerprint(scenario);
  const GcsGraph& graph = scenario.graph;
  std::vector<std::string> names;
  for (const auto& m : methods) {
    if (m.certificates == nullptr) throw std::invalid_argument("RunBenchmark: method without certificates");
    for (const auto& [target, cert] : *m.certificates) {
      if (cert.fingerprint != fingerprint) {
        throw std::invalid_argument("RunBenchmark: certificate for '" + target +
                                    "' does not match the scenario fingerprint");
      }
    }
    for (const auto& q : queries) {
      if (m.certificates->count(q.target) == 0) {
        throw std::invalid_argument("RunBenchmark: no certificate for target '" + q.target + "'");
      }
    }
    names.push_back(m.name);
  }

  std::vector<std::vector<BenchmarkRecord>> per_query(queries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      const Query& q = queries[i];
      std::vector<PathSeq> found;
      for (const auto& m : methods) {
        const LowerBoundCertificate& cert = m.certificates->at(q.target);
        PolicyOptions po;
        po.horizon = m.horizon;
        po.max_iters = options.max_iters;
        po.solver = options.solver;
        const RolloutResult r =
            Rollout(graph, cert, q.source, q.source_point, q.target, q.target_point, po);
        BenchmarkRecord rec;
        rec.query = q.id;
        rec.method = m.name;
        rec.horizon = m.horizon;
        rec.mode = std::string(ToString(cert.mode));
        rec.status = std::string(ToString(r.status));
        rec.cost = r.success() ? r.cost : std::numeric_limits<double>::infinity();
        rec.solve_time_s = r.diagnostics.wall_time_s;
        rec.backtracks = r.diagnostics.backtracks;
        if (r.success()) {
          rec.trajectory = r.trajectory;
          rec.incremental_trajectory = r.incremental_trajectory;
          rec.incremental_cost = r.incremental_cost;
          found.push_back(r.path);
        }
        per_query[i].push_back(std::move(rec));
      }
      if (!options.run_oracle) continue;
      OracleOptions oo;
      oo.solver = options.solver;
      if (options.oracle_bounds != nullptr) {
        const auto it = options.oracle_bounds->find(q.target);
        if (it != options.oracle_bounds->end()) {
          const LowerBoundCertificate* cert = &it->second;
          const Vector x_t = q.target_point;
          oo.prune_bound = [cert, x_t](const std::string& v) { return cert->BoundForm(v, x_t); };
          oo.incumbents = std::move(found);
        }
      }
      const OracleSolution sol =
          ExactSppGcs(graph, q.source, q.source_point, q.target, q.target_point, oo);
      if (!sol.feasible()) continue;
      for (BenchmarkRecord& rec : per_query[i]) {
        rec.oracle_cost = sol.cost;
        if (!std::isfinite(rec.cost)) continue;
        rec.gap = sol.cost > 0.0 ? rec.cost / sol.cost - 1.0 : 0.0;
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, std::max(1, static_cast<int>(queries.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  BenchmarkReport report;
  for (auto& recs : per_query) {
    for (auto& r : recs) report.records.push_back(std::move(r));
  }
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const BenchmarkRecord& a, const BenchmarkRecord& b) { return a.query < b.query; });
  report.summaries = Summarize(report.records, names);
  return report;
}

}  // namespace mqgcs
