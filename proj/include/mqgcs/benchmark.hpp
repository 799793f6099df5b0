#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mqgcs/policy.hpp"
#include "mqgcs/scenario_io.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {

/// One planning query: endpoints as vertex ids and points.
struct Query {
  int id = 0;
  std::string source;
  Vector source_point;
  std::string target;
  Vector target_point;
};

/// Uniform source vertex and target vertex, points uniform over their sets
/// by rejection inside the bounding box. A target whose certificate pins a
/// point (fixed-point mode) can only be queried at that point; pass it in
/// `pinned_targets`. Deterministic in the seed.
std::vector<Query> SampleQueries(const GcsGraph& graph, int count, std::uint64_t seed,
                                 const std::map<std::string, Vector>& pinned_targets = {});

/// A policy configuration to benchmark: certificates per target and horizon.
struct BenchmarkMethod {
  std::string name;
  /// Keyed by target id.
  const std::map<std::string, LowerBoundCertificate>* certificates = nullptr;
  int horizon = 1;
};

struct BenchmarkRecord {
  int query = 0;
  std::string method;
  int horizon = 0;
  std::string mode;
  std::string status;
  double cost = 0.0;
  /// Absent when the oracle is skipped or infeasible.
  std::optional<double> oracle_cost;
  /// cost / oracle_cost - 1, on success with an oracle value.
  std::optional<double> gap;
  double solve_time_s = 0.0;
  int backtracks = 0;
  /// Re-optimized and incremental rollout trajectories (empty on failure).
  Trajectory trajectory;
  Trajectory incremental_trajectory;
  double incremental_cost = 0.0;
};

struct MethodSummary {
  std::string method;
  int queries = 0;
  int failures = 0;
  double failure_rate = 0.0;  // percent
  std::optional<double> median_gap;
  std::optional<double> p75_gap;
  double median_time_s = 0.0;
  double p75_time_s = 0.0;
  double max_time_s = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRecord> records;
  /// In the order the methods were given.
  std::vector<MethodSummary> summaries;

  const MethodSummary* Summary(const std::string& method) const;
  /// Plain-text table: method, optimality gap median/p75, solve time
  /// median/p75 and failure rate.
  std::string Table() const;
  std::string ToJson() const;
};

struct BenchmarkOptions {
  bool run_oracle = true;
  /// Certificates whose bounds prune the exact oracle (see OracleOptions).
  const std::map<std::string, LowerBoundCertificate>* oracle_bounds = nullptr;
  int max_iters = 10000;
  int threads = 1;
  SolverOptions solver;
};

/// Linear-interpolated percentile (q in [0, 1]) of a nonempty sample.
double Percentile(std::vector<double> values, double q);

/// Recomputes the per-method aggregates from raw records; failures are
/// excluded from the gap statistics.
std::vector<MethodSummary> Summarize(const std::vector<BenchmarkRecord>& records,
                                     const std::vector<std::string>& methods);

/// Runs every method on every query, then the oracle once per query (seeded
/// with the paths the methods found when oracle_bounds is set). Queries
/// are independent and run on up to options.threads workers; records are
/// sorted by (query, method order). Throws std::invalid_argument when a
/// certificate's fingerprint does not match the scenario or a target has no
/// certificate.
BenchmarkReport RunBenchmark(const Scenario& scenario, const std::vector<BenchmarkMethod>& methods,
                             const std::vector<Query>& queries,
                             const BenchmarkOptions& options = {});

}  // namespace mqgcs
