#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mqgcs/graph.hpp"
#include "mqgcs/moments.hpp"

namespace mqgcs {

/// A graph together with its (optional) anticipated source distribution.
struct Scenario {
  GcsGraph graph;
  /// Empty when the file carries none.
  std::vector<SourceDistribution> source_distribution;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON scenario format. Structural problems throw ScenarioError;
/// asymmetric coefficient matrices are symmetrized and recorded as input
/// issues on the graph so that ValidateGraph reports them.
Scenario ParseScenario(std::string_view text);
/// Canonical JSON: sorted keys, shortest round-trip number formatting.
std::string SerializeScenario(const Scenario& scenario);

Scenario LoadScenario(const std::string& path);
void SaveScenario(const Scenario& scenario, const std::string& path);

/// Hex FNV-1a hash of the canonical serialization.
std::string Fingerprint(const Scenario& scenario);

/// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace mqgcs
