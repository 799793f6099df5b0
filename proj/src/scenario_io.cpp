#include "mqgcs/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace mqgcs {

using json_util::Json;

namespace {

Json DistributionToJson(const SourceDistribution& d) {
  Json j{{"vertex", d.vertex}, {"kind", ToString(d.kind)}, {"weight", d.weight}};
  switch (d.kind) {
    case DistributionKind::kUniformBox:
      j["lower"] = json_util::FromVector(d.lower);
      j["upper"] = json_util::FromVector(d.upper);
      break;
    case DistributionKind::kPointMass:
      j["point"] = json_util::FromVector(d.point);
      break;
    case DistributionKind::kSampleSet: {
      Json samples = Json::array();
      for (const auto& s : d.samples) samples.push_back(json_util::FromVector(s));
      j["samples"] = samples;
      break;
    }
  }
  return j;
}

SourceDistribution DistributionFromJson(const Json& j) {
  SourceDistribution d;
  d.vertex = j.at("vertex").get<std::string>();
  d.kind = ParseDistributionKind(j.at("kind").get<std::string>());
  d.weight = j.value("weight", 1.0);
  switch (d.kind) {
    case DistributionKind::kUniformBox:
      d.lower = json_util::ToVector(j.at("lower"));
      d.upper = json_util::ToVector(j.at("upper"));
      break;
    case DistributionKind::kPointMass:
      d.point = json_util::ToVector(j.at("point"));
      break;
    case DistributionKind::kSampleSet:
      for (const auto& s : j.at("samples")) d.samples.push_back(json_util::ToVector(s));
      break;
  }
  return d;
}

Json ScenarioToJson(const Scenario& scenario) {
  const GcsGraph& g = scenario.graph;
  Json vertices = Json::array();
  for (const auto& v : g.vertices()) {
    vertices.push_back(
        {{"id", v.id}, {"dimension", v.dimension()}, {"set", json_util::FromSet(v.set)}});
  }
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"tail", e.tail},
                     {"head", e.head},
                     {"joint", json_util::FromSet(e.joint_set)},
                     {"length", json_util::FromMatrix(e.length.coeffs())}});
  }
  Json out{{"vertices", vertices},
           {"edges", edges},
           {"sources", g.sources()},
           {"targets", g.targets()}};
  if (!scenario.source_distribution.empty()) {
    Json dist = Json::array();
    for (const auto& d : scenario.source_distribution) dist.push_back(DistributionToJson(d));
    out["source_distribution"] = dist;
  }
  return out;
}

}  // namespace

Scenario ParseScenario(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ScenarioError(std::string("scenario: invalid JSON: ") + e.what());
  }
  Scenario scenario;
  GcsGraph& g = scenario.graph;
  std::vector<std::string> issues;
  try {
    for (const auto& v : j.at("vertices")) {
      const std::string id = v.at("id").get<std::string>();
      const int dim = v.at("dimension").get<int>();
      if (dim <= 0) throw ScenarioError("scenario: vertex '" + id + "' has no dimension");
      ConvexSet set = v.contains("set")
                          ? json_util::ToSet(v["set"], dim, "vertex '" + id + "'", issues)
                          : ConvexSet(dim);
      try {
        g.AddVertex(id, std::move(set));
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
      }
    }
    for (const auto& e : j.at("edges")) {
      const std::string tail = e.at("tail").get<std::string>();
      const std::string head = e.at("head").get<std::string>();
      const std::string where = "edge " + tail + "->" + head;
      const Matrix L = json_util::ToMatrix(e.at("length"));
      if (L.rows() != L.cols() || L.rows() < 1) {
        throw ScenarioError("scenario: " + where + ": length matrix must be square");
      }
      if (!json_util::IsSymmetric(L, kSymmetryTol)) {
        issues.push_back("asymmetric matrix in length of " + where);
      }
      const int n = static_cast<int>(L.rows()) - 1;
      ConvexSet joint = e.contains("joint") ? json_util::ToSet(e["joint"], n, where, issues)
                                            : ConvexSet(n);
      g.AddEdge(tail, head, QuadraticForm(L), std::move(joint));
    }
    for (const auto& s : j.at("sources")) g.AddSource(s.get<std::string>());
    for (const auto& t : j.at("targets")) g.AddTarget(t.get<std::string>());
    if (j.contains("source_distribution")) {
      for (const auto& d : j["source_distribution"]) {
        scenario.source_distribution.push_back(DistributionFromJson(d));
      }
    }
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("scenario: malformed document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ScenarioError*>(&e)) throw;
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  for (auto& issue : issues) g.AddInputIssue(std::move(issue));
  return scenario;
}

std::string SerializeScenario(const Scenario& scenario) {
  return ScenarioToJson(scenario).dump(1) + "\n";
}

Scenario LoadScenario(const std::string& path) { return ParseScenario(ReadFile(path)); }

void SaveScenario(const Scenario& scenario, const std::string& path) {
  WriteFile(path, SerializeScenario(scenario));
}

std::string Fingerprint(const Scenario& scenario) {
  const std::uint64_t h = Fnv1a64(ScenarioToJson(scenario).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
}

}  // namespace mqgcs
