#include "mqgcs/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json_util.hpp"
#include "sprocedure.hpp"

namespace mqgcs {

using json_util::Json;

namespace {

constexpr int kTargetSamples = 32;

double MinEigenvalue(const Matrix& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Json ToJson(const LowerBoundCertificate& cert) {
  Json vertices = Json::object();
  for (const auto& [id, form] : cert.bounds) {
    Json v{{"reachable", true}, {"bound", json_util::FromMatrix(form.coeffs())}};
    const auto it = cert.penalties.find(id);
    if (it != cert.penalties.end()) v["penalty"] = json_util::FromMatrix(it->second.coeffs());
    vertices[id] = v;
  }
  for (const auto& id : cert.unreachable) vertices[id] = Json{{"reachable", false}};
  Json cycles = Json::array();
  for (const auto& [pair, h] : cert.cycle_penalties) {
    cycles.push_back({{"pair", {pair.first, pair.second}}, {"value", h}});
  }
  Json multipliers = Json::object();
  for (const auto& [key, m] : cert.multipliers) {
    Json eq = Json::array();
    for (const auto& mu : m.equality) eq.push_back(json_util::FromVector(mu));
    multipliers[key] = {{"inequality", m.inequality}, {"equality", eq}, {"products", m.products}};
  }
  return Json{
      {"mode", ToString(cert.mode)},
      {"target_mode", ToString(cert.target_mode)},
      {"penalties", cert.penalties_enabled},
      {"target_dependent_penalties", cert.target_dependent_penalties},
      {"cycle_penalties", cert.cycle_penalties_enabled},
      {"pairwise_products", cert.pairwise_products},
      {"target", cert.target},
      {"target_point", json_util::FromVector(cert.target_point)},
      {"target_dimension", cert.target_dimension},
      {"vertices", vertices},
      {"cycle_penalty_values", cycles},
      {"objective", cert.objective},
      {"fingerprint", cert.fingerprint},
      {"normalization", {{"coord_scale", cert.coord_scale}, {"cost_scale", cert.cost_scale}}},
      {"multipliers", multipliers},
      {"solver", {{"iterations", cert.solver_iterations}, {"solve_time_s", cert.solve_time_s}}},
  };
}

}  // namespace

std::string SerializeCertificate(const LowerBoundCertificate& cert) {
  return ToJson(cert).dump(1) + "\n";
}

LowerBoundCertificate ParseCertificate(std::string_view text) {
  LowerBoundCertificate cert;
  try {
    const Json j = Json::parse(text);
    cert.mode = ParseBoundMode(j.at("mode").get<std::string>());
    cert.target_mode = ParseTargetMode(j.at("target_mode").get<std::string>());
    cert.penalties_enabled = j.at("penalties").get<bool>();
    cert.target_dependent_penalties = j.at("target_dependent_penalties").get<bool>();
    cert.cycle_penalties_enabled = j.at("cycle_penalties").get<bool>();
    cert.pairwise_products = j.at("pairwise_products").get<bool>();
    cert.target = j.at("target").get<std::string>();
    cert.target_point = json_util::ToVector(j.at("target_point"));
    cert.target_dimension = j.at("target_dimension").get<int>();
    for (const auto& [id, v] : j.at("vertices").items()) {
      if (!v.at("reachable").get<bool>()) {
        cert.unreachable.insert(id);
        continue;
      }
      cert.bounds.emplace(id, QuadraticForm(json_util::ToMatrix(v.at("bound"))));
      if (v.contains("penalty")) {
        cert.penalties.emplace(id, QuadraticForm(json_util::ToMatrix(v.at("penalty"))));
      }
    }
    for (const auto& c : j.at("cycle_penalty_values")) {
      const auto& pair = c.at("pair");
      cert.cycle_penalties[{pair.at(0).get<std::string>(), pair.at(1).get<std::string>()}] =
          c.at("value").get<double>();
    }
    cert.objective = j.at("objective").get<double>();
    cert.fingerprint = j.at("fingerprint").get<std::string>();
    cert.coord_scale = j.at("normalization").at("coord_scale").get<double>();
    cert.cost_scale = j.at("normalization").at("cost_scale").get<double>();
    for (const auto& [key, m] : j.at("multipliers").items()) {
      EdgeMultipliers em;
      em.inequality = m.at("inequality").get<std::vector<double>>();
      for (const auto& mu : m.at("equality")) em.equality.push_back(json_util::ToVector(mu));
      em.products = m.at("products").get<std::vector<double>>();
      cert.multipliers.emplace(key, std::move(em));
    }
    cert.solver_iterations = j.at("solver").at("iterations").get<int>();
    cert.solve_time_s = j.at("solver").at("solve_time_s").get<double>();
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed certificate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed certificate: ") + e.what());
  }
  return cert;
}

void SaveCertificate(const LowerBoundCertificate& cert, const std::string& path) {
  WriteFile(path, SerializeCertificate(cert));
}

LowerBoundCertificate LoadCertificate(const std::string& path) {
  return ParseCertificate(ReadFile(path));
}

VerificationReport VerifyCertificate(const Scenario& scenario, const LowerBoundCertificate& cert) {
  VerificationReport report;
  auto issue = [&](std::string text) { report.issues.push_back(std::move(text)); };
  if (cert.fingerprint != Fingerprint(scenario)) issue("fingerprint mismatch");

  const bool joint = cert.target_mode == TargetMode::kJointTarget;
  const GcsGraph graph = joint ? scenario.graph
                               : detail::PinTarget(scenario.graph, cert.target, cert.target_point);
  const detail::NormalizedProblem np =
      detail::Normalize(graph, cert.target, joint, cert.pairwise_products);
  const double kappa = np.cost_scale;
  const int nv = graph.num_vertices();
  const int k_t = joint ? np.frames[np.target].k : 0;

  // Bounds and penalties mapped back to normalized coordinates.
  std::vector<Matrix> J(nv);
  std::vector<Matrix> H(nv);
  report.min_convexity_eigenvalue = std::numeric_limits<double>::infinity();
  for (int v = 0; v < nv; ++v) {
    if (!np.reaches_target[v]) continue;
    const std::string& id = graph.vertices()[v].id;
    const auto it = cert.bounds.find(id);
    if (it == cert.bounds.end()) {
      issue("missing bound for vertex '" + id + "'");
      return report;
    }
    const Matrix A = detail::BoundFromReduced(np, v);
    if (it->second.coeffs().rows() != A.rows()) {
      issue("bound of vertex '" + id + "' has the wrong dimension");
      return report;
    }
    J[v] = A.transpose() * it->second.coeffs() * A / kappa;
    const int k = np.frames[v].k;
    if (k > 0) {
      report.min_convexity_eigenvalue =
          std::min(report.min_convexity_eigenvalue, MinEigenvalue(J[v].block(1, 1, k, k)));
    }
    const auto pt = cert.penalties.find(id);
    if (pt != cert.penalties.end()) {
      const QuadraticForm& h = pt->second;
      if (h.dimension() == 0 || (h.quadratic().isZero(0.0) && h.linear().isZero(0.0))) {
        H[v] = Matrix::Constant(1, 1, h.constant() / kappa);
      } else {
        const detail::VertexFrame& ft = np.frames[np.target];
        Matrix At = Matrix::Zero(ft.origin.size() + 1, ft.k + 1);
        At(0, 0) = 1.0;
        At.block(1, 0, ft.origin.size(), 1) = ft.origin;
        At.block(1, 1, ft.origin.size(), ft.k) = ft.P;
        H[v] = At.transpose() * h.coeffs() * At / kappa;
      }
    }
  }
  if (!std::isfinite(report.min_convexity_eigenvalue)) report.min_convexity_eigenvalue = 0.0;
  if (cert.mode == BoundMode::kQuadratic && report.min_convexity_eigenvalue < -kEdgeEigenvalueTol) {
    issue("non-convex bound (eigenvalue " + std::to_string(report.min_convexity_eigenvalue) + ")");
  }

  // Edge matrices.
  report.min_edge_eigenvalue = std::numeric_limits<double>::infinity();
  report.min_multiplier = std::numeric_limits<double>::infinity();
  for (const auto& b : np.edges) {
    const GcsEdge& edge = graph.edges()[b.edge];
    const std::string key = edge.tail + "->" + edge.head;
    const auto mit = cert.multipliers.find(key);
    if (mit == cert.multipliers.end()) {
      issue("missing multipliers for edge " + key);
      continue;
    }
    const EdgeMultipliers& m = mit->second;
    const std::size_t num_products =
        b.affine.empty() ? 0 : b.affine.size() * (b.affine.size() - 1) / 2;
    if (m.inequality.size() != b.inequalities.size() || m.equality.size() != b.equalities.size() ||
        m.products.size() != num_products) {
      issue("multiplier count mismatch on edge " + key);
      continue;
    }
    const int k_v = np.frames[b.tail].k;
    const int k_w = np.frames[b.head].k;
    Matrix M = b.length;
    M += detail::EmbedHomogeneous(
        J[b.head], detail::BoundEmbedding(k_w, b.head_offset, k_t, b.target_offset), b.dim);
    M -= detail::EmbedHomogeneous(J[b.tail],
                                  detail::BoundEmbedding(k_v, 0, k_t, b.target_offset), b.dim);
    if (H[b.head].size() == 1) {
      M(0, 0) += H[b.head](0, 0);
    } else if (H[b.head].size() > 1) {
      M += detail::EmbedHomogeneous(H[b.head], detail::BoundEmbedding(0, 0, k_t, b.target_offset),
                                    b.dim);
    }
    if (b.cycle >= 0 && cert.cycle_penalties_enabled) {
      auto [a, c] = np.cycles[b.cycle];
      std::string ia = graph.vertices()[a].id, ic = graph.vertices()[c].id;
      if (ic < ia) std::swap(ia, ic);
      const auto cit = cert.cycle_penalties.find({ia, ic});
      if (cit != cert.cycle_penalties.end()) M(0, 0) += cit->second / kappa;
    }
    for (std::size_t i = 0; i < b.inequalities.size(); ++i) {
      M -= m.inequality[i] * b.inequalities[i];
      report.min_multiplier = std::min(report.min_multiplier, m.inequality[i]);
    }
    for (std::size_t i = 0; i < b.equalities.size(); ++i) {
      if (m.equality[i].size() != b.dim + 1) {
        issue("equality multiplier size mismatch on edge " + key);
        continue;
      }
      M -= AffineProduct(m.equality[i], b.equalities[i]);
    }
    std::size_t p = 0;
    for (std::size_t i = 0; i < b.affine.size(); ++i) {
      for (std::size_t j = i + 1; j < b.affine.size(); ++j, ++p) {
        M -= m.products[p] * AffineProduct(b.affine[i], b.affine[j]);
        report.min_multiplier = std::min(report.min_multiplier, m.products[p]);
      }
    }
    const double eig = MinEigenvalue(M);
    report.min_edge_eigenvalue = std::min(report.min_edge_eigenvalue, eig);
    if (eig < -kEdgeEigenvalueTol) {
      issue("edge " + key + " matrix has eigenvalue " + std::to_string(eig));
    }
    ++report.edges_checked;
  }
  if (!std::isfinite(report.min_edge_eigenvalue)) report.min_edge_eigenvalue = 0.0;
  if (!std::isfinite(report.min_multiplier)) report.min_multiplier = 0.0;
  if (report.min_multiplier < -kNonnegativityTol) issue("negative S-procedure multiplier");

  // Target identity and penalty sign.
  std::vector<Vector> target_points;
  if (joint) {
    std::mt19937_64 rng(Fnv1a64(cert.target));
    target_points = SampleSet(scenario.graph.vertex(cert.target).set, kTargetSamples, rng);
  } else {
    target_points.push_back(cert.target_point);
  }
  report.min_penalty = std::numeric_limits<double>::infinity();
  for (const auto& x_t : target_points) {
    double value = 0.0;
    if (joint) {
      Vector z(2 * x_t.size());
      z << x_t, x_t;
      value = cert.bounds.at(cert.target).Evaluate(z);
    } else {
      value = cert.bounds.at(cert.target).Evaluate(x_t);
    }
    const double error = std::abs(value + cert.PenaltySum(x_t));
    report.target_identity_error = std::max(report.target_identity_error, error);
    for (const auto& [id, h] : cert.penalties) {
      report.min_penalty = std::min(report.min_penalty, cert.Penalty(id, x_t));
    }
  }
  for (const auto& [pair, h] : cert.cycle_penalties) {
    report.min_penalty = std::min(report.min_penalty, h);
  }
  if (!std::isfinite(report.min_penalty)) report.min_penalty = 0.0;
  if (report.target_identity_error > kTargetIdentityTol) {
    issue("target identity violated by " + std::to_string(report.target_identity_error));
  }
  if (report.min_penalty < -kNonnegativityTol) issue("negative penalty");
  return report;
}

}  // namespace mqgcs
