#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mqgcs/scenario_io.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {

/// Canonical JSON of a certificate: mode flags, per-vertex homogeneous bound
/// and penalty matrices (row-major), 2-cycle penalties, objective, scenario
/// fingerprint, normalization scales and S-procedure multipliers.
std::string SerializeCertificate(const LowerBoundCertificate& cert);
/// Throws std::runtime_error on malformed input.
LowerBoundCertificate ParseCertificate(std::string_view text);

void SaveCertificate(const LowerBoundCertificate& cert, const std::string& path);
LowerBoundCertificate LoadCertificate(const std::string& path);

/// Outcome of an independent re-check of a certificate against its scenario.
struct VerificationReport {
  /// Smallest eigenvalue over the reassembled (normalized) edge matrices.
  double min_edge_eigenvalue = 0.0;
  /// Largest |J_t(x_t) + sum of penalties| (over sampled x_t in joint mode).
  double target_identity_error = 0.0;
  /// Smallest scalar penalty (or penalty value at sampled x_t).
  double min_penalty = 0.0;
  /// Smallest eigenvalue of the x_v block of any bound (normalized units).
  double min_convexity_eigenvalue = 0.0;
  /// Smallest inequality or product multiplier.
  double min_multiplier = 0.0;
  int edges_checked = 0;
  std::vector<std::string> issues;

  bool ok() const { return issues.empty(); }
};

/// Thresholds used by VerifyCertificate.
inline constexpr double kEdgeEigenvalueTol = 1e-7;
inline constexpr double kTargetIdentityTol = 1e-6;
inline constexpr double kNonnegativityTol = 1e-9;

/// Rebuilds every edge constraint from the scenario, the certificate's bounds,
/// penalties and stored multipliers, without consulting the solver, and checks
/// the certificate invariants. Also reports a fingerprint mismatch.
VerificationReport VerifyCertificate(const Scenario& scenario, const LowerBoundCertificate& cert);

}  // namespace mqgcs
