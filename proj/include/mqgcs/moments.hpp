#pragma once

#include <string>
#include <vector>

#include "mqgcs/graph.hpp"

namespace mqgcs {

enum class DistributionKind { kUniformBox, kPointMass, kSampleSet };

/// Anticipated distribution of query points at one source vertex.
struct SourceDistribution {
  std::string vertex;
  DistributionKind kind = DistributionKind::kPointMass;
  Vector lower;  // uniform_box
  Vector upper;  // uniform_box
  Vector point;  // point_mass
  std::vector<Vector> samples;  // sample_set
  double weight = 1.0;

  static SourceDistribution UniformBox(std::string vertex, Vector lower, Vector upper,
                                       double weight = 1.0);
  static SourceDistribution PointMass(std::string vertex, Vector point, double weight = 1.0);
  static SourceDistribution SampleSet(std::string vertex, std::vector<Vector> samples,
                                      double weight = 1.0);
};

std::string ToString(DistributionKind kind);
/// Throws std::invalid_argument for unknown names.
DistributionKind ParseDistributionKind(const std::string& name);

/// E[[1;x][1;x]^T] under the distribution: closed form for boxes and point
/// masses, the sample average otherwise. Throws std::invalid_argument when the
/// support leaves `set` (tolerance 1e-7) or the box is not finite.
Matrix SourceMoments(const ConvexSet& set, const SourceDistribution& dist);

/// Checks that every entry refers to a source vertex, weights are nonnegative
/// and sum to one. Throws std::invalid_argument otherwise.
void ValidateDistributions(const GcsGraph& graph, const std::vector<SourceDistribution>& dists);

/// Default used when a scenario carries no distribution: equal weights over
/// the sources; a point mass for singleton sets, otherwise `samples`
/// deterministic points of the set.
std::vector<SourceDistribution> DefaultSourceDistribution(const GcsGraph& graph,
                                                          int samples = 64);

}  // namespace mqgcs
