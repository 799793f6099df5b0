#include "mqgcs/moments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mqgcs {

namespace {

constexpr int kMaxCornerCheck = 12;

Vector Homogeneous(const Vector& x) {
  Vector z(x.size() + 1);
  z << 1.0, x;
  return z;
}

void RequireInside(const ConvexSet& set, const Vector& x, const char* what) {
  if (x.size() != set.dimension()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
  if (!set.Contains(x)) throw std::invalid_argument(std::string(what) + ": support outside set");
}

}  // namespace

SourceDistribution SourceDistribution::UniformBox(std::string vertex, Vector lower, Vector upper,
                                                  double weight) {
  SourceDistribution d;
  d.vertex = std::move(vertex);
  d.kind = DistributionKind::kUniformBox;
  d.lower = std::move(lower);
  d.upper = std::move(upper);
  d.weight = weight;
  return d;
}

SourceDistribution SourceDistribution::PointMass(std::string vertex, Vector point, double weight) {
  SourceDistribution d;
  d.vertex = std::move(vertex);
  d.kind = DistributionKind::kPointMass;
  d.point = std::move(point);
  d.weight = weight;
  return d;
}

SourceDistribution SourceDistribution::SampleSet(std::string vertex, std::vector<Vector> samples,
                                                 double weight) {
  SourceDistribution d;
  d.vertex = std::move(vertex);
  d.kind = DistributionKind::kSampleSet;
  d.samples = std::move(samples);
  d.weight = weight;
  return d;
}

std::string ToString(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kUniformBox: return "uniform_box";
    case DistributionKind::kPointMass: return "point_mass";
    case DistributionKind::kSampleSet: return "sample_set";
  }
  return "unknown";
}

DistributionKind ParseDistributionKind(const std::string& name) {
  if (name == "uniform_box") return DistributionKind::kUniformBox;
  if (name == "point_mass") return DistributionKind::kPointMass;
  if (name == "sample_set") return DistributionKind::kSampleSet;
  throw std::invalid_argument("unknown distribution kind '" + name + "'");
}

Matrix SourceMoments(const ConvexSet& set, const SourceDistribution& dist) {
  const int n = set.dimension();
  switch (dist.kind) {
    case DistributionKind::kPointMass: {
      RequireInside(set, dist.point, "SourceMoments");
      const Vector z = Homogeneous(dist.point);
      return z * z.transpose();
    }
    case DistributionKind::kSampleSet: {
      if (dist.samples.empty()) throw std::invalid_argument("SourceMoments: empty sample set");
      Matrix M = Matrix::Zero(n + 1, n + 1);
      for (const auto& x : dist.samples) {
        RequireInside(set, x, "SourceMoments");
        const Vector z = Homogeneous(x);
        M.noalias() += z * z.transpose();
      }
      return M / static_cast<double>(dist.samples.size());
    }
    case DistributionKind::kUniformBox: {
      const Vector& l = dist.lower;
      const Vector& u = dist.upper;
      if (l.size() != n || u.size() != n) {
        throw std::invalid_argument("SourceMoments: dimension mismatch");
      }
      if (!l.allFinite() || !u.allFinite()) {
        throw std::invalid_argument("SourceMoments: unbounded box");
      }
      if ((u - l).minCoeff() < 0.0) throw std::invalid_argument("SourceMoments: empty box");
      // A convex set contains the box iff it contains its corners.
      if (n <= kMaxCornerCheck) {
        for (long mask = 0; mask < (1L << n); ++mask) {
          Vector corner(n);
          for (int i = 0; i < n; ++i) corner(i) = (mask >> i) & 1 ? u(i) : l(i);
          RequireInside(set, corner, "SourceMoments");
        }
      } else {
        RequireInside(set, l, "SourceMoments");
        RequireInside(set, u, "SourceMoments");
      }
      const Vector mean = 0.5 * (l + u);
      Matrix M(n + 1, n + 1);
      M(0, 0) = 1.0;
      M.block(1, 0, n, 1) = mean;
      M.block(0, 1, 1, n) = mean.transpose();
      M.bottomRightCorner(n, n) = mean * mean.transpose();
      for (int i = 0; i < n; ++i) {
        M(i + 1, i + 1) = (l(i) * l(i) + l(i) * u(i) + u(i) * u(i)) / 3.0;
      }
      return M;
    }
  }
  throw std::invalid_argument("SourceMoments: unknown distribution kind");
}

void ValidateDistributions(const GcsGraph& graph, const std::vector<SourceDistribution>& dists) {
  if (dists.empty()) throw std::invalid_argument("source distribution is empty");
  double total = 0.0;
  for (const auto& d : dists) {
    const bool is_source = std::find(graph.sources().begin(), graph.sources().end(), d.vertex) !=
                           graph.sources().end();
    if (!is_source) {
      throw std::invalid_argument("source distribution refers to non-source '" + d.vertex + "'");
    }
    if (!(d.weight >= 0.0)) throw std::invalid_argument("negative source weight");
    total += d.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("source weights sum to " + std::to_string(total) + ", not 1");
  }
}

std::vector<SourceDistribution> DefaultSourceDistribution(const GcsGraph& graph, int samples) {
  std::vector<SourceDistribution> out;
  const auto& sources = graph.sources();
  if (sources.empty()) return out;
  const double w = 1.0 / static_cast<double>(sources.size());
  for (const auto& s : sources) {
    const ConvexSet& set = graph.vertex(s).set;
    if (auto p = set.SingletonPoint()) {
      out.push_back(SourceDistribution::PointMass(s, *p, w));
      continue;
    }
    std::mt19937_64 rng(Fnv1a64(s));
    out.push_back(SourceDistribution::SampleSet(s, mqgcs::SampleSet(set, samples, rng), w));
  }
  return out;
}

}  // namespace mqgcs
