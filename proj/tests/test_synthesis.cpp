#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mqgcs/certificate.hpp"
#include "mqgcs/moments.hpp"
#include "mqgcs/oracle.hpp"
#include "mqgcs/scenarios.hpp"
#include "mqgcs/synthesis.hpp"

namespace mqgcs {
namespace {

Vector V1(double a) { return Vector{{a}}; }
Vector V2(double a, double b) { return Vector{{a, b}}; }

// s -> a -> t on singleton points with constant lengths 2 and 3.
Scenario SingletonChain() {
  Scenario sc;
  sc.graph.AddVertex("s", ConvexSet::Point(V1(0.0)));
  sc.graph.AddVertex("a", ConvexSet::Point(V1(1.0)));
  sc.graph.AddVertex("t", ConvexSet::Point(V1(2.0)));
  sc.graph.AddEdge("s", "a", QuadraticForm::Constant(2, 2.0));
  sc.graph.AddEdge("a", "t", QuadraticForm::Constant(2, 3.0));
  sc.graph.AddSource("s");
  sc.graph.AddTarget("t");
  return sc;
}

SynthesisOptions NoPenalties() {
  SynthesisOptions o;
  o.penalties = false;
  return o;
}

TEST(MomentsTest, PointMass) {
  const Matrix M = SourceMoments(ConvexSet::Box(V2(0, 0), V2(5, 5)),
                                 SourceDistribution::PointMass("s", V2(3.0, 4.0)));
  const Vector e{{1.0, 3.0, 4.0}};
  EXPECT_LT((M - e * e.transpose()).norm(), 1e-12);
}

TEST(MomentsTest, UniformUnitInterval) {
  const Matrix M = SourceMoments(ConvexSet::Box(V1(0.0), V1(1.0)),
                                 SourceDistribution::UniformBox("s", V1(0.0), V1(1.0)));
  EXPECT_NEAR(M(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(M(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(M(1, 1), 1.0 / 3.0, 1e-12);
}

TEST(SynthesisTest, SingletonChainMatchesFloydWarshall) {
  const Scenario sc = SingletonChain();
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t", NoPenalties());
  const DiscreteApspTables fw = FloydWarshall(ToDiscreteGraph(sc.graph));
  EXPECT_NEAR(fw.cost[0][2], 5.0, 1e-12);
  EXPECT_NEAR(EvaluateBound(sc.graph, cert, "s", V1(0.0)), fw.cost[0][2], 1e-5);
  EXPECT_NEAR(EvaluateBound(sc.graph, cert, "a", V1(1.0)), fw.cost[1][2], 1e-5);
  EXPECT_NEAR(EvaluateBound(sc.graph, cert, "t", V1(2.0)), 0.0, 1e-6);
  EXPECT_TRUE(VerifyCertificate(sc, cert).ok());
}

TEST(SynthesisTest, TargetValueIsMinusPenaltySum) {
  const Scenario sc = BuildTwoSegmentScenario();
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t");
  const Vector xt = V2(10.0, -1.0);
  EXPECT_NEAR(EvaluateBound(sc.graph, cert, "t", xt), -cert.PenaltySum(), 1e-6);
  EXPECT_TRUE(VerifyCertificate(sc, cert).ok());
}

TEST(SynthesisTest, AffineObjectiveNotAboveQuadratic) {
  const Scenario sc = BuildTwoSegmentScenario();
  SynthesisOptions affine;
  affine.mode = BoundMode::kAffine;
  const LowerBoundCertificate a = SynthesizeBounds(sc, "t", affine);
  const LowerBoundCertificate q = SynthesizeBounds(sc, "t");
  // Quadratic solves may stop at a relative duality gap of 1e-4 (see the
  // solver's stalled-gap acceptance), so compare at that accuracy.
  EXPECT_LE(a.objective, q.objective + 1e-4 * (1.0 + std::abs(q.objective)));
  EXPECT_TRUE(VerifyCertificate(sc, a).ok());
}

TEST(SynthesisTest, BoundsAreValidOnNineVertexInstance) {
  const Scenario sc = BuildNineVertexScenario();
  SynthesisOptions opts = NoPenalties();
  opts.pairwise_products = true;
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t", opts);
  EXPECT_TRUE(VerifyCertificate(sc, cert).ok());
  const Vector xt = *sc.graph.vertex("t").set.SingletonPoint();
  std::mt19937_64 rng(3);
  for (const Vector& x : SampleSet(sc.graph.vertex("s").set, 5, rng)) {
    const double exact = ExactSppGcs(sc.graph, "s", x, "t", xt).cost;
    EXPECT_LE(EvaluateBound(sc.graph, cert, "s", x), exact + 1e-6);
  }
}

TEST(SynthesisTest, AllTargetsSingleTargetEqualsDirectSolve) {
  const Scenario sc = SingletonChain();
  const auto all = SynthesizeAllTargets(sc, {"t"}, NoPenalties());
  ASSERT_EQ(all.size(), 1u);
  const LowerBoundCertificate one = SynthesizeBounds(sc, "t", NoPenalties());
  EXPECT_EQ(all.at("t").objective, one.objective);
}

TEST(SynthesisTest, NoTargetsIsAnError) {
  try {
    SynthesizeAllTargets(SingletonChain(), {});
    FAIL() << "expected SynthesisError";
  } catch (const SynthesisError& e) {
    EXPECT_NE(std::string(e.what()).find("no targets"), std::string::npos);
  }
}

TEST(SynthesisTest, UnknownTargetIsAnError) {
  EXPECT_THROW(SynthesizeBounds(SingletonChain(), "nope"), SynthesisError);
}

TEST(CertificateTest, SerializationRoundTrip) {
  const Scenario sc = BuildTwoSegmentScenario();
  const LowerBoundCertificate cert = SynthesizeBounds(sc, "t");
  const LowerBoundCertificate back = ParseCertificate(SerializeCertificate(cert));
  EXPECT_EQ(SerializeCertificate(back), SerializeCertificate(cert));
  EXPECT_TRUE(VerifyCertificate(sc, back).ok());
}

TEST(CertificateTest, TamperedBoundFailsVerification) {
  const Scenario sc = BuildTwoSegmentScenario();
  LowerBoundCertificate cert = SynthesizeBounds(sc, "t");
  QuadraticForm& js = cert.bounds.at("s");
  Matrix c = js.coeffs();
  c(0, 0) += 10.0;
  js = QuadraticForm(c);
  EXPECT_FALSE(VerifyCertificate(sc, cert).ok());
}

TEST(CertificateTest, FingerprintMismatchIsReported) {
  LowerBoundCertificate cert = SynthesizeBounds(SingletonChain(), "t", NoPenalties());
  cert.fingerprint = "0000";
  EXPECT_FALSE(VerifyCertificate(SingletonChain(), cert).ok());
}

}  // namespace
}  // namespace mqgcs
