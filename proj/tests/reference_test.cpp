#include <gtest/gtest.h>

#include <cmath>

#include "lmc/reference.hpp"
#include "lmc/synthgen.hpp"
#include "test_util.hpp"

namespace lmc {
namespace {

using testing::line;

DistanceMatrix line_matrix(const std::vector<double>& xs) { return DistanceMatrix::from(line(xs)); }

TEST(ExactKMedian, SmallLines) {
  KMedianResult r = exact_kmedian(line_matrix({0, 1, 5}), 2);
  EXPECT_EQ(r.opt_value, 1.0);
  EXPECT_EQ(r.centers, (std::vector<PointIndex>{0, 2}));
  EXPECT_EQ(r.clustering.assignment, (std::vector<ClusterId>{0, 0, 1}));

  KMedianResult one = exact_kmedian(line_matrix({0, 1, 2}), 1);
  EXPECT_EQ(one.opt_value, 2.0);
  EXPECT_EQ(one.centers, (std::vector<PointIndex>{1}));
}

TEST(ExactKMedian, KEqualsNAndLimits) {
  EXPECT_EQ(exact_kmedian(line_matrix({4, 8, 15, 16}), 4).opt_value, 0.0);
  EXPECT_THROW(exact_kmedian(line_matrix({1, 2}), 3), Error);
  EXPECT_THROW(exact_kmedian(DistanceMatrix(26), 2), Error);
}

TEST(ExactKMedian, MoreCentersNeverHurt) {
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng.uniform_index(10);
    DistanceMatrix m = DistanceMatrix::from(testing::random_points(rng, n, 2));
    for (std::size_t k = 1; k < n; ++k) EXPECT_GE(exact_kmedian(m, k).opt_value, exact_kmedian(m, k + 1).opt_value);
  }
}

TEST(ClassifyGoodBad, FourPointLine) {
  StructureReport r = classify_good_bad(line_matrix({0, 1, 100, 101}), 2, 1.0, 0.05);
  EXPECT_EQ(r.opt_value, 2.0);
  EXPECT_EQ(r.opt_centers, (std::vector<PointIndex>{0, 2}));
  EXPECT_DOUBLE_EQ(r.w, 0.5);
  EXPECT_NEAR(r.d_crit, 0.5 / 0.85, 1e-12);
  EXPECT_EQ(r.good, (std::vector<char>{1, 0, 1, 0}));
  EXPECT_EQ(r.good_sets[0], (std::vector<PointIndex>{0}));
  EXPECT_EQ(r.good_sets[1], (std::vector<PointIndex>{2}));
  EXPECT_EQ(r.bad_count, 2u);
  EXPECT_EQ(r.b, 4u);  // ceil(18 * 0.05 * 4) = ceil(3.6)
  EXPECT_EQ(r.w2_x[1], 99.0);
}

TEST(ClassifyGoodBad, ZeroOptimumRule) {
  StructureReport r = classify_good_bad(line_matrix({0, 0, 0, 5, 5}), 2, 1.0, 0.05);
  EXPECT_EQ(r.opt_value, 0.0);
  EXPECT_TRUE(r.degenerate());
  EXPECT_EQ(r.bad_count, 0u);
  StructureCertificate c = certify_structure(r, [](PointIndex a, PointIndex b) {
    const double xs[] = {0, 0, 0, 5, 5};
    return std::abs(xs[a] - xs[b]);
  });
  EXPECT_TRUE(c.all());
}

TEST(ClassifyGoodBad, LargeAlphaEmptiesGoodSets) {
  DistanceMatrix m = line_matrix({0, 1, 100, 101});
  EXPECT_EQ(classify_good_bad(m, 2, 1.0, 0.05).bad_count, 2u);
  // alpha = 10: d_crit = 5.88, the gap must reach 100; only point 1 (gap 98) fails
  EXPECT_EQ(classify_good_bad(m, 2, 10.0, 0.05).bad_count, 1u);
  // once 17 d_crit exceeds every gap nothing is good
  for (double alpha : {100.0, 1000.0}) EXPECT_EQ(classify_good_bad(m, 2, alpha, 0.05).bad_count, 4u) << alpha;
}

TEST(CertifyStructure, ScaledDownTheoryInstances) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratorSpec s = preset_spec("theory", seed);
    s.n = 24;
    s.k = 3;
    LabeledDataset ds = generate(s);
    DistanceMatrix m = DistanceMatrix::from(ds.points);
    StructureReport r = classify_good_bad(m, 3, 1.0, 0.02);
    StructureCertificate c = certify_structure(r, [&](PointIndex a, PointIndex b) { return m(a, b); });
    EXPECT_TRUE(c.within_ok) << seed << " max_within=" << c.max_within << " d_crit=" << r.d_crit;
    EXPECT_TRUE(c.between_ok) << seed << " min_between=" << c.min_between;
    EXPECT_TRUE(c.bad_ok) << seed;
    EXPECT_EQ(c.empty_good_sets, 0u);
  }
}

TEST(CEProperty, TwoPairLine) {
  DistanceMatrix m = line_matrix({0, 1, 100, 101});
  Clustering pairs({0, 0, 1, 1}, 2);
  CEPropertyReport r = check_ce_property(m, 2, 1.5, 0.3, pairs);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.partitions, 8u);  // 1 one-block + 7 two-block partitions
  EXPECT_EQ(r.near_optimal, 1u);
  EXPECT_FALSE(verify_ce_property(m, 2, 1.5, 0.0, pairs));
}

TEST(CEProperty, UniformSquareFails) {
  // corners of a unit square: both adjacent pairings have the same cost
  EuclideanOracle sq(4, 2, {0, 0, 1, 0, 1, 1, 0, 1});
  DistanceMatrix m = DistanceMatrix::from(sq);
  EXPECT_FALSE(verify_ce_property(m, 2, 1.01, 0.01, Clustering({0, 0, 1, 1}, 2)));
}

TEST(CEProperty, PartitionCountMatchesStirling) {
  // partitions of 6 points into at most 3 blocks: S(6,1)+S(6,2)+S(6,3) = 1+31+90
  DistanceMatrix m = line_matrix({0, 1, 2, 3, 4, 5});
  EXPECT_EQ(check_ce_property(m, 3, 1.0, 1.0, Clustering({0, 0, 1, 1, 2, 2}, 3)).partitions, 122u);
  EXPECT_THROW(check_ce_property(DistanceMatrix(13), 2, 1.0, 0.1, Clustering(std::vector<ClusterId>(13, 0), 1)),
               Error);
}

TEST(Coverage, ExhaustiveSelectionAlwaysCovers) {
  LabeledDataset ds = generate([] {
    GeneratorSpec s = preset_spec("theory", 2);
    s.n = 200;
    return s;
  }());
  StructureReport r = planted_structure(ds, 1.0, 0.02);
  CoverageEstimate all = estimate_coverage_probability(ds.points, r.good_sets, r.d_crit, 200, 200, 5, 1);
  EXPECT_EQ(all.fraction, 1.0);
  CoverageEstimate one = estimate_coverage_probability(ds.points, r.good_sets, r.d_crit, 200, 1, 50, 1);
  EXPECT_LT(one.fraction, 1.0);
}

TEST(Coverage, EmptyGoodSetIsUncovered) {
  EuclideanOracle o = line({0, 1, 2});
  CoverageEstimate e = estimate_coverage_probability(o, {{0}, {}}, 1.0, 3, 3, 4, 1);
  EXPECT_EQ(e.empty_good_sets, 1u);
  EXPECT_EQ(e.fraction, 0.0);
}

TEST(Coverage, ShortfallRateWithinDelta) {
  LabeledDataset ds = generate(testing::feasible_theory_spec(5));
  StructureReport r = planted_structure(ds, testing::kFeasibleAlpha, testing::kFeasibleEpsilon);
  TheoryParams p = derive_theory_params(2000, 8, testing::kFeasibleAlpha, testing::kFeasibleEpsilon, 0.1);
  ASSERT_LE(r.bad_count, p.b);
  const double rate = good_landmark_shortfall_rate(ds.points, r.good, 8, p.q, p.iter, 60, 3);
  EXPECT_LE(rate, 0.1);
}

TEST(BruteForceDist, Basics) {
  Clustering a({0, 0, 1, 1}, 2);
  EXPECT_EQ(brute_force_dist(a, a), 0.0);
  EXPECT_EQ(brute_force_dist(a, Clustering({0, 0, 0, 1}, 2)), 0.25);
  // k = 1: nothing to permute, everything matches
  EXPECT_EQ(brute_force_dist(Clustering({0, 0, 0}, 1), Clustering({0, 0, 0}, 1)), 0.0);
  EXPECT_THROW(brute_force_dist(Clustering::from_labels({0, 1, 2, 3, 4, 5, 6, 7, 8}),
                                Clustering::from_labels({0, 1, 2, 3, 4, 5, 6, 7, 8})),
               Error);
}

}  // namespace
}  // namespace lmc
