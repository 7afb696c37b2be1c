#include <gtest/gtest.h>

#include "lmc/landmark_clustering.hpp"
#include "lmc/metrics.hpp"
#include "lmc/synthgen.hpp"
#include "test_util.hpp"

namespace lmc {
namespace {

using testing::line;

LandmarkSet set_from(const DistanceOracle& o, const std::vector<PointIndex>& landmarks) {
  QueryLedger ledger;
  LandmarkSet set;
  for (PointIndex l : landmarks) {
    set.landmarks.push_back(l);
    set.rows.push_back(query_one_vs_all(o, l, ledger));
  }
  return set;
}

TEST(AssignToLandmarks, LineIsUnchanged) {
  EuclideanOracle o = line({0, 1, 10, 11, 20, 21});
  LandmarkSet set = set_from(o, {0, 2, 4});
  Clustering partial({0, 0, 1, 1, 2, 2}, 3);
  EXPECT_EQ(assign_to_landmarks(partial, set), partial);
}

TEST(AssignToLandmarks, FillsUnassignedAndUsesLowestIndexLandmark) {
  EuclideanOracle o = line({0, 1, 2, 9, 10, 11});
  // cluster 0 holds landmarks 2 and 0; the representative is point 0
  LandmarkSet set = set_from(o, {2, 0, 5});
  Clustering partial({0, kUnassigned, 0, kUnassigned, kUnassigned, 1}, 2);
  Clustering full = assign_to_landmarks(partial, set);
  EXPECT_EQ(full.assignment, (std::vector<ClusterId>{0, 0, 0, 1, 1, 1}));
}

TEST(AssignToLandmarks, TieGoesToLowerCluster) {
  EuclideanOracle o = line({0, 5, 10});
  LandmarkSet set = set_from(o, {2, 0});
  Clustering partial({1, kUnassigned, 0}, 2);
  EXPECT_EQ(assign_to_landmarks(partial, set).assignment, (std::vector<ClusterId>{1, 0, 0}));
}

TEST(AssignToLandmarks, AllInfinitePointGoesToClusterZero) {
  DistanceMatrix m(3, 1.0);
  m(2, 0) = m(0, 2) = m(2, 1) = m(1, 2) = kInf;
  MatrixOracle o(m);
  LandmarkSet set = set_from(o, {1, 0});
  Clustering partial({1, 0, kUnassigned}, 2);
  EXPECT_EQ(assign_to_landmarks(partial, set).assignment[2], 0);
}

TEST(AssignToLandmarks, ClusterWithoutLandmark) {
  EuclideanOracle o = line({0, 1, 2});
  LandmarkSet set = set_from(o, {0});
  try {
    assign_to_landmarks(Clustering({0, 1, 1}, 2), set);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cluster without landmark"), std::string::npos);
  }
}

class FeasibleTheory : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { ds_ = new LabeledDataset(generate(testing::feasible_theory_spec(3))); }
  static void TearDownTestSuite() { delete ds_; }
  static LabeledDataset* ds_;
};
LabeledDataset* FeasibleTheory::ds_ = nullptr;

TEST_F(FeasibleTheory, RecoversPlantedClusters) {
  const TheoryParams p = derive_theory_params(2000, 8, testing::kFeasibleAlpha, testing::kFeasibleEpsilon, 0.1);
  for (std::uint64_t seed : {1, 2, 3}) {
    QueryLedger ledger;
    LandmarkRun run =
        landmark_cluster_theory(ds_->points, 8, testing::kFeasibleAlpha, testing::kFeasibleEpsilon, 0.1, seed, ledger);
    ASSERT_TRUE(run.found()) << "seed " << seed;
    EXPECT_EQ(clustering_dist(*run.clustering, ds_->labels).cost, 0.0);
    EXPECT_TRUE(run.clustering->is_complete());
    EXPECT_EQ(ledger.count(), p.iter);
    EXPECT_EQ(run.report.queries, p.iter);
    EXPECT_EQ(run.report.landmarks, p.iter);
    EXPECT_EQ(run.report.b, std::optional<std::size_t>(p.b));
  }
}

TEST_F(FeasibleTheory, CachingIsInvisible) {
  QueryLedger cached, uncached(false);
  LandmarkRun a = landmark_cluster_theory(ds_->points, 8, 17, 0.015, 0.1, 9, cached);
  LandmarkRun b = landmark_cluster_theory(ds_->points, 8, 17, 0.015, 0.1, 9, uncached);
  EXPECT_EQ(a.clustering, b.clustering);
  EXPECT_EQ(a.landmark_set.landmarks, b.landmark_set.landmarks);
  EXPECT_EQ(a.report.radius, b.report.radius);
  EXPECT_EQ(cached.count(), uncached.count());
}

TEST_F(FeasibleTheory, DeterministicReport) {
  LandmarkRun a = landmark_cluster_theory(ds_->points, 8, 17, 0.015, 0.1, 4);
  LandmarkRun b = landmark_cluster_theory(ds_->points, 8, 17, 0.015, 0.1, 4);
  auto ja = a.report.to_json(), jb = b.report.to_json();
  ja.erase("wall_ms");
  jb.erase("wall_ms");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(a.clustering, b.clustering);
}

TEST_F(FeasibleTheory, ScaleEquivariance) {
  std::vector<double> scaled = ds_->points.coordinates();
  for (double& v : scaled) v *= 4.0;  // power of two keeps every comparison exact
  EuclideanOracle big(ds_->points.size(), ds_->points.dim(), scaled);
  for (std::uint64_t seed : {5, 6}) {
    LandmarkRun a = landmark_cluster_theory(ds_->points, 8, 17, 0.015, 0.1, seed);
    LandmarkRun b = landmark_cluster_theory(big, 8, 17, 0.015, 0.1, seed);
    EXPECT_EQ(a.clustering, b.clustering);
    HeuristicOptions opt{.k = 8};
    EXPECT_EQ(landmark_cluster_heuristic(ds_->points, opt, seed).clustering,
              landmark_cluster_heuristic(big, opt, seed).clustering);
  }
}

TEST(LandmarkClusterTheory, BlobGivesNoCluster) {
  GeneratorSpec s = preset_spec("blob", 2);
  s.k = 2;
  LabeledDataset ds = generate(s);
  QueryLedger ledger;
  LandmarkRun run = landmark_cluster_theory(ds.points, 2, 1.0, 0.02, 0.1, 1, ledger);
  EXPECT_FALSE(run.found());
  EXPECT_TRUE(run.report.no_cluster);
  EXPECT_EQ(ledger.count(), run.report.landmarks);
}

TEST(LandmarkClusterTheory, RejectionBeforeAnyQuery) {
  EuclideanOracle o = line({0, 1, 2, 3});
  QueryLedger ledger;
  EXPECT_THROW(landmark_cluster_theory(o, 2, 1.0, 0.2, 0.1, 1, ledger), Error);
  EXPECT_EQ(ledger.count(), 0u);
}

TEST(LandmarkClusterHeuristic, PfamLikeDefaults) {
  LabeledDataset ds = generate(preset_spec("pfam-like", 1));
  QueryLedger ledger;
  LandmarkRun run = landmark_cluster_heuristic(ds.points, HeuristicOptions{.k = 8}, 1, ledger);
  ASSERT_TRUE(run.found()) << run.report.advice;
  EXPECT_TRUE(run.clustering->is_complete());
  EXPECT_EQ(run.report.queries, 320u);
  EXPECT_EQ(ledger.count(), 320u);
  EXPECT_EQ(run.report.q, 2000u);
  EXPECT_EQ(run.report.s_min, 50u);
  EXPECT_EQ(run.report.n_prime, 4000u);
}

TEST(LandmarkClusterHeuristic, AbsurdSminGivesNoClusterWithAdvice) {
  Rng rng(1);
  EuclideanOracle o = testing::random_points(rng, 100, 2);
  HeuristicOptions opt{.k = 2};
  opt.s_min = 100;
  LandmarkRun run = landmark_cluster_heuristic(o, opt, 1);
  EXPECT_FALSE(run.found());
  EXPECT_NE(run.report.advice.find("s_min"), std::string::npos);
}

TEST(LandmarkClusterHeuristic, BudgetBelowK) {
  EuclideanOracle o = line({0, 1, 2, 3});
  HeuristicOptions opt{.k = 2};
  opt.landmark_budget = 1;
  try {
    landmark_cluster_heuristic(o, opt, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fewer landmarks than clusters cannot yield k components"),
              std::string::npos);
  }
}

TEST(LandmarkClusterHeuristic, ResolvedDefaults) {
  HeuristicParams p = resolve_heuristic(800, HeuristicOptions{.k = 8});
  EXPECT_EQ(p.landmarks, 320u);
  EXPECT_EQ(p.q, 200u);
  EXPECT_EQ(p.s_min, 5u);
  EXPECT_EQ(p.n_prime, 400u);
  HeuristicParams small = resolve_heuristic(100, HeuristicOptions{.k = 4});
  EXPECT_EQ(small.landmarks, 100u);  // 40k capped at n
}

// Whatever the instance, the query count equals the number of landmarks
// and a found clustering is complete.
TEST(LandmarkClusterHeuristic, BudgetIdentityOverRandomInstances) {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 20 + rng.uniform_index(300);
    EuclideanOracle o = testing::random_points(rng, n, 2);
    HeuristicOptions opt{.k = 1 + rng.uniform_index(5)};
    QueryLedger ledger;
    LandmarkRun run = landmark_cluster_heuristic(o, opt, rng.next_u64(), ledger);
    EXPECT_EQ(ledger.count(), run.landmark_set.size());
    EXPECT_EQ(run.report.queries, run.report.landmarks);
    if (run.found()) {
      EXPECT_TRUE(validate_clustering(*run.clustering, n).ok);
      EXPECT_EQ(run.clustering->k, opt.k);
    }
  }
}

TEST(RunReport, JsonFields) {
  RunReport r;
  r.mode = "theory";
  r.radius = kInf;
  r.b = 3;
  auto j = r.to_json();
  EXPECT_TRUE(j["radius"].is_null());
  EXPECT_EQ(j["b"], 3);
  EXPECT_EQ(j["rng"], "mt19937_64+lemire-bounded/v1");
  EXPECT_FALSE(j.contains("advice"));
}

}  // namespace
}  // namespace lmc
