#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "lmc/selection.hpp"
#include "test_util.hpp"

namespace lmc {
namespace {

using testing::line;

// Straightforward re-statement of the selection rule with a full sort:
// order points by (d_min descending, index ascending), keep the first
// `window` of them that are not landmarks, widen by q if none remain.
std::vector<PointIndex> reference_selection(const DistanceOracle& o, std::size_t q, std::size_t iter,
                                            std::uint64_t seed) {
  const std::size_t n = o.size();
  Rng rng(seed);
  std::vector<PointIndex> chosen{static_cast<PointIndex>(rng.uniform_index(n))};
  std::vector<double> d(n);
  for (PointIndex s = 0; s < n; ++s) d[s] = o.distance(chosen[0], s);
  d[chosen[0]] = 0;
  while (chosen.size() < iter) {
    std::vector<PointIndex> order(n);
    std::iota(order.begin(), order.end(), PointIndex{0});
    std::sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) {
      return d[a] != d[b] ? d[a] > d[b] : a < b;
    });
    std::vector<PointIndex> cand;
    for (std::size_t window = q; cand.empty(); window += q) {
      for (std::size_t r = 0; r < std::min(window, n); ++r)
        if (std::find(chosen.begin(), chosen.end(), order[r]) == chosen.end()) cand.push_back(order[r]);
      if (window >= n) break;
    }
    std::sort(cand.begin(), cand.end());
    const PointIndex l = cand[rng.uniform_index(cand.size())];
    chosen.push_back(l);
    for (PointIndex s = 0; s < n; ++s) d[s] = std::min(d[s], o.distance(l, s));
    d[l] = 0;
  }
  return chosen;
}

TEST(SelectLandmarks, FarthestFirstLineTrace) {
  EuclideanOracle o = line({0, 1, 10, 11, 20, 21});
  QueryLedger ledger;
  Rng rng(1);
  LandmarkSet set = select_landmarks(o, ledger, 1, 3, rng, PointIndex{0});
  EXPECT_EQ(set.landmarks, (std::vector<PointIndex>{0, 5, 2}));
  EXPECT_EQ(set.d_min, (std::vector<double>{0, 1, 0, 1, 1, 0}));
  EXPECT_EQ(ledger.count(), 3u);
}

TEST(SelectLandmarks, SingleIteration) {
  EuclideanOracle o = line({0, 1, 10, 11, 20, 21});
  QueryLedger ledger;
  LandmarkSet set = select_landmarks(o, ledger, 3, 1, std::uint64_t{99});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(ledger.count(), 1u);
  std::vector<double> row(6);
  for (PointIndex s = 0; s < 6; ++s) row[s] = o.distance(set.landmarks[0], s);
  EXPECT_EQ(set.d_min, row);
}

TEST(SelectLandmarks, Errors) {
  EuclideanOracle o = line({0, 1, 2});
  QueryLedger ledger;
  EXPECT_THROW(select_landmarks(o, ledger, 0, 1, std::uint64_t{1}), Error);
  EXPECT_THROW(select_landmarks(o, ledger, 4, 1, std::uint64_t{1}), Error);
  EXPECT_THROW(select_landmarks(o, ledger, 1, 0, std::uint64_t{1}), Error);
  EXPECT_THROW(select_landmarks(o, ledger, 1, 4, std::uint64_t{1}), Error);
  EXPECT_EQ(ledger.count(), 0u);
}

TEST(SelectLandmarks, AllPointsWhenIterEqualsN) {
  EuclideanOracle o = line({0, 0, 0, 5, 5});  // ties everywhere, duplicates at distance 0
  for (std::size_t q = 1; q <= 5; ++q) {
    QueryLedger ledger;
    LandmarkSet set = select_landmarks(o, ledger, q, 5, std::uint64_t{q});
    std::set<PointIndex> distinct(set.landmarks.begin(), set.landmarks.end());
    EXPECT_EQ(distinct.size(), 5u);
    EXPECT_EQ(ledger.count(), 5u);
  }
}

TEST(SelectLandmarks, FullPoolIsUniformOverNonLandmarks) {
  EuclideanOracle o = line({0, 1, 3, 7, 15, 31});
  std::vector<int> second(6, 0);
  const int trials = 12000;
  for (int t = 0; t < trials; ++t) {
    QueryLedger ledger;
    Rng rng(static_cast<std::uint64_t>(t));
    LandmarkSet set = select_landmarks(o, ledger, 6, 2, rng, PointIndex{2});
    ++second[set.landmarks[1]];
  }
  EXPECT_EQ(second[2], 0);
  for (PointIndex s : {0, 1, 3, 4, 5}) EXPECT_NEAR(second[s], trials / 5, 300) << s;
}

// Matches the sort-based reference on random instances, with integer
// coordinates so that d_min ties are common.
TEST(SelectLandmarks, MatchesSortReference) {
  Rng gen(123);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + gen.uniform_index(60);
    std::vector<double> c(n * 2);
    for (double& v : c) v = static_cast<double>(gen.uniform_index(6));
    EuclideanOracle o(n, 2, c);
    const std::size_t q = 1 + gen.uniform_index(n);
    const std::size_t iter = 1 + gen.uniform_index(n);
    const std::uint64_t seed = gen.next_u64();
    QueryLedger ledger;
    LandmarkSet set = select_landmarks(o, ledger, q, iter, seed);
    ASSERT_EQ(set.landmarks, reference_selection(o, q, iter, seed)) << "trial " << t;
  }
}

TEST(SelectLandmarks, Invariants) {
  Rng gen(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 20 + gen.uniform_index(80);
    EuclideanOracle o = testing::random_points(gen, n, 3);
    const std::size_t q = 1 + gen.uniform_index(n);
    const std::size_t iter = 1 + gen.uniform_index(std::min<std::size_t>(n, 30));
    const std::uint64_t seed = gen.next_u64();

    std::vector<double> prev(n, kInf);
    for (std::size_t it = 1; it <= iter; ++it) {
      QueryLedger ledger;
      LandmarkSet set = select_landmarks(o, ledger, q, it, seed);
      ASSERT_EQ(set.size(), it);
      ASSERT_EQ(ledger.count(), it);
      std::set<PointIndex> distinct(set.landmarks.begin(), set.landmarks.end());
      ASSERT_EQ(distinct.size(), it);
      for (PointIndex s = 0; s < n; ++s) {
        double m = kInf;
        for (std::size_t slot = 0; slot < set.size(); ++slot) m = std::min(m, set.distance(slot, s));
        ASSERT_EQ(set.d_min[s], m);
        ASSERT_LE(set.d_min[s], prev[s]);
      }
      for (PointIndex l : set.landmarks) ASSERT_EQ(set.d_min[l], 0.0);
      prev = set.d_min;
    }
  }
}

TEST(SelectLandmarks, Deterministic) {
  Rng gen(8);
  EuclideanOracle o = testing::random_points(gen, 300, 2);
  QueryLedger a, b;
  EXPECT_EQ(select_landmarks(o, a, 40, 25, std::uint64_t{77}).landmarks,
            select_landmarks(o, b, 40, 25, std::uint64_t{77}).landmarks);
}

}  // namespace
}  // namespace lmc
