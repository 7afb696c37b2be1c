#pragma once

// Comparison baseline: represent each point by its distances to d random
// landmarks, then run Lloyd's k-means in that space.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/landmark_clustering.hpp"
#include "lmc/log.hpp"
#include "lmc/oracle.hpp"
#include "lmc/rng.hpp"

namespace lmc {

/// Row-major n x dim matrix of coordinates.
struct Embedding {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
};

/// Coordinates (d(i, l_1), ..., d(i, l_d)). Infinite distances are
/// replaced by twice the largest finite distance seen in the rows.
inline Embedding lipschitz_embed(const DistanceOracle& oracle, QueryLedger& ledger,
                                 std::span<const PointIndex> landmarks) {
  const std::size_t n = oracle.size();
  Embedding e{n, landmarks.size(), std::vector<double>(n * landmarks.size())};
  std::vector<RowPtr> rows;
  rows.reserve(landmarks.size());
  double max_finite = 0;
  for (PointIndex l : landmarks) {
    rows.push_back(query_one_vs_all(oracle, l, ledger));
    for (double v : *rows.back())
      if (std::isfinite(v)) max_finite = std::max(max_finite, v);
  }
  const double cap = 2.0 * max_finite;
  std::size_t capped = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const DistanceRow& row = *rows[j];
    for (std::size_t i = 0; i < n; ++i) {
      double v = row[i];
      if (std::isinf(v)) {
        v = cap;
        ++capped;
      }
      e.values[i * e.dim + j] = v;
    }
  }
  if (capped > 0) logger().info("embedding: capped {} infinite distances at {}", capped, cap);
  return e;
}

struct KMeansResult {
  Clustering clustering;
  std::vector<double> centers;  // k x dim, row-major
  double objective = 0;         // sum of squared distances to assigned centers
  std::size_t iterations = 0;
  std::vector<double> objective_history;  // after each assignment step
};

namespace detail {

inline double squared_distance(std::span<const double> a, const double* b) {
  double acc = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    acc += t * t;
  }
  return acc;
}

// Nearest center per point (ties to the lower center). Returns the objective.
inline double assign_nearest(const Embedding& e, const std::vector<double>& centers, std::size_t k,
                             std::vector<ClusterId>& labels, std::vector<double>& cost) {
  double total = 0;
  for (std::size_t i = 0; i < e.n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    ClusterId best_j = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = squared_distance(e.row(i), centers.data() + j * e.dim);
      if (d < best) {
        best = d;
        best_j = static_cast<ClusterId>(j);
      }
    }
    labels[i] = best_j;
    cost[i] = best;
    total += best;
  }
  return total;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded
/// at the point currently farthest from its center. Throws
/// std::logic_error if the objective ever increases.
inline KMeansResult kmeans(const Embedding& e, std::size_t k, std::uint64_t seed,
                           std::size_t max_iter = 100, double tol = 1e-9) {
  const std::size_t n = e.n, dim = e.dim;
  if (k < 1 || k > n) throw Error("k must lie in [1, n]");
  Rng rng(seed);

  // k-means++ seeding
  std::vector<double> centers(k * dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  auto place = [&](std::size_t j, std::size_t p) {
    std::copy_n(e.values.begin() + static_cast<std::ptrdiff_t>(p * dim), dim,
                centers.begin() + static_cast<std::ptrdiff_t>(j * dim));
    chosen[p] = 1;
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], detail::squared_distance(e.row(i), centers.data() + j * dim));
  };
  place(0, rng.uniform_index(n));
  for (std::size_t j = 1; j < k; ++j) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0) {
      double target = rng.uniform01() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0) break;
      }
    }
    if (pick == n) {
      // every point coincides with a center: take an unused index
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i)
        if (!chosen[i]) unused.push_back(i);
      pick = unused[rng.uniform_index(unused.size())];
    }
    place(j, pick);
  }

  KMeansResult res;
  std::vector<ClusterId> labels(n, 0);
  std::vector<double> cost(n, 0);
  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0;; ++it) {
    double obj = detail::assign_nearest(e, centers, k, labels, cost);
    // re-seed empty clusters
    for (std::size_t guard = 0; guard < k; ++guard) {
      std::fill(counts.begin(), counts.end(), 0);
      for (ClusterId c : labels) ++counts[static_cast<std::size_t>(c)];
      auto empty = std::find(counts.begin(), counts.end(), std::size_t{0});
      if (empty == counts.end()) break;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (cost[i] > cost[far]) far = i;
      const auto j = static_cast<std::size_t>(empty - counts.begin());
      std::copy_n(e.values.begin() + static_cast<std::ptrdiff_t>(far * dim), dim,
                  centers.begin() + static_cast<std::ptrdiff_t>(j * dim));
      obj = detail::assign_nearest(e, centers, k, labels, cost);
    }
    if (obj > prev * (1 + 1e-12) + 1e-12) {
      throw std::logic_error("k-means objective increased: " + std::to_string(prev) + " -> " +
                             std::to_string(obj));
    }
    prev = obj;
    res.objective_history.push_back(obj);
    res.objective = obj;
    res.iterations = it + 1;
    if (it == max_iter) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(labels[i]);
      ++counts[c];
      for (std::size_t t = 0; t < dim; ++t) sums[c * dim + t] += e(i, t);
    }
    double shift = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      double moved = 0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double nc = sums[j * dim + t] / static_cast<double>(counts[j]);
        const double diff = nc - centers[j * dim + t];
        moved += diff * diff;
        centers[j * dim + t] = nc;
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    if (shift < tol) {
      res.objective = detail::assign_nearest(e, centers, k, labels, cost);
      break;
    }
  }
  res.clustering = Clustering(std::move(labels), k);
  res.centers = std::move(centers);
  return res;
}

struct BaselineRun {
  Clustering clustering;
  std::vector<PointIndex> landmarks;
  RunReport report;
};

/// d landmarks drawn uniformly without replacement; exactly d queries.
inline BaselineRun baseline_cluster(const DistanceOracle& oracle, std::size_t k, std::size_t d,
                                    std::uint64_t seed, QueryLedger& ledger) {
  const std::size_t n = oracle.size();
  if (d < 1) throw Error("d must be at least 1");
  if (d > n) throw Error("cannot choose more landmarks than points");
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  std::vector<PointIndex> perm(n);
  std::iota(perm.begin(), perm.end(), PointIndex{0});
  for (std::size_t i = 0; i < d; ++i) std::swap(perm[i], perm[i + rng.uniform_index(n - i)]);
  perm.resize(d);

  BaselineRun run;
  Embedding e = lipschitz_embed(oracle, ledger, perm);
  run.clustering = kmeans(e, k, derive_seed(seed, 1)).clustering;
  run.landmarks = std::move(perm);
  run.report.algo = "baseline";
  run.report.mode = "embed-kmeans";
  run.report.n = n;
  run.report.k = k;
  run.report.seed = seed;
  run.report.landmarks = d;
  run.report.queries = ledger.count();
  run.report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

inline BaselineRun baseline_cluster(const DistanceOracle& oracle, std::size_t k, std::size_t d,
                                    std::uint64_t seed) {
  QueryLedger ledger;
  return baseline_cluster(oracle, k, d, seed, ledger);
}

}  // namespace lmc
