#pragma once

// Brute-force ground truth for small instances: exact k-median, good/bad
// point structure, (c, epsilon)-property verification, coverage
// estimation for landmark selection, and permutation-enumeration
// matching distance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/metrics.hpp"
#include "lmc/oracle.hpp"
#include "lmc/rng.hpp"
#include "lmc/selection.hpp"

namespace lmc {

inline constexpr std::size_t kMaxExactKMedianPoints = 25;
inline constexpr std::size_t kMaxPartitionPoints = 12;
inline constexpr std::size_t kMaxBruteForceClusters = 8;

struct KMedianResult {
  double opt_value = 0;
  std::vector<PointIndex> centers;  // ascending
  Clustering clustering;            // cluster i = points nearest to centers[i]
};

namespace detail {

// Nearest center with ties to the lower center; returns (cost, owner).
inline std::pair<double, std::size_t> nearest_center(const DistanceMatrix& m, PointIndex x,
                                                     const std::vector<PointIndex>& centers) {
  double best = kInf;
  std::size_t owner = 0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = m(x, centers[i]);
    if (d < best) {
      best = d;
      owner = i;
    }
  }
  return {best, owner};
}

}  // namespace detail

/// Exact discrete k-median by enumerating all C(n, k) center sets in
/// lexicographic order; the first minimum wins.
inline KMedianResult exact_kmedian(const DistanceMatrix& m, std::size_t k) {
  const std::size_t n = m.size();
  if (n > kMaxExactKMedianPoints) {
    throw Error("exact k-median is limited to n <= " + std::to_string(kMaxExactKMedianPoints));
  }
  if (k < 1 || k > n) throw Error("k must lie in [1, n]");
  std::vector<PointIndex> comb(k);
  std::iota(comb.begin(), comb.end(), PointIndex{0});
  KMedianResult best;
  best.opt_value = kInf;
  bool have = false;
  while (true) {
    double cost = 0;
    for (PointIndex x = 0; x < n && cost <= best.opt_value; ++x) cost += detail::nearest_center(m, x, comb).first;
    if (!have || cost < best.opt_value) {
      best.opt_value = cost;
      best.centers = comb;
      have = true;
    }
    // next combination
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  std::vector<ClusterId> labels(n);
  for (PointIndex x = 0; x < n; ++x)
    labels[x] = static_cast<ClusterId>(detail::nearest_center(m, x, best.centers).second);
  best.clustering = Clustering(std::move(labels), k);
  return best;
}

/// Good/bad classification relative to a set of k centers.
struct StructureReport {
  std::size_t n = 0;
  std::size_t k = 0;
  double alpha = 0;
  double epsilon = 0;
  double opt_value = 0;               // sum of w(x)
  std::vector<PointIndex> opt_centers;  // empty when centers are not data points
  double w = 0;                       // average weight
  double d_crit = 0;                  // alpha * w / (17 epsilon)
  std::vector<double> w_x;            // distance to nearest center
  std::vector<double> w2_x;           // distance to second-nearest center
  std::vector<std::size_t> owner;     // index of the nearest center
  std::vector<char> good;
  std::vector<std::vector<PointIndex>> good_sets;  // good points per center
  std::size_t bad_count = 0;
  std::size_t b = 0;  // ceil((1 + 17/alpha) epsilon n)

  bool degenerate() const { return opt_value == 0; }
};

/// Classifies points from their distances to k centers; center_distance(x, i)
/// returns d(x, c_i). When the total weight is zero a point is good iff it
/// sits on its center and off every other one.
inline StructureReport classify_by_center_distances(
    std::size_t n, std::size_t k, const std::function<double(PointIndex, std::size_t)>& center_distance,
    double alpha, double epsilon) {
  if (!(alpha > 0) || !(epsilon > 0 && epsilon < 1)) throw Error("alpha > 0 and 0 < epsilon < 1 required");
  StructureReport r;
  r.n = n;
  r.k = k;
  r.alpha = alpha;
  r.epsilon = epsilon;
  r.w_x.assign(n, kInf);
  r.w2_x.assign(n, kInf);
  r.owner.assign(n, 0);
  for (PointIndex x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < k; ++i) {
      const double d = center_distance(x, i);
      if (d < r.w_x[x]) {
        r.w2_x[x] = r.w_x[x];
        r.w_x[x] = d;
        r.owner[x] = i;
      } else if (d < r.w2_x[x]) {
        r.w2_x[x] = d;
      }
    }
    r.opt_value += r.w_x[x];
  }
  r.w = r.opt_value / static_cast<double>(n);
  r.d_crit = alpha * r.w / (17.0 * epsilon);
  r.b = static_cast<std::size_t>(detail::stable_ceil((1.0 + 17.0 / alpha) * epsilon * static_cast<double>(n)));
  r.good.assign(n, 0);
  r.good_sets.assign(k, {});
  for (PointIndex x = 0; x < n; ++x) {
    bool good;
    if (r.degenerate()) {
      good = r.w_x[x] == 0 && r.w2_x[x] > 0;
    } else {
      good = r.w_x[x] < r.d_crit && r.w2_x[x] - r.w_x[x] >= 17.0 * r.d_crit;
    }
    r.good[x] = good;
    if (good) {
      r.good_sets[r.owner[x]].push_back(x);
    } else {
      ++r.bad_count;
    }
  }
  return r;
}

/// Structure relative to the exact k-median optimum.
inline StructureReport classify_good_bad(const DistanceMatrix& m, std::size_t k, double alpha, double epsilon) {
  KMedianResult opt = exact_kmedian(m, k);
  StructureReport r = classify_by_center_distances(
      m.size(), k, [&](PointIndex x, std::size_t i) { return m(x, opt.centers[i]); }, alpha, epsilon);
  r.opt_centers = opt.centers;
  return r;
}

/// Checks the separation facts that good points must satisfy.
struct StructureCertificate {
  double max_within = 0;   // largest distance inside one good set
  double min_between = kInf;  // smallest distance across good sets
  std::size_t empty_good_sets = 0;
  bool within_ok = false;   // max_within < 2 d_crit
  bool between_ok = false;  // min_between > 16 d_crit
  bool bad_ok = false;      // bad_count <= b

  bool all() const { return within_ok && between_ok && bad_ok; }
};

inline StructureCertificate certify_structure(const StructureReport& r,
                                              const std::function<double(PointIndex, PointIndex)>& dist) {
  StructureCertificate c;
  std::vector<std::pair<PointIndex, std::size_t>> good_points;
  for (std::size_t i = 0; i < r.good_sets.size(); ++i) {
    if (r.good_sets[i].empty()) ++c.empty_good_sets;
    for (PointIndex x : r.good_sets[i]) good_points.emplace_back(x, i);
  }
  for (std::size_t a = 0; a < good_points.size(); ++a) {
    for (std::size_t b = a + 1; b < good_points.size(); ++b) {
      const double d = dist(good_points[a].first, good_points[b].first);
      if (good_points[a].second == good_points[b].second) {
        c.max_within = std::max(c.max_within, d);
      } else {
        c.min_between = std::min(c.min_between, d);
      }
    }
  }
  if (r.degenerate()) {
    c.within_ok = c.max_within == 0;
    c.between_ok = c.min_between > 0;
  } else {
    c.within_ok = c.max_within < 2.0 * r.d_crit;
    c.between_ok = c.min_between > 16.0 * r.d_crit;
  }
  c.bad_ok = r.bad_count <= r.b;
  return c;
}

namespace detail {

// Calls visit(labels, blocks) for every partition of n points into at
// most k non-empty blocks, as restricted-growth strings.
template <typename Visit>
void for_each_partition(std::size_t n, std::size_t k, Visit&& visit) {
  std::vector<ClusterId> a(n, 0);
  std::vector<ClusterId> prefix_max(n, 0);  // max of a[0..i]
  while (true) {
    visit(a, static_cast<std::size_t>(prefix_max[n - 1] + 1));
    // increment the last position that can grow
    std::size_t i = n;
    while (i > 1) {
      --i;
      const ClusterId limit = std::min<ClusterId>(prefix_max[i - 1] + 1, static_cast<ClusterId>(k) - 1);
      if (a[i] < limit) break;
      if (i == 1) return;
    }
    if (n <= 1) return;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

inline double partition_cost(const DistanceMatrix& m, const std::vector<ClusterId>& labels,
                             std::size_t blocks, std::vector<std::vector<PointIndex>>& scratch) {
  scratch.assign(blocks, {});
  for (PointIndex x = 0; x < labels.size(); ++x) scratch[static_cast<std::size_t>(labels[x])].push_back(x);
  double total = 0;
  for (const auto& block : scratch) {
    double best = kInf;
    for (PointIndex y : block) {
      double s = 0;
      for (PointIndex x : block) s += m(x, y);
      best = std::min(best, s);
    }
    total += best;
  }
  return total;
}

}  // namespace detail

struct CEPropertyReport {
  bool holds = false;
  double opt_value = 0;
  std::size_t partitions = 0;       // enumerated
  std::size_t near_optimal = 0;     // with cost <= c * OPT
  double worst_dist = 0;            // largest dist to target among those
};

/// True iff every partition into at most k clusters whose k-median cost is
/// within factor c of optimal has dist < epsilon to the target.
inline CEPropertyReport check_ce_property(const DistanceMatrix& m, std::size_t k, double c, double epsilon,
                                          const Clustering& target) {
  const std::size_t n = m.size();
  if (n > kMaxPartitionPoints) {
    throw Error("partition enumeration is limited to n <= " + std::to_string(kMaxPartitionPoints));
  }
  if (target.size() != n) throw Error("target length mismatch");
  if (k < 1) throw Error("k must be at least 1");
  CEPropertyReport rep;
  std::vector<std::vector<PointIndex>> scratch;
  rep.opt_value = kInf;
  detail::for_each_partition(n, k, [&](const std::vector<ClusterId>& a, std::size_t blocks) {
    rep.opt_value = std::min(rep.opt_value, detail::partition_cost(m, a, blocks, scratch));
    ++rep.partitions;
  });
  const double threshold = c * rep.opt_value * (1 + 1e-12) + 1e-12;
  rep.holds = true;
  detail::for_each_partition(n, k, [&](const std::vector<ClusterId>& a, std::size_t blocks) {
    if (detail::partition_cost(m, a, blocks, scratch) > threshold) return;
    ++rep.near_optimal;
    const double d = clustering_dist(Clustering(a, blocks), target).cost;
    rep.worst_dist = std::max(rep.worst_dist, d);
    if (!(d < epsilon)) rep.holds = false;
  });
  return rep;
}

inline bool verify_ce_property(const DistanceMatrix& m, std::size_t k, double c, double epsilon,
                               const Clustering& target) {
  return check_ce_property(m, k, c, epsilon, target).holds;
}

struct CoverageEstimate {
  double fraction = 0;
  std::size_t covered = 0;
  std::size_t trials = 0;
  std::size_t empty_good_sets = 0;
};

/// Fraction of independent selection runs after which every good set has a
/// point closer than 2 d_crit to some landmark. An empty good set counts as
/// uncovered.
inline CoverageEstimate estimate_coverage_probability(const DistanceOracle& oracle,
                                                      const std::vector<std::vector<PointIndex>>& good_sets,
                                                      double d_crit, std::size_t q, std::size_t iter,
                                                      std::size_t trials, std::uint64_t seed) {
  CoverageEstimate est;
  est.trials = trials;
  for (const auto& g : good_sets) est.empty_good_sets += g.empty();
  if (est.empty_good_sets > 0) logger().warn("{} good sets are empty and count as uncovered", est.empty_good_sets);
  for (std::size_t t = 0; t < trials; ++t) {
    QueryLedger ledger;
    Rng rng(derive_seed(seed, t));
    LandmarkSet set = select_landmarks(oracle, ledger, q, iter, rng);
    bool all = est.empty_good_sets == 0;
    for (std::size_t i = 0; all && i < good_sets.size(); ++i) {
      all = std::any_of(good_sets[i].begin(), good_sets[i].end(),
                        [&](PointIndex x) { return set.d_min[x] < 2.0 * d_crit; });
    }
    est.covered += all;
  }
  est.fraction = trials ? static_cast<double>(est.covered) / static_cast<double>(trials) : 0.0;
  return est;
}

inline CoverageEstimate estimate_coverage_probability(const DistanceOracle& oracle,
                                                      const StructureReport& structure,
                                                      const TheoryParams& params, std::size_t trials,
                                                      std::uint64_t seed) {
  return estimate_coverage_probability(oracle, structure.good_sets, structure.d_crit, params.q, params.iter,
                                       trials, seed);
}

/// Fraction of selection runs that pick fewer than k good landmarks.
inline double good_landmark_shortfall_rate(const DistanceOracle& oracle, const std::vector<char>& good,
                                           std::size_t k, std::size_t q, std::size_t iter,
                                           std::size_t trials, std::uint64_t seed) {
  std::size_t short_runs = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    QueryLedger ledger;
    Rng rng(derive_seed(seed, t));
    LandmarkSet set = select_landmarks(oracle, ledger, q, iter, rng);
    std::size_t hits = 0;
    for (PointIndex l : set.landmarks) hits += good[l] != 0;
    short_runs += hits < k;
  }
  return trials ? static_cast<double>(short_runs) / static_cast<double>(trials) : 0.0;
}

/// Matching distance by explicit enumeration of all k! bijections.
inline double brute_force_dist(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) throw Error("length mismatch");
  const std::size_t k = std::max(a.k, b.k);
  if (k > kMaxBruteForceClusters) throw Error("brute-force matching is limited to k <= 8");
  std::vector<std::size_t> sigma(k);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::size_t best = a.size();
  do {
    std::size_t wrong = 0;
    for (std::size_t x = 0; x < a.size(); ++x)
      wrong += sigma[static_cast<std::size_t>(a.assignment[x])] != static_cast<std::size_t>(b.assignment[x]);
    best = std::min(best, wrong);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return a.size() ? static_cast<double>(best) / static_cast<double>(a.size()) : 0.0;
}

}  // namespace lmc
