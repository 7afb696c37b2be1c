#pragma once

// Clustering comparison: matching distance, F-measure, and a diagnostic
// for triangle-inequality violations in distance data.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/hungarian.hpp"
#include "lmc/log.hpp"
#include "lmc/oracle.hpp"
#include "lmc/rng.hpp"

namespace lmc {

struct MatchingResult {
  std::vector<std::size_t> sigma;  // cluster i of the first clustering -> cluster sigma[i] of the second
  std::size_t misclassified = 0;
  double cost = 0;  // misclassified / n
};

namespace detail {

inline void require_comparable(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) {
    throw Error("length mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (!a.is_complete() || !b.is_complete()) throw Error("clusterings must be complete");
  for (const Clustering* c : {&a, &b}) {
    for (ClusterId id : c->assignment)
      if (id < 0 || static_cast<std::size_t>(id) >= c->k) throw Error("cluster id out of range");
  }
}

// overlap[i][j] = |C_i ∩ C'_j| over a padded m x m table.
inline std::vector<std::vector<std::int64_t>> overlap_table(const Clustering& a, const Clustering& b,
                                                            std::size_t m) {
  std::vector<std::vector<std::int64_t>> t(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t x = 0; x < a.size(); ++x)
    ++t[static_cast<std::size_t>(a.assignment[x])][static_cast<std::size_t>(b.assignment[x])];
  return t;
}

}  // namespace detail

/// Fraction of points misclassified under the best bijection between the
/// clusters of a and b. The smaller clustering is padded with empty
/// clusters when the cluster counts differ.
inline MatchingResult clustering_dist(const Clustering& a, const Clustering& b) {
  detail::require_comparable(a, b);
  const std::size_t m = std::max(a.k, b.k);
  auto overlap = detail::overlap_table(a, b, m);
  const auto sizes = a.cluster_sizes();
  std::vector<std::vector<std::int64_t>> cost(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto size_i = i < sizes.size() ? static_cast<std::int64_t>(sizes[i]) : 0;
    for (std::size_t j = 0; j < m; ++j) cost[i][j] = size_i - overlap[i][j];
  }
  Assignment asg = hungarian(cost);
  MatchingResult r;
  r.sigma = std::move(asg.column_of_row);
  r.misclassified = static_cast<std::size_t>(asg.cost);
  r.cost = a.size() ? static_cast<double>(asg.cost) / static_cast<double>(a.size()) : 0.0;
  return r;
}

/// (1/n) sum_i |C_i| max_j 2|C_i ∩ C'_j| / (|C_i| + |C'_j|). Not symmetric.
inline double f_measure(const Clustering& a, const Clustering& b) {
  detail::require_comparable(a, b);
  const std::size_t m = std::max(a.k, b.k);
  auto overlap = detail::overlap_table(a, b, m);
  auto sa = a.cluster_sizes(), sb = b.cluster_sizes();
  sa.resize(m, 0);
  sb.resize(m, 0);
  double total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sa[i] == 0) continue;
    double best = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (overlap[i][j] == 0) continue;
      best = std::max(best, 2.0 * static_cast<double>(overlap[i][j]) / static_cast<double>(sa[i] + sb[j]));
    }
    total += static_cast<double>(sa[i]) * best;
  }
  return a.size() ? total / static_cast<double>(a.size()) : 1.0;
}

struct Lemma8Report {
  double d = 0;
  double f = 0;
  double bound = 0;  // 1 - 3d/2
  bool holds = true;
};

/// F(a, b) >= 1 - 3 dist(a, b) / 2 always holds; a false result means a bug.
inline Lemma8Report check_lemma8(const Clustering& a, const Clustering& b) {
  Lemma8Report r;
  r.d = clustering_dist(a, b).cost;
  r.f = f_measure(a, b);
  r.bound = 1.0 - 1.5 * r.d;
  r.holds = r.f >= r.bound - 1e-12;
  return r;
}

struct TriangleReport {
  double rate = 0;
  std::size_t violations = 0;
  std::size_t sampled = 0;
  bool population_exhausted = false;  // fewer finite triples than requested
};

namespace detail {
inline bool violates_triangle(double x, double y, double z) {
  constexpr double kSlack = 1e-9;
  return x > (y + z) * (1 + kSlack) || y > (x + z) * (1 + kSlack) || z > (x + y) * (1 + kSlack);
}
}  // namespace detail

/// Fraction of sampled unordered triples {a, b, c} with all three distances
/// finite in which some side exceeds the sum of the other two (relative
/// slack 1e-9).
inline TriangleReport triangle_violation_rate(const DistanceOracle& oracle, std::size_t num_triples,
                                              std::uint64_t seed) {
  const std::size_t n = oracle.size();
  TriangleReport r;
  Rng rng(seed);
  auto finite_sides = [&](std::size_t a, std::size_t b, std::size_t c, double& x, double& y, double& z) {
    x = oracle.distance(a, b);
    y = oracle.distance(b, c);
    z = oracle.distance(a, c);
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  };
  auto tally = [&](std::size_t a, std::size_t b, std::size_t c) {
    double x, y, z;
    finite_sides(a, b, c, x, y, z);
    ++r.sampled;
    r.violations += detail::violates_triangle(x, y, z);
  };

  const double total = n < 3 ? 0.0 : static_cast<double>(n) * (n - 1) * (n - 2) / 6.0;
  if (total <= 2e6) {
    struct Triple {
      std::uint32_t a, b, c;
    };
    std::vector<Triple> finite;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c) {
          double x, y, z;
          if (finite_sides(a, b, c, x, y, z))
            finite.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(c)});
        }
    std::size_t take = std::min(num_triples, finite.size());
    r.population_exhausted = finite.size() < num_triples;
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(finite[i], finite[i + rng.uniform_index(finite.size() - i)]);
      tally(finite[i].a, finite[i].b, finite[i].c);
    }
  } else {
    const std::size_t max_attempts = 50 * num_triples + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && r.sampled < num_triples; ++attempt) {
      std::size_t a = rng.uniform_index(n), b = rng.uniform_index(n), c = rng.uniform_index(n);
      if (a == b || b == c || a == c) continue;
      double x, y, z;
      if (finite_sides(a, b, c, x, y, z)) tally(a, b, c);
    }
    r.population_exhausted = r.sampled < num_triples;
  }
  if (r.sampled == 0) {
    logger().warn("triangle check: no triple with all-finite distances; reporting rate 0");
    return r;
  }
  if (r.population_exhausted) {
    logger().warn("triangle check: only {} finite triples available ({} requested)", r.sampled,
                  num_triples);
  }
  r.rate = static_cast<double>(r.violations) / static_cast<double>(r.sampled);
  return r;
}

}  // namespace lmc
