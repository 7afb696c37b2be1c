#pragma once

// Labeled Euclidean instances with planted clusters: tight cores around
// well-separated centers plus a bounded fraction of outliers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/oracle.hpp"
#include "lmc/reference.hpp"
#include "lmc/rng.hpp"

namespace lmc {

enum class CoreShape { UniformBall, Gaussian };

struct GeneratorSpec {
  std::string preset = "custom";
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t dim = 2;
  double core_radius = 1.0;
  double center_separation = 0.0;  // minimum pairwise center distance
  std::vector<double> weights;     // relative cluster sizes; empty = equal
  double outlier_fraction = 0.0;
  double outlier_min = 4.0;  // outlier distance from its center, in core radii
  double outlier_max = 8.0;
  CoreShape shape = CoreShape::UniformBall;
  double hypercube_side = 0.0;  // 0 = derived from separation and k
  std::size_t max_retries = 10000;
  // When both are set, every planted cluster must hold at least
  // ceil((4 + 51/alpha) epsilon n) points.
  std::optional<double> target_alpha;
  std::optional<double> target_epsilon;
  std::uint64_t seed = 0;
};

struct LabeledDataset {
  EuclideanOracle points;
  Clustering labels;
  std::vector<double> centers;  // k x dim
  std::vector<char> outlier;
  GeneratorSpec spec;

  std::size_t size() const { return points.size(); }
  double center_distance(PointIndex x, std::size_t i) const {
    auto p = points.point(x);
    double acc = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double t = p[j] - centers[i * spec.dim + j];
      acc += t * t;
    }
    return std::sqrt(acc);
  }
};

namespace detail {

inline std::vector<std::size_t> split_sizes(std::size_t total, const std::vector<double>& weights) {
  double sum = 0;
  for (double w : weights) {
    if (!(w > 0)) throw Error("cluster weights must be positive");
    sum += w;
  }
  std::vector<std::size_t> sizes(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    used += sizes[i];
    remainders.emplace_back(-(exact - std::floor(exact)), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (std::size_t r = 0; used < total; ++r, ++used) ++sizes[remainders[r % remainders.size()].second];
  return sizes;
}

inline void random_direction(Rng& rng, std::vector<double>& v) {
  double norm = 0;
  do {
    norm = 0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

}  // namespace detail

inline LabeledDataset generate(const GeneratorSpec& spec) {
  const std::size_t n = spec.n, k = spec.k, dim = spec.dim;
  if (k < 1 || n < k) throw Error("need 1 <= k <= n");
  if (dim < 1) throw Error("dim must be at least 1");
  if (!(spec.core_radius >= 0)) throw Error("core radius must be non-negative");
  if (spec.shape == CoreShape::UniformBall && !(spec.center_separation > 0) && k > 1) {
    throw Error("center separation must be positive");
  }
  if (!(spec.outlier_fraction >= 0 && spec.outlier_fraction < 0.5)) {
    throw Error("outlier fraction must lie in [0, 0.5)");
  }
  std::vector<double> weights = spec.weights.empty() ? std::vector<double>(k, 1.0) : spec.weights;
  if (weights.size() != k) throw Error("need one weight per cluster");

  Rng rng(spec.seed);

  // centers by rejection sampling on [0, side]^dim
  const double sep = spec.center_separation;
  double side = spec.hypercube_side;
  if (side <= 0) {
    const double per_axis = std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(dim)));
    side = sep * std::max(2.0, 2.0 * per_axis);
  }
  std::vector<double> centers(k * dim, 0.0);
  for (std::size_t i = 0; i < k && sep > 0; ++i) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < spec.max_retries && !placed; ++attempt) {
      for (std::size_t j = 0; j < dim; ++j) centers[i * dim + j] = rng.uniform(0.0, side);
      placed = true;
      for (std::size_t p = 0; p < i && placed; ++p) {
        double acc = 0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double t = centers[i * dim + j] - centers[p * dim + j];
          acc += t * t;
        }
        placed = std::sqrt(acc) >= sep;
      }
    }
    if (!placed) {
      throw Error("could not place " + std::to_string(k) + " centers " + std::to_string(sep) +
                  " apart in a hypercube of side " + std::to_string(side) +
                  "; use a larger hypercube side");
    }
  }

  const auto n_out = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(n)));
  const std::size_t n_core = n - n_out;
  const std::vector<std::size_t> sizes = detail::split_sizes(n_core, weights);
  for (std::size_t s : sizes)
    if (s == 0) throw Error("a planted cluster received no points; increase n");

  std::vector<double> coords;
  coords.reserve(n * dim);
  std::vector<ClusterId> labels;
  labels.reserve(n);
  std::vector<char> outlier;
  outlier.reserve(n);
  std::vector<double> dir(dim);

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < sizes[i]; ++c) {
      if (spec.shape == CoreShape::UniformBall) {
        detail::random_direction(rng, dir);
        const double r = spec.core_radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
        for (std::size_t j = 0; j < dim; ++j) coords.push_back(centers[i * dim + j] + r * dir[j]);
      } else {
        for (std::size_t j = 0; j < dim; ++j)
          coords.push_back(centers[i * dim + j] + spec.core_radius * rng.normal());
      }
      labels.push_back(static_cast<ClusterId>(i));
      outlier.push_back(0);
    }
  }
  double weight_sum = 0;
  for (double w : weights) weight_sum += w;
  for (std::size_t o = 0; o < n_out; ++o) {
    double pick = rng.uniform01() * weight_sum;
    std::size_t home = 0;
    while (home + 1 < k && pick >= weights[home]) pick -= weights[home++];
    detail::random_direction(rng, dir);
    const double r = spec.core_radius * rng.uniform(spec.outlier_min, spec.outlier_max);
    std::size_t base = coords.size();
    for (std::size_t j = 0; j < dim; ++j) coords.push_back(centers[home * dim + j] + r * dir[j]);
    // label by nearest planted center
    double best = kInf;
    ClusterId best_i = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double t = coords[base + j] - centers[i * dim + j];
        acc += t * t;
      }
      if (acc < best) {
        best = acc;
        best_i = static_cast<ClusterId>(i);
      }
    }
    labels.push_back(best_i);
    outlier.push_back(1);
  }

  // interleave points so index order carries no label information
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  std::vector<double> shuffled(n * dim);
  std::vector<ClusterId> shuffled_labels(n);
  std::vector<char> shuffled_outlier(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(perm[i] * dim), dim,
                shuffled.begin() + static_cast<std::ptrdiff_t>(i * dim));
    shuffled_labels[i] = labels[perm[i]];
    shuffled_outlier[i] = outlier[perm[i]];
  }
  LabeledDataset ds{EuclideanOracle(n, dim, std::move(shuffled)), Clustering(std::move(shuffled_labels), k),
                    std::move(centers), std::move(shuffled_outlier), spec};

  if (spec.target_alpha && spec.target_epsilon) {
    const double need = detail::stable_ceil((4.0 + 51.0 / *spec.target_alpha) * *spec.target_epsilon *
                                            static_cast<double>(n));
    for (std::size_t s : ds.labels.cluster_sizes()) {
      if (static_cast<double>(s) < need) {
        throw Error("planted cluster of size " + std::to_string(s) + " is below the required " +
                    std::to_string(static_cast<std::size_t>(need)));
      }
    }
  }
  return ds;
}

/// Named presets. "theory": 8 equal uniform-ball cores with separation 64
/// core radii and 2% outliers at 4-8 radii. "pfam-like" and "scop-like":
/// 8 clusters with sizes drawn from [1000, 10000] and [20, 200], rescaled
/// to n = 8000 and n = 800. "blob": one Gaussian with 8 arbitrary labels.
inline GeneratorSpec preset_spec(const std::string& name, std::uint64_t seed) {
  GeneratorSpec s;
  s.preset = name;
  s.seed = seed;
  s.k = 8;
  s.dim = 2;
  s.core_radius = 1.0;
  Rng weight_rng(derive_seed(seed, 0x5eed));
  if (name == "theory") {
    s.n = 2000;
    s.center_separation = 64.0;
    s.outlier_fraction = 0.02;
    s.outlier_min = 4.0;
    s.outlier_max = 8.0;
  } else if (name == "pfam-like") {
    s.n = 8000;
    s.center_separation = 10.0;
    s.outlier_fraction = 0.05;
    s.outlier_min = 1.5;
    s.outlier_max = 4.0;
    for (std::size_t i = 0; i < s.k; ++i) s.weights.push_back(weight_rng.uniform(1000.0, 10000.0));
  } else if (name == "scop-like") {
    s.n = 800;
    s.center_separation = 4.0;
    s.outlier_fraction = 0.10;
    s.outlier_min = 1.2;
    s.outlier_max = 3.0;
    for (std::size_t i = 0; i < s.k; ++i) s.weights.push_back(weight_rng.uniform(20.0, 200.0));
  } else if (name == "blob") {
    s.n = 2000;
    s.shape = CoreShape::Gaussian;
    s.center_separation = 0.0;
    s.outlier_fraction = 0.0;
  } else {
    throw Error("unknown preset '" + name + "' (theory, pfam-like, scop-like, blob)");
  }
  return s;
}

/// Good/bad structure measured against the planted centers.
inline StructureReport planted_structure(const LabeledDataset& ds, double alpha, double epsilon) {
  return classify_by_center_distances(
      ds.size(), ds.spec.k, [&](PointIndex x, std::size_t i) { return ds.center_distance(x, i); }, alpha,
      epsilon);
}

/// Sets each off-diagonal pair to +inf with probability p (symmetric).
inline DistanceMatrix mask_infinite(DistanceMatrix m, double p, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (rng.bernoulli(p)) m(i, j) = m(j, i) = kInf;
  return m;
}

inline std::string describe(const GeneratorSpec& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "preset=%s n=%zu k=%zu dim=%zu core_radius=%.17g center_separation=%.17g "
                "outlier_fraction=%.17g outlier_range=%.17g:%.17g shape=%s seed=%llu",
                s.preset.c_str(), s.n, s.k, s.dim, s.core_radius, s.center_separation, s.outlier_fraction,
                s.outlier_min, s.outlier_max, s.shape == CoreShape::UniformBall ? "ball" : "gaussian",
                static_cast<unsigned long long>(s.seed));
  return buf;
}

inline void write_points(std::ostream& out, const EuclideanOracle& pts, const std::string& comment = {}) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << pts.size() << ' ' << pts.dim() << '\n';
  char buf[40];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto p = pts.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", p[j]);
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

inline void write_dataset(const LabeledDataset& ds, const std::string& points_path,
                          const std::string& labels_path) {
  {
    std::ofstream out(points_path);
    if (!out) throw Error("cannot open " + points_path + " for writing");
    out << "# lmc-gen " << kRngName << "/v" << kRngVersion << '\n';
    write_points(out, ds.points, describe(ds.spec));
    if (!out) throw Error("write failed: " + points_path);
  }
  write_clustering_file(labels_path, ds.labels);
}

}  // namespace lmc
