#pragma once

// Shared data model: clusterings, theory parameters and validation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input file does not match its documented format.
class ParseError : public Error {
 public:
  using Error::Error;
};

using PointIndex = std::size_t;
using ClusterId = std::int32_t;

inline constexpr ClusterId kUnassigned = -1;

/// A labeling of n points with ids in [0, k), or kUnassigned.
struct Clustering {
  std::vector<ClusterId> assignment;
  std::size_t k = 0;

  Clustering() = default;
  Clustering(std::vector<ClusterId> labels, std::size_t num_clusters)
      : assignment(std::move(labels)), k(num_clusters) {}

  /// Infers k as max label + 1.
  static Clustering from_labels(std::vector<ClusterId> labels) {
    ClusterId max_id = -1;
    for (ClusterId id : labels) max_id = std::max(max_id, id);
    return Clustering(std::move(labels), static_cast<std::size_t>(max_id + 1));
  }

  std::size_t size() const { return assignment.size(); }

  bool is_complete() const {
    for (ClusterId id : assignment)
      if (id == kUnassigned) return false;
    return true;
  }

  std::size_t unassigned_count() const {
    std::size_t c = 0;
    for (ClusterId id : assignment) c += (id == kUnassigned);
    return c;
  }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (ClusterId id : assignment)
      if (id != kUnassigned) ++sizes[static_cast<std::size_t>(id)];
    return sizes;
  }

  std::vector<std::vector<PointIndex>> members() const {
    std::vector<std::vector<PointIndex>> out(k);
    for (PointIndex i = 0; i < assignment.size(); ++i)
      if (assignment[i] != kUnassigned) out[static_cast<std::size_t>(assignment[i])].push_back(i);
    return out;
  }

  bool operator==(const Clustering&) const = default;
};

struct Status {
  bool ok = true;
  std::string message;

  static Status success() { return {}; }
  static Status failure(std::string msg) { return {false, std::move(msg)}; }
  explicit operator bool() const { return ok; }
};

/// Checks the Clustering invariants for a point set of size n. Partial
/// clusterings (kUnassigned entries) are accepted only when allow_partial
/// is set; label gaps are checked on complete clusterings only.
inline Status validate_clustering(const Clustering& c, std::size_t n, bool allow_partial = false) {
  if (c.size() != n) {
    return Status::failure("wrong length: expected " + std::to_string(n) + ", got " +
                           std::to_string(c.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    ClusterId id = c.assignment[i];
    if (id == kUnassigned) {
      if (!allow_partial) return Status::failure("point " + std::to_string(i) + " is unassigned");
      continue;
    }
    if (id < 0) return Status::failure("point " + std::to_string(i) + " has negative id");
    if (static_cast<std::size_t>(id) >= c.k) {
      return Status::failure("id >= k at point " + std::to_string(i) + " (id " +
                             std::to_string(id) + ", k " + std::to_string(c.k) + ")");
    }
  }
  if (c.is_complete()) {
    auto sizes = c.cluster_sizes();
    for (std::size_t j = 0; j < sizes.size(); ++j)
      if (sizes[j] == 0) return Status::failure("label gap: cluster " + std::to_string(j) + " is empty");
  }
  return Status::success();
}

/// Parameters of the theoretical pipeline, derived from (n, k, alpha,
/// epsilon, delta).
struct TheoryParams {
  std::size_t n = 0;
  std::size_t k = 0;
  double alpha = 0;
  double epsilon = 0;
  double delta = 0;
  std::size_t b = 0;        // upper bound on bad points
  std::size_t q = 0;        // candidate pool size, 2b
  std::size_t iter = 0;     // number of landmarks
  std::size_t s_min = 0;    // ball activation size, b + 1
  std::size_t n_prime = 0;  // coverage needed to stop, n - b
};

namespace detail {
// Ceiling that ignores floating-point noise below 1e-9 relative, so that
// an exact product such as 0.18 * 1000 rounds to 180 and not 181.
inline double stable_ceil(double x) {
  double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return r;
  return std::ceil(x);
}
}  // namespace detail

inline TheoryParams derive_theory_params(std::size_t n, std::size_t k, double alpha, double epsilon,
                                         double delta) {
  if (n < 1) throw Error("n must be at least 1");
  if (k < 1) throw Error("k must be at least 1");
  if (!(alpha > 0)) throw Error("alpha must be positive");
  if (!(epsilon > 0 && epsilon < 1)) throw Error("epsilon must lie in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw Error("delta must lie in (0, 1)");

  TheoryParams p;
  p.n = n;
  p.k = k;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.delta = delta;
  const double nd = static_cast<double>(n);
  p.b = static_cast<std::size_t>(detail::stable_ceil((1.0 + 17.0 / alpha) * epsilon * nd));
  if (2 * p.b >= n) {
    throw Error("b = " + std::to_string(p.b) + " is not below n/2 = " + std::to_string(nd / 2) +
                "; q = 2b would exceed n");
  }
  p.q = 2 * p.b;
  p.iter = static_cast<std::size_t>(
      detail::stable_ceil(4.0 * static_cast<double>(k) + 16.0 * std::log(1.0 / delta)));
  p.s_min = p.b + 1;
  if (p.s_min > n) throw Error("s_min exceeds n");
  p.n_prime = n - p.b;
  return p;
}

// Clustering file: one integer per line, -1 for unassigned.

inline void write_clustering(std::ostream& out, const Clustering& c) {
  for (ClusterId id : c.assignment) out << id << '\n';
}

inline void write_clustering_file(const std::string& path, const Clustering& c) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_clustering(out, c);
  if (!out) throw Error("write failed: " + path);
}

inline Clustering read_clustering(std::istream& in) {
  std::vector<ClusterId> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long v = 0;
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) {
      throw ParseError("clustering line " + std::to_string(lineno) + ": expected one integer");
    }
    if (v < -1 || v > std::numeric_limits<ClusterId>::max()) {
      throw ParseError("clustering line " + std::to_string(lineno) + ": id out of range");
    }
    labels.push_back(static_cast<ClusterId>(v));
  }
  return Clustering::from_labels(std::move(labels));
}

inline Clustering read_clustering_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_clustering(in);
}

}  // namespace lmc
