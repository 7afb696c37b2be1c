#pragma once

// Adaptive landmark selection: after a uniformly random first landmark,
// each new landmark is drawn uniformly from the q points farthest from
// the current landmark set.

#include <algorithm>
#include <optional>
#include <vector>

#include "lmc/oracle.hpp"
#include "lmc/rng.hpp"

namespace lmc {

struct LandmarkSet {
  std::vector<PointIndex> landmarks;  // selection order
  std::vector<RowPtr> rows;           // rows[i] belongs to landmarks[i]
  std::vector<double> d_min;          // distance to the nearest landmark

  std::size_t size() const { return landmarks.size(); }

  bool contains(PointIndex p) const {
    return std::find(landmarks.begin(), landmarks.end(), p) != landmarks.end();
  }

  /// Cached distance between landmark slot i and point s.
  double distance(std::size_t slot, PointIndex s) const { return (*rows[slot])[s]; }
};

namespace detail {

// Farther-first total order: larger d_min first, ties by smaller index.
struct FartherFirst {
  const std::vector<double>* d_min;
  bool operator()(PointIndex a, PointIndex b) const {
    const double da = (*d_min)[a], db = (*d_min)[b];
    if (da != db) return da > db;
    return a < b;
  }
};

// Points ranked within the first `window` positions of the farther-first
// order, excluding current landmarks, listed in ascending index order.
// Uses linear-time selection for the window boundary.
inline std::vector<PointIndex> farthest_candidates(const std::vector<double>& d_min,
                                                   const std::vector<char>& is_landmark,
                                                   std::size_t window,
                                                   std::vector<PointIndex>& scratch) {
  const std::size_t n = d_min.size();
  std::vector<PointIndex> out;
  FartherFirst farther{&d_min};
  if (window >= n) {
    for (PointIndex s = 0; s < n; ++s)
      if (!is_landmark[s]) out.push_back(s);
    return out;
  }
  scratch.resize(n);
  for (PointIndex s = 0; s < n; ++s) scratch[s] = s;
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(window - 1),
                   scratch.end(), farther);
  const PointIndex boundary = scratch[window - 1];
  for (PointIndex s = 0; s < n; ++s)
    if (!is_landmark[s] && !farther(boundary, s)) out.push_back(s);
  return out;
}

}  // namespace detail

/// Selects `iter` distinct landmarks. When `first` is given it replaces the
/// uniform draw of the first landmark (the RNG is not consumed for it).
///
/// If every point in the top-q window is already a landmark, the window is
/// widened by q until a non-landmark candidate appears, so no query is
/// ever spent on a duplicate.
inline LandmarkSet select_landmarks(const DistanceOracle& oracle, QueryLedger& ledger, std::size_t q,
                                    std::size_t iter, Rng& rng,
                                    std::optional<PointIndex> first = std::nullopt) {
  const std::size_t n = oracle.size();
  if (n == 0) throw Error("empty point set");
  if (q < 1 || q > n) throw Error("q must lie in [1, n]");
  if (iter < 1) throw Error("iter must be at least 1");
  if (iter > n) throw Error("cannot select more landmarks than points");

  LandmarkSet set;
  set.landmarks.reserve(iter);
  set.rows.reserve(iter);
  std::vector<char> is_landmark(n, 0);
  std::vector<PointIndex> scratch;

  auto add = [&](PointIndex l) {
    RowPtr row = query_one_vs_all(oracle, l, ledger);
    if (set.landmarks.empty()) {
      set.d_min.assign(row->begin(), row->end());
    } else {
      for (PointIndex s = 0; s < n; ++s) set.d_min[s] = std::min(set.d_min[s], (*row)[s]);
    }
    set.d_min[l] = 0.0;
    is_landmark[l] = 1;
    set.landmarks.push_back(l);
    set.rows.push_back(std::move(row));
  };

  PointIndex l0 = first ? *first : static_cast<PointIndex>(rng.uniform_index(n));
  if (l0 >= n) throw Error("first landmark out of range");
  add(l0);

  while (set.landmarks.size() < iter) {
    std::vector<PointIndex> candidates;
    for (std::size_t window = q; candidates.empty(); window += q) {
      candidates = detail::farthest_candidates(set.d_min, is_landmark, window, scratch);
      if (window >= n) break;
    }
    if (candidates.empty()) throw Error("cannot select more landmarks than points");
    add(candidates[rng.uniform_index(candidates.size())]);
  }
  return set;
}

inline LandmarkSet select_landmarks(const DistanceOracle& oracle, QueryLedger& ledger, std::size_t q,
                                    std::size_t iter, std::uint64_t seed) {
  Rng rng(seed);
  return select_landmarks(oracle, ledger, q, iter, rng);
}

}  // namespace lmc
