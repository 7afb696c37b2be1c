#pragma once

// Ball expansion around landmarks.
//
// Every (landmark, point) pair with finite distance is processed in
// ascending (distance, landmark index, point index) order through a
// min-heap. Processing a pair grows that landmark's ball by one point. A ball is activated once it holds
// s_min points; activated balls that share a point are merged through a
// disjoint-set keyed by landmark. Expansion stops at the first pop after
// which exactly k components cover at least n_prime points.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/disjoint_set.hpp"
#include "lmc/oracle.hpp"
#include "lmc/selection.hpp"

namespace lmc {

inline constexpr std::size_t kNoRep = static_cast<std::size_t>(-1);

/// State of the expansion: ball contents, representative landmarks and
/// the component structure over activated balls. Landmarks are addressed
/// by slot (position in the landmark list).
class BallSystem {
 public:
  BallSystem(std::vector<PointIndex> landmarks, std::size_t n, std::size_t s_min)
      : landmarks_(std::move(landmarks)),
        n_(n),
        s_min_(s_min),
        items_(landmarks_.size()),
        activated_(landmarks_.size(), 0),
        rep_(n, kNoRep),
        components_(landmarks_.size()) {
    if (s_min_ < 1) throw Error("s_min must be at least 1");
    if (s_min_ > n_) throw Error("s_min exceeds the number of points; no ball can activate");
  }

  /// Adds point s to the ball of `slot` (one heap pop).
  void add(std::size_t slot, PointIndex s) {
    items_[slot].push_back(s);
    const std::size_t size = items_[slot].size();
    if (size == s_min_) {
      activate(slot);
    } else if (size > s_min_) {
      update_components(slot, s);
    }
  }

  /// Creates the component of a ball that just reached s_min points and
  /// links each of its points.
  void activate(std::size_t slot) {
    assert(!activated_[slot] && "ball activated twice");
    assert(items_[slot].size() == s_min_);
    activated_[slot] = 1;
    components_.make_set(slot);
    for (PointIndex s : items_[slot]) update_components(slot, s);
  }

  /// Gives s a representative if it has none, otherwise merges the
  /// component of `slot` with that of the representative.
  void update_components(std::size_t slot, PointIndex s) {
    if (rep_[s] == kNoRep) {
      rep_[s] = slot;
      ++clustered_;
    } else {
      components_.unite(components_.find(slot), components_.find(rep_[s]));
    }
  }

  std::size_t component_count() const { return components_.set_count(); }
  std::size_t clustered_count() const { return clustered_; }
  std::size_t landmark_count() const { return landmarks_.size(); }
  std::size_t point_count() const { return n_; }
  std::size_t s_min() const { return s_min_; }
  PointIndex landmark(std::size_t slot) const { return landmarks_[slot]; }
  bool activated(std::size_t slot) const { return activated_[slot] != 0; }
  const std::vector<PointIndex>& items(std::size_t slot) const { return items_[slot]; }
  std::optional<std::size_t> rep(PointIndex s) const {
    return rep_[s] == kNoRep ? std::nullopt : std::optional<std::size_t>(rep_[s]);
  }
  std::size_t component_of(std::size_t slot) { return components_.find(slot); }

  /// One cluster per component; a point belongs to the component of its
  /// representative. Cluster ids follow the smallest landmark index in
  /// each component. Points with no representative stay unassigned.
  Clustering format_clustering() {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < landmarks_.size(); ++i)
      if (activated_[i]) slots.push_back(i);
    std::sort(slots.begin(), slots.end(),
              [&](std::size_t a, std::size_t b) { return landmarks_[a] < landmarks_[b]; });
    std::vector<ClusterId> id_of_root(landmarks_.size(), kUnassigned);
    ClusterId next = 0;
    for (std::size_t slot : slots) {
      const std::size_t root = components_.find(slot);
      if (id_of_root[root] == kUnassigned) id_of_root[root] = next++;
    }
    std::vector<ClusterId> labels(n_, kUnassigned);
    for (PointIndex s = 0; s < n_; ++s)
      if (rep_[s] != kNoRep) labels[s] = id_of_root[components_.find(rep_[s])];
    return Clustering(std::move(labels), static_cast<std::size_t>(next));
  }

 private:
  std::vector<PointIndex> landmarks_;
  std::size_t n_;
  std::size_t s_min_;
  std::vector<std::vector<PointIndex>> items_;
  std::vector<char> activated_;
  std::vector<std::size_t> rep_;
  DisjointSet components_;
  std::size_t clustered_ = 0;
};

struct ExpansionStep {
  std::size_t pop = 0;  // 1-based
  double radius = 0;
  std::size_t slot = 0;
  PointIndex point = 0;
  std::size_t components = 0;
  std::size_t clustered = 0;
};

using ExpansionObserver = std::function<void(const ExpansionStep&, BallSystem&)>;

struct ExpansionResult {
  std::optional<Clustering> clustering;  // empty means no clustering was found
  double radius = 0;                     // radius at termination or at exhaustion
  std::size_t pops = 0;
  std::size_t components = 0;
  std::size_t clustered = 0;

  bool found() const { return clustering.has_value(); }
};

namespace detail {

// Head of one landmark's sorted row. The heap holds one head per landmark,
// so its minimum is the global minimum over all pending pairs.
struct HeapEntry {
  double dist;
  std::uint32_t landmark;
  std::uint32_t point;
  std::uint32_t slot;
  std::uint32_t pos;  // index of `point` in the slot's sorted order
};

// std heap functions build max-heaps; "after" puts the smallest key on top.
inline bool heap_after(const HeapEntry& a, const HeapEntry& b) {
  if (a.dist != b.dist) return a.dist > b.dist;
  if (a.landmark != b.landmark) return a.landmark > b.landmark;
  return a.point > b.point;
}

}  // namespace detail

/// Runs the expansion over landmark rows. rows[i] must hold the distances
/// from landmarks[i] to all n points. Pairs at infinite distance are never
/// enqueued.
///
/// Pairs leave the heap in ascending (distance, landmark index, point
/// index) order. Each row is sorted once and the heap merges the row
/// heads, which gives the same order as a heap over all |L| n pairs.
inline ExpansionResult expand_landmarks(std::span<const PointIndex> landmarks,
                                        std::span<const RowPtr> rows, std::size_t s_min,
                                        std::size_t n_prime, std::size_t k,
                                        const ExpansionObserver& observer = {}) {
  if (landmarks.size() != rows.size()) throw Error("one row per landmark is required");
  if (landmarks.empty()) throw Error("no landmarks");
  const std::size_t n = rows.front()->size();
  if (n_prime > n) throw Error("n_prime exceeds n");
  if (n >= (std::size_t{1} << 32) || landmarks.size() >= (std::size_t{1} << 32)) {
    throw Error("instance too large for 32-bit heap keys");
  }

  BallSystem balls(std::vector<PointIndex>(landmarks.begin(), landmarks.end()), n, s_min);

  // per landmark: finite (distance, point) pairs in ascending order
  std::vector<std::vector<std::pair<double, std::uint32_t>>> order(landmarks.size());
  std::vector<detail::HeapEntry> heap;
  heap.reserve(landmarks.size());
  for (std::size_t slot = 0; slot < landmarks.size(); ++slot) {
    const DistanceRow& row = *rows[slot];
    if (row.size() != n) throw Error("landmark rows differ in length");
    auto& ord = order[slot];
    ord.reserve(n);
    for (PointIndex s = 0; s < n; ++s)
      if (!std::isinf(row[s])) ord.emplace_back(row[s], static_cast<std::uint32_t>(s));
    std::sort(ord.begin(), ord.end());
    if (!ord.empty()) {
      heap.push_back({ord[0].first, static_cast<std::uint32_t>(landmarks[slot]), ord[0].second,
                      static_cast<std::uint32_t>(slot), 0});
    }
  }
  std::make_heap(heap.begin(), heap.end(), detail::heap_after);

  ExpansionResult result;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), detail::heap_after);
    const detail::HeapEntry e = heap.back();
    heap.pop_back();
    const auto& ord = order[e.slot];
    if (e.pos + 1 < ord.size()) {
      const auto& [d, next] = ord[e.pos + 1];
      heap.push_back({d, e.landmark, next, e.slot, e.pos + 1});
      std::push_heap(heap.begin(), heap.end(), detail::heap_after);
    }

    result.radius = e.dist;
    ++result.pops;
    balls.add(e.slot, e.point);

    if (observer) {
      observer(ExpansionStep{result.pops, e.dist, e.slot, e.point, balls.component_count(),
                             balls.clustered_count()},
               balls);
    }
    if (balls.clustered_count() >= n_prime && balls.component_count() == k) {
      result.clustering = balls.format_clustering();
      break;
    }
  }
  result.components = balls.component_count();
  result.clustered = balls.clustered_count();
  return result;
}

inline ExpansionResult expand_landmarks(const LandmarkSet& set, std::size_t s_min, std::size_t n_prime,
                                        std::size_t k, const ExpansionObserver& observer = {}) {
  return expand_landmarks(set.landmarks, set.rows, s_min, n_prime, k, observer);
}

/// Observer that writes "radius,components,clustered" CSV lines.
inline ExpansionObserver csv_trace(std::ostream& out) {
  out << "radius,components,clustered\n";
  return [&out](const ExpansionStep& step, BallSystem&) {
    out << step.radius << ',' << step.components << ',' << step.clustered << '\n';
  };
}

}  // namespace lmc
