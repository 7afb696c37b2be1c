#pragma once

#include <cassert>
#include <cstddef>
#include <numeric>
#include <vector>

namespace lmc {

/// Union-find over a fixed universe [0, capacity). Elements join the
/// structure only through make_set(); union by rank, path compression.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t capacity)
      : parent_(capacity), rank_(capacity, 0), present_(capacity, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  void make_set(std::size_t x) {
    assert(!present_[x] && "make_set called twice");
    present_[x] = 1;
    parent_[x] = x;
    rank_[x] = 0;
    ++sets_;
  }

  bool contains(std::size_t x) const { return present_[x] != 0; }

  std::size_t find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  /// Returns true when two distinct sets were merged.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    --sets_;
    return true;
  }

  /// Number of disjoint sets among elements added so far.
  std::size_t set_count() const { return sets_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
  std::vector<char> present_;
  std::size_t sets_ = 0;
};

}  // namespace lmc
