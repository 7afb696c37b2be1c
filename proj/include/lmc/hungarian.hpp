#pragma once

// Minimum-cost perfect assignment on a square matrix (Hungarian method
// with potentials, O(m^3)).

#include <cstdint>
#include <limits>
#include <vector>

namespace lmc {

struct Assignment {
  std::vector<std::size_t> column_of_row;
  std::int64_t cost = 0;
};

inline Assignment hungarian(const std::vector<std::vector<std::int64_t>>& cost) {
  const std::size_t m = cost.size();
  constexpr std::int64_t kBig = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based arrays; p[j] is the row matched to column j.
  std::vector<std::int64_t> u(m + 1, 0), v(m + 1, 0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kBig);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::int64_t delta = kBig;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment a;
  a.column_of_row.assign(m, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) a.column_of_row[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < m; ++i) a.cost += cost[i][a.column_of_row[i]];
  return a;
}

}  // namespace lmc
