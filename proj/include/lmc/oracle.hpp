#pragma once

// One-versus-all distance oracles with query accounting.
//
// A DistanceOracle produces full distance rows on demand. All algorithm
// code goes through query_one_vs_all(), which charges a QueryLedger once
// per distinct point and caches the row.

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lmc/core.hpp"
#include "lmc/log.hpp"

namespace lmc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using DistanceRow = std::vector<double>;
using RowPtr = std::shared_ptr<const DistanceRow>;

class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;

  virtual std::size_t size() const = 0;

  /// Single distance lookup. Diagnostics and brute-force references use
  /// this; it is not charged to any ledger.
  virtual double distance(PointIndex a, PointIndex b) const = 0;

  /// Writes d(p, s) for every s into out (size n).
  virtual void fill_row(PointIndex p, std::span<double> out) const {
    for (PointIndex s = 0; s < size(); ++s) out[s] = distance(p, s);
  }
};

/// Counts one-vs-all queries and caches returned rows.
///
/// The counter is atomic and the cache is mutex-guarded, so concurrent
/// queries against one ledger are safe. With caching disabled every call
/// is charged.
class QueryLedger {
 public:
  explicit QueryLedger(bool caching = true) : caching_(caching) {}

  QueryLedger(const QueryLedger&) = delete;
  QueryLedger& operator=(const QueryLedger&) = delete;

  std::size_t count() const { return count_.load(std::memory_order_relaxed); }
  bool caching() const { return caching_; }

  RowPtr cached(PointIndex p) const {
    std::lock_guard lock(mu_);
    auto it = rows_.find(p);
    return it == rows_.end() ? nullptr : it->second;
  }

  std::size_t cached_rows() const {
    std::lock_guard lock(mu_);
    return rows_.size();
  }

 private:
  friend RowPtr query_one_vs_all(const DistanceOracle&, PointIndex, QueryLedger&);

  std::atomic<std::size_t> count_{0};
  bool caching_;
  mutable std::mutex mu_;
  std::unordered_map<PointIndex, RowPtr> rows_;
};

inline RowPtr query_one_vs_all(const DistanceOracle& oracle, PointIndex p, QueryLedger& ledger) {
  if (p >= oracle.size()) {
    throw Error("point index " + std::to_string(p) + " out of range (n = " +
                std::to_string(oracle.size()) + ")");
  }
  if (ledger.caching_) {
    if (RowPtr hit = ledger.cached(p)) return hit;
  }
  auto row = std::make_shared<DistanceRow>(oracle.size());
  oracle.fill_row(p, *row);
  (*row)[p] = 0.0;
  ledger.count_.fetch_add(1, std::memory_order_relaxed);
  RowPtr result = std::move(row);
  if (ledger.caching_) {
    std::lock_guard lock(ledger.mu_);
    auto [it, inserted] = ledger.rows_.emplace(p, result);
    if (!inserted) return it->second;
  }
  return result;
}

/// Points in R^dim under the Euclidean norm.
class EuclideanOracle final : public DistanceOracle {
 public:
  EuclideanOracle(std::size_t n, std::size_t dim, std::vector<double> coords)
      : n_(n), dim_(dim), coords_(std::move(coords)) {
    if (coords_.size() != n_ * dim_) throw Error("coordinate array does not match n * dim");
  }

  std::size_t size() const override { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(PointIndex i) const { return {coords_.data() + i * dim_, dim_}; }
  const std::vector<double>& coordinates() const { return coords_; }

  double distance(PointIndex a, PointIndex b) const override {
    const double* x = coords_.data() + a * dim_;
    const double* y = coords_.data() + b * dim_;
    double acc = 0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double t = x[j] - y[j];
      acc += t * t;
    }
    return std::sqrt(acc);
  }

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Dense n x n matrix of extended-real distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = 0.0) : n_(n), d_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

  static DistanceMatrix from(const DistanceOracle& oracle) {
    DistanceMatrix m(oracle.size());
    for (std::size_t i = 0; i < m.n_; ++i) {
      oracle.fill_row(i, {m.d_.data() + i * m.n_, m.n_});
      m(i, i) = 0.0;
    }
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

/// Oracle over a precomputed matrix. Construction forces a zero diagonal
/// and symmetrizes asymmetric pairs to their minimum.
class MatrixOracle final : public DistanceOracle {
 public:
  explicit MatrixOracle(DistanceMatrix m) : m_(std::move(m)) {
    const std::size_t n = m_.size();
    for (std::size_t i = 0; i < n; ++i) {
      m_(i, i) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (m_(i, j) < 0 || m_(j, i) < 0 || std::isnan(m_(i, j)) || std::isnan(m_(j, i))) {
          throw Error("negative distance at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
        if (m_(i, j) != m_(j, i)) {
          const double v = std::min(m_(i, j), m_(j, i));
          m_(i, j) = m_(j, i) = v;
          ++symmetrized_;
        }
      }
    }
    if (symmetrized_ > 0) {
      logger().warn("distance matrix was asymmetric; symmetrized {} pairs by minimum", symmetrized_);
    }
  }

  std::size_t size() const override { return m_.size(); }
  double distance(PointIndex a, PointIndex b) const override { return m_(a, b); }
  void fill_row(PointIndex p, std::span<double> out) const override {
    auto r = m_.row(p);
    std::copy(r.begin(), r.end(), out.begin());
  }

  const DistanceMatrix& matrix() const { return m_; }
  std::size_t symmetrized_pairs() const { return symmetrized_; }

 private:
  DistanceMatrix m_;
  std::size_t symmetrized_ = 0;
};

// ---------------------------------------------------------------------------
// File formats. Points: header "n dim", then n rows of dim reals. Matrix:
// header "n", then n rows of n tokens (real or "inf"). '#' lines skipped.

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-blank, non-comment line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  std::size_t lineno() const { return lineno_; }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_real(std::string_view tok, double& out, bool allow_inf) {
  if (allow_inf && (tok == "inf" || tok == "+inf" || tok == "Inf" || tok == "INF")) {
    out = kInf;
    return true;
  }
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline bool parse_size(std::string_view tok, std::size_t& out) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

inline EuclideanOracle read_points(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError("missing header");
  auto head = detail::split_ws(line);
  std::size_t n = 0, dim = 0;
  if (head.size() != 2 || !detail::parse_size(head[0], n) || !detail::parse_size(head[1], dim) ||
      n == 0 || dim == 0) {
    throw ParseError("malformed header on line " + std::to_string(reader.lineno()) +
                     ": expected \"n dim\" with positive integers");
  }
  std::vector<double> coords;
  coords.reserve(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(line)) {
      throw ParseError("missing rows: expected " + std::to_string(n) + ", found " + std::to_string(i));
    }
    auto toks = detail::split_ws(line);
    if (toks.size() != dim) {
      throw ParseError("row length mismatch on line " + std::to_string(reader.lineno()) + ": expected " +
                       std::to_string(dim) + " values, found " + std::to_string(toks.size()));
    }
    for (auto tok : toks) {
      double v = 0;
      if (!detail::parse_real(tok, v, false)) {
        throw ParseError("non-numeric token '" + std::string(tok) + "' on line " +
                         std::to_string(reader.lineno()));
      }
      coords.push_back(v);
    }
  }
  if (reader.next(line)) throw ParseError("extra rows after line " + std::to_string(reader.lineno() - 1));
  return EuclideanOracle(n, dim, std::move(coords));
}

inline EuclideanOracle load_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_points(in);
}

inline MatrixOracle read_matrix(std::istream& in) {
  detail::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError("missing header");
  auto head = detail::split_ws(line);
  std::size_t n = 0;
  if (head.size() != 1 || !detail::parse_size(head[0], n) || n == 0) {
    throw ParseError("malformed header: expected a single positive integer n");
  }
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(line)) throw ParseError("non-square data: expected " + std::to_string(n) + " rows");
    auto toks = detail::split_ws(line);
    if (toks.size() != n) {
      throw ParseError("non-square data on line " + std::to_string(reader.lineno()) + ": expected " +
                       std::to_string(n) + " entries, found " + std::to_string(toks.size()));
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0;
      if (!detail::parse_real(toks[j], v, true)) {
        throw ParseError("non-numeric token '" + std::string(toks[j]) + "' on line " +
                         std::to_string(reader.lineno()));
      }
      if (v < 0) {
        throw ParseError("negative distance on line " + std::to_string(reader.lineno()));
      }
      m(i, j) = v;
    }
  }
  if (reader.next(line)) throw ParseError("non-square data: more than " + std::to_string(n) + " rows");
  return MatrixOracle(std::move(m));
}

inline MatrixOracle load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_matrix(in);
}

inline void write_matrix(std::ostream& out, const DistanceMatrix& m) {
  out << m.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out << ' ';
      const double v = m(i, j);
      if (std::isinf(v)) {
        out << "inf";
      } else {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, p - buf);
      }
    }
    out << '\n';
  }
}

}  // namespace lmc
