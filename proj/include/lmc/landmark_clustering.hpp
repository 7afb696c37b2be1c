#pragma once

// End-to-end landmark clustering: select landmarks, expand balls, then
// reassign every point to the nearest representative landmark.

#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "lmc/core.hpp"
#include "lmc/expand.hpp"
#include "lmc/log.hpp"
#include "lmc/oracle.hpp"
#include "lmc/rng.hpp"
#include "lmc/selection.hpp"

namespace lmc {

/// Machine-readable summary of one clustering run (one JSON line).
struct RunReport {
  std::string algo = "landmark";
  std::string mode;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t queries = 0;
  std::size_t landmarks = 0;
  std::size_t q = 0;
  std::size_t s_min = 0;
  std::size_t n_prime = 0;
  std::optional<std::size_t> b;
  double radius = 0;
  std::size_t pops = 0;
  std::size_t unassigned_before_reassignment = 0;
  bool no_cluster = false;
  std::string advice;
  double wall_ms = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["algo"] = algo;
    j["mode"] = mode;
    j["n"] = n;
    j["k"] = k;
    j["seed"] = seed;
    j["rng"] = std::string(kRngName) + "/v" + std::to_string(kRngVersion);
    j["queries"] = queries;
    j["landmarks"] = landmarks;
    j["q"] = q;
    j["s_min"] = s_min;
    j["n_prime"] = n_prime;
    if (b) j["b"] = *b;
    j["radius"] = std::isfinite(radius) ? nlohmann::json(radius) : nlohmann::json(nullptr);
    j["pops"] = pops;
    j["unassigned_before_reassignment"] = unassigned_before_reassignment;
    j["no_cluster"] = no_cluster;
    if (!advice.empty()) j["advice"] = advice;
    j["wall_ms"] = wall_ms;
    return j;
  }
};

struct LandmarkRun {
  std::optional<Clustering> clustering;  // complete; empty on NoCluster
  std::optional<Clustering> partial;     // expansion output before reassignment
  LandmarkSet landmark_set;
  RunReport report;

  bool found() const { return clustering.has_value(); }
};

/// Reassigns every point to the nearest representative landmark, one per
/// cluster of `partial` (its lowest-index landmark). Uses cached rows only.
inline Clustering assign_to_landmarks(const Clustering& partial, const LandmarkSet& set) {
  const std::size_t n = partial.size();
  const std::size_t k = partial.k;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> rep_slot(k, kNone);
  for (std::size_t slot = 0; slot < set.size(); ++slot) {
    const PointIndex l = set.landmarks[slot];
    if (l >= n) throw Error("landmark index out of range");
    const ClusterId c = partial.assignment[l];
    if (c == kUnassigned) continue;
    auto& r = rep_slot[static_cast<std::size_t>(c)];
    if (r == kNone || set.landmarks[r] > l) r = slot;
  }
  for (std::size_t j = 0; j < k; ++j)
    if (rep_slot[j] == kNone) throw Error("cluster without landmark: " + std::to_string(j));

  std::vector<ClusterId> labels(n, 0);
  std::size_t stranded = 0;
  for (PointIndex x = 0; x < n; ++x) {
    double best = kInf;
    ClusterId best_j = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = set.distance(rep_slot[j], x);
      if (d < best) {
        best = d;
        best_j = static_cast<ClusterId>(j);
      }
    }
    if (std::isinf(best)) ++stranded;
    labels[x] = best_j;
  }
  if (stranded > 0) {
    logger().warn("{} points are at infinite distance from every representative; assigned to cluster 0",
                  stranded);
  }
  return Clustering(std::move(labels), k);
}

namespace detail {

inline LandmarkRun run_pipeline(const DistanceOracle& oracle, std::size_t k, std::size_t q,
                                std::size_t iter, std::size_t s_min, std::size_t n_prime,
                                std::uint64_t seed, QueryLedger& ledger, RunReport report,
                                const ExpansionObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  LandmarkRun run;
  Rng rng(seed);
  run.landmark_set = select_landmarks(oracle, ledger, q, iter, rng);
  ExpansionResult ex = expand_landmarks(run.landmark_set, s_min, n_prime, k, observer);

  report.n = oracle.size();
  report.k = k;
  report.seed = seed;
  report.q = q;
  report.s_min = s_min;
  report.n_prime = n_prime;
  report.landmarks = run.landmark_set.size();
  report.radius = ex.radius;
  report.pops = ex.pops;
  if (ex.found()) {
    report.unassigned_before_reassignment = ex.clustering->unassigned_count();
    run.clustering = assign_to_landmarks(*ex.clustering, run.landmark_set);
    run.partial = std::move(ex.clustering);
  } else {
    report.no_cluster = true;
  }
  report.queries = ledger.count();
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  run.report = std::move(report);
  return run;
}

}  // namespace detail

/// Runs with parameters derived from (alpha, epsilon, delta). Parameter
/// rejection happens before any query is issued.
inline LandmarkRun landmark_cluster_theory(const DistanceOracle& oracle, std::size_t k, double alpha,
                                           double epsilon, double delta, std::uint64_t seed,
                                           QueryLedger& ledger, const ExpansionObserver& observer = {}) {
  const TheoryParams p = derive_theory_params(oracle.size(), k, alpha, epsilon, delta);
  RunReport report;
  report.mode = "theory";
  report.b = p.b;
  return detail::run_pipeline(oracle, k, p.q, p.iter, p.s_min, p.n_prime, seed, ledger,
                              std::move(report), observer);
}

inline LandmarkRun landmark_cluster_theory(const DistanceOracle& oracle, std::size_t k, double alpha,
                                           double epsilon, double delta, std::uint64_t seed) {
  QueryLedger ledger;
  return landmark_cluster_theory(oracle, k, alpha, epsilon, delta, seed, ledger);
}

/// Practical knobs. Unset values default to: 40k landmarks (capped at n),
/// q = 2n/k, s_min = s_min_frac * n/k, n' = n_prime_frac * n.
struct HeuristicOptions {
  std::size_t k = 0;
  std::optional<std::size_t> landmark_budget;
  std::optional<std::size_t> s_min;
  std::optional<std::size_t> n_prime;
  std::optional<std::size_t> q;
  double s_min_frac = 0.05;
  double n_prime_frac = 0.5;
};

struct HeuristicParams {
  std::size_t landmarks = 0;
  std::size_t q = 0;
  std::size_t s_min = 0;
  std::size_t n_prime = 0;
};

inline HeuristicParams resolve_heuristic(std::size_t n, const HeuristicOptions& opt) {
  if (opt.k < 1) throw Error("k must be at least 1");
  if (opt.k > n) throw Error("k exceeds the number of points");
  HeuristicParams p;
  p.landmarks = opt.landmark_budget.value_or(std::min(40 * opt.k, n));
  if (p.landmarks < opt.k) throw Error("fewer landmarks than clusters cannot yield k components");
  if (p.landmarks > n) throw Error("cannot select more landmarks than points");
  p.q = opt.q ? *opt.q : std::clamp<std::size_t>(2 * n / opt.k, 1, n);
  if (p.q < 1 || p.q > n) throw Error("q must lie in [1, n]");
  const double nd = static_cast<double>(n);
  p.s_min = opt.s_min.value_or(static_cast<std::size_t>(
      std::max(1.0, detail::stable_ceil(opt.s_min_frac * nd / static_cast<double>(opt.k)))));
  p.n_prime = opt.n_prime.value_or(static_cast<std::size_t>(detail::stable_ceil(opt.n_prime_frac * nd)));
  if (p.s_min < 1) throw Error("s_min must be at least 1");
  if (p.n_prime > n) throw Error("n_prime exceeds n");
  return p;
}

inline LandmarkRun landmark_cluster_heuristic(const DistanceOracle& oracle, const HeuristicOptions& opt,
                                              std::uint64_t seed, QueryLedger& ledger,
                                              const ExpansionObserver& observer = {}) {
  const HeuristicParams p = resolve_heuristic(oracle.size(), opt);
  RunReport report;
  report.mode = "heuristic";
  LandmarkRun run = detail::run_pipeline(oracle, opt.k, p.q, p.landmarks, p.s_min, p.n_prime, seed,
                                         ledger, std::move(report), observer);
  if (!run.found()) {
    run.report.advice = "no radius gave exactly " + std::to_string(opt.k) +
                        " components; rerun with a range of s_min values (current " +
                        std::to_string(p.s_min) +
                        ") scanning up or down until a clustering appears without an oversized cluster";
  }
  return run;
}

inline LandmarkRun landmark_cluster_heuristic(const DistanceOracle& oracle, const HeuristicOptions& opt,
                                              std::uint64_t seed) {
  QueryLedger ledger;
  return landmark_cluster_heuristic(oracle, opt, seed, ledger);
}

}  // namespace lmc
