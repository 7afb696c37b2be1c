// lmc: command-line front end for the landmark clustering library.
//
//   lmc gen      generate a labeled synthetic instance
//   lmc cluster  cluster a points or matrix file
//   lmc eval     compare two clustering files
//   lmc verify   check the good/bad point structure of a dataset
//   lmc bench    landmark clustering vs. the embedding baseline
//
// Exit codes: 0 success, 1 error, 2 no clustering found (cluster),
// 3 a checked property failed (eval, verify).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmc/lmc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoCluster = 2;
constexpr int kExitCheckFailed = 3;

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::unique_ptr<lmc::DistanceOracle> load_oracle(const std::string& path, const std::string& format) {
  if (format == "points") return std::make_unique<lmc::EuclideanOracle>(lmc::load_points_file(path));
  if (format == "matrix") return std::make_unique<lmc::MatrixOracle>(lmc::load_matrix_file(path));
  throw lmc::Error("unknown input format '" + format + "'");
}

void write_report_line(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) {
    std::cout << j.dump() << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw lmc::Error("cannot open " + path + " for writing");
  out << j.dump() << '\n';
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string preset;
  std::uint64_t seed = 1;
  std::optional<std::size_t> n;
  std::optional<double> separation;
  std::string points, labels, matrix;
  double mask_p = 0.0;
};

int cmd_gen(const GenArgs& a) {
  lmc::GeneratorSpec spec = lmc::preset_spec(a.preset, a.seed);
  if (a.n) spec.n = *a.n;
  if (a.separation) spec.center_separation = *a.separation;
  lmc::LabeledDataset ds = lmc::generate(spec);
  lmc::write_dataset(ds, a.points, a.labels);
  if (!a.matrix.empty()) {
    lmc::DistanceMatrix m = lmc::DistanceMatrix::from(ds.points);
    if (a.mask_p > 0) m = lmc::mask_infinite(std::move(m), a.mask_p, lmc::derive_seed(a.seed, 0x3a5c));
    std::ofstream out(a.matrix);
    if (!out) throw lmc::Error("cannot open " + a.matrix + " for writing");
    out << "# lmc-gen " << lmc::describe(spec) << " mask_p=" << a.mask_p << '\n';
    lmc::write_matrix(out, m);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ClusterArgs {
  std::string algo = "landmark";
  std::string mode = "theory";
  std::size_t k = 0;
  std::optional<double> alpha, epsilon, delta;
  std::optional<std::size_t> landmarks, q, smin, nprime;
  std::uint64_t seed = 1;
  std::string input, input_format = "points", out, report, trace;
};

int cmd_cluster(const ClusterArgs& a) {
  auto oracle = load_oracle(a.input, a.input_format);
  lmc::QueryLedger ledger;

  if (a.algo == "baseline") {
    const std::size_t d = a.landmarks.value_or(std::min(40 * a.k, oracle->size()));
    lmc::BaselineRun run = lmc::baseline_cluster(*oracle, a.k, d, a.seed, ledger);
    if (!a.out.empty()) lmc::write_clustering_file(a.out, run.clustering);
    write_report_line(a.report, run.report.to_json());
    return kExitOk;
  }
  if (a.algo != "landmark") throw lmc::Error("unknown algorithm '" + a.algo + "'");

  std::ofstream trace_file;
  lmc::ExpansionObserver observer;
  if (!a.trace.empty()) {
    trace_file.open(a.trace);
    if (!trace_file) throw lmc::Error("cannot open " + a.trace + " for writing");
    observer = lmc::csv_trace(trace_file);
  }

  lmc::LandmarkRun run;
  if (a.mode == "theory") {
    if (a.landmarks || a.q || a.smin || a.nprime) {
      throw lmc::Error("theory mode derives --landmarks, --q, --smin and --nprime; do not pass them");
    }
    if (!a.alpha || !a.epsilon || !a.delta) throw lmc::Error("theory mode requires --alpha, --epsilon and --delta");
    run = lmc::landmark_cluster_theory(*oracle, a.k, *a.alpha, *a.epsilon, *a.delta, a.seed, ledger, observer);
  } else if (a.mode == "heuristic") {
    lmc::HeuristicOptions opt;
    opt.k = a.k;
    opt.landmark_budget = a.landmarks;
    opt.q = a.q;
    opt.s_min = a.smin;
    opt.n_prime = a.nprime;
    run = lmc::landmark_cluster_heuristic(*oracle, opt, a.seed, ledger, observer);
  } else {
    throw lmc::Error("unknown mode '" + a.mode + "'");
  }

  write_report_line(a.report, run.report.to_json());
  if (!run.found()) {
    std::cerr << "no clustering found";
    if (!run.report.advice.empty()) std::cerr << ": " << run.report.advice;
    std::cerr << '\n';
    return kExitNoCluster;
  }
  if (!a.out.empty()) lmc::write_clustering_file(a.out, *run.clustering);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred, truth, measure = "both";
};

int cmd_eval(const EvalArgs& a) {
  const lmc::Clustering pred = lmc::read_clustering_file(a.pred);
  const lmc::Clustering truth = lmc::read_clustering_file(a.truth);
  if (pred.size() != truth.size()) {
    throw lmc::Error("length mismatch: " + a.pred + " has " + std::to_string(pred.size()) + " entries, " +
                     a.truth + " has " + std::to_string(truth.size()));
  }
  if (a.measure == "dist") {
    std::cout << "dist=" << fmt_real(lmc::clustering_dist(pred, truth).cost) << '\n';
    return kExitOk;
  }
  if (a.measure == "fmeasure") {
    std::cout << "fmeasure=" << fmt_real(lmc::f_measure(pred, truth)) << '\n';
    return kExitOk;
  }
  if (a.measure != "both") throw lmc::Error("unknown measure '" + a.measure + "'");
  const lmc::Lemma8Report r = lmc::check_lemma8(pred, truth);
  std::cout << "dist=" << fmt_real(r.d) << " fmeasure=" << fmt_real(r.f)
            << " lemma8=" << (r.holds ? "ok" : "VIOLATION") << '\n';
  return r.holds ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string input, input_format = "points", labels;
  std::size_t k = 0;
  double alpha = 1.0, epsilon = 0.02;
  std::optional<double> c;
};

int cmd_verify(const VerifyArgs& a) {
  auto oracle = load_oracle(a.input, a.input_format);
  const std::size_t n = oracle->size();
  std::optional<lmc::Clustering> labels;
  if (!a.labels.empty()) {
    labels = lmc::read_clustering_file(a.labels);
    if (labels->size() != n) throw lmc::Error("labels file length does not match the dataset");
  }
  auto dist = [&](lmc::PointIndex x, lmc::PointIndex y) { return oracle->distance(x, y); };

  lmc::StructureReport rep;
  std::string center_source;
  if (n <= lmc::kMaxExactKMedianPoints) {
    rep = lmc::classify_good_bad(lmc::DistanceMatrix::from(*oracle), a.k, a.alpha, a.epsilon);
    center_source = "exact-kmedian";
  } else {
    if (!labels) throw lmc::Error("n > 25 needs --labels (centers are taken as label medoids)");
    if (labels->k != a.k) throw lmc::Error("labels file has a different number of clusters than --k");
    auto members = labels->members();
    std::vector<lmc::PointIndex> medoids;
    for (const auto& cluster : members) {
      double best = lmc::kInf;
      lmc::PointIndex arg = cluster.empty() ? 0 : cluster.front();
      for (lmc::PointIndex y : cluster) {
        double s = 0;
        for (lmc::PointIndex x : cluster) s += dist(x, y);
        if (s < best) {
          best = s;
          arg = y;
        }
      }
      medoids.push_back(arg);
    }
    rep = lmc::classify_by_center_distances(
        n, a.k, [&](lmc::PointIndex x, std::size_t i) { return dist(x, medoids[i]); }, a.alpha, a.epsilon);
    rep.opt_centers = medoids;
    center_source = "label-medoids";
  }
  const lmc::StructureCertificate cert = lmc::certify_structure(rep, dist);

  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::cout << "centers=" << center_source << " n=" << n << " k=" << a.k << " cost=" << fmt_real(rep.opt_value)
            << " w=" << fmt_real(rep.w) << " d_crit=" << fmt_real(rep.d_crit) << '\n';
  std::cout << "bad_count<=b " << verdict(cert.bad_ok) << " (bad=" << rep.bad_count << " b=" << rep.b << ")\n";
  std::cout << "good_set_diameter<2*d_crit " << verdict(cert.within_ok) << " (max=" << fmt_real(cert.max_within)
            << ")\n";
  std::cout << "good_set_separation>16*d_crit " << verdict(cert.between_ok)
            << " (min=" << fmt_real(cert.min_between) << ")\n";
  if (cert.empty_good_sets > 0) std::cout << "empty_good_sets=" << cert.empty_good_sets << '\n';
  bool ok = cert.all();
  if (a.c) {
    if (!labels) throw lmc::Error("--c needs --labels as the target clustering");
    const lmc::CEPropertyReport ce =
        lmc::check_ce_property(lmc::DistanceMatrix::from(*oracle), a.k, *a.c, a.epsilon, *labels);
    std::cout << "ce_property " << verdict(ce.holds) << " (near_optimal=" << ce.near_optimal
              << " worst_dist=" << fmt_real(ce.worst_dist) << ")\n";
    ok = ok && ce.holds;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string preset = "theory";
  std::size_t trials = 11;
  std::uint64_t seed = 1;
  std::string mode = "heuristic";
  double alpha = 1.0, epsilon = 0.02, delta = 0.1;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  if (a.trials < 1) throw lmc::Error("--trials must be at least 1");
  const lmc::LabeledDataset ds = lmc::generate(lmc::preset_spec(a.preset, a.seed));
  const std::size_t k = ds.spec.k;

  struct Row {
    std::size_t trial;
    std::string algo;
    double dist, fmeasure;
    std::size_t queries;
    double wall_ms;
  };
  std::vector<Row> rows;
  std::size_t no_cluster = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::uint64_t trial_seed = lmc::derive_seed(a.seed, t);
    lmc::QueryLedger ledger;
    lmc::LandmarkRun run = a.mode == "theory"
                               ? lmc::landmark_cluster_theory(ds.points, k, a.alpha, a.epsilon, a.delta,
                                                              trial_seed, ledger)
                               : lmc::landmark_cluster_heuristic(ds.points, lmc::HeuristicOptions{.k = k},
                                                                 trial_seed, ledger);
    Row lr{t, "landmark", 1.0, 0.0, run.report.queries, run.report.wall_ms};
    if (run.found()) {
      lr.dist = lmc::clustering_dist(*run.clustering, ds.labels).cost;
      lr.fmeasure = lmc::f_measure(*run.clustering, ds.labels);
    } else {
      ++no_cluster;
    }
    rows.push_back(lr);

    lmc::QueryLedger base_ledger;
    lmc::BaselineRun base = lmc::baseline_cluster(ds.points, k, run.report.queries, trial_seed, base_ledger);
    rows.push_back({t, "baseline", lmc::clustering_dist(base.clustering, ds.labels).cost,
                    lmc::f_measure(base.clustering, ds.labels), base.report.queries, base.report.wall_ms});
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& x, const Row& y) { return std::tie(x.trial, x.algo) < std::tie(y.trial, y.algo); });

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw lmc::Error("cannot open " + a.out + " for writing");
  }
  std::ostream& csv = a.out.empty() ? std::cout : file;
  std::ostream& summary = a.out.empty() ? std::cerr : std::cout;
  csv << "trial,algo,dist,fmeasure,queries,wall_ms\n";
  char buf[256];
  for (const Row& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g,%zu,%.3f\n", r.trial, r.algo.c_str(), r.dist, r.fmeasure,
                  r.queries, r.wall_ms);
    csv << buf;
  }
  for (const char* algo : {"landmark", "baseline"}) {
    std::vector<double> d, f;
    for (const Row& r : rows) {
      if (r.algo != algo) continue;
      d.push_back(r.dist);
      f.push_back(r.fmeasure);
    }
    summary << "median " << algo << " dist=" << fmt_real(median(d)) << " fmeasure=" << fmt_real(median(f)) << '\n';
  }
  if (no_cluster > 0) {
    summary << "landmark runs without a clustering: " << no_cluster << " (scored as dist=1 fmeasure=0)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landmark clustering with one-versus-all distance queries"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a labeled synthetic instance");
  g->add_option("--preset", gen.preset, "theory | pfam-like | scop-like | blob")->required();
  g->add_option("--seed", gen.seed, "64-bit RNG seed");
  g->add_option("--n", gen.n, "Override the preset's point count");
  g->add_option("--separation", gen.separation, "Override the minimum center distance (core radii)");
  g->add_option("--points", gen.points, "Output points file")->required();
  g->add_option("--labels", gen.labels, "Output labels file")->required();
  g->add_option("--matrix", gen.matrix, "Also write the full distance matrix");
  g->add_option("--mask-p", gen.mask_p, "Probability of masking a matrix entry to inf");

  ClusterArgs cl;
  auto* c = app.add_subcommand("cluster", "Cluster a dataset");
  c->add_option("--algo", cl.algo, "landmark | baseline");
  c->add_option("--mode", cl.mode, "theory | heuristic");
  c->add_option("--k", cl.k, "Number of clusters")->required();
  c->add_option("--alpha", cl.alpha);
  c->add_option("--epsilon", cl.epsilon);
  c->add_option("--delta", cl.delta);
  c->add_option("--landmarks", cl.landmarks, "Landmark / query budget");
  c->add_option("--q", cl.q, "Candidate pool size for landmark selection");
  c->add_option("--smin", cl.smin, "Ball activation size");
  c->add_option("--nprime", cl.nprime, "Points that must be covered to stop");
  c->add_option("--seed", cl.seed, "64-bit RNG seed");
  c->add_option("--input", cl.input, "Input file")->required();
  c->add_option("--input-format", cl.input_format, "points | matrix");
  c->add_option("--out", cl.out, "Output clustering file");
  c->add_option("--report", cl.report, "Output JSON-lines report (default stdout)");
  c->add_option("--trace", cl.trace, "Write the expansion trace as CSV");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Compare a clustering with ground truth");
  e->add_option("--pred", ev.pred)->required();
  e->add_option("--truth", ev.truth)->required();
  e->add_option("--measure", ev.measure, "dist | fmeasure | both");

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "Check good/bad point structure");
  v->add_option("--input", vf.input)->required();
  v->add_option("--input-format", vf.input_format, "points | matrix");
  v->add_option("--labels", vf.labels, "Ground-truth labels");
  v->add_option("--k", vf.k)->required();
  v->add_option("--alpha", vf.alpha);
  v->add_option("--epsilon", vf.epsilon);
  v->add_option("--c", vf.c, "Also check the (c, epsilon) property against --labels (n <= 12)");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Landmark clustering vs. embedding baseline");
  b->add_option("--preset", bn.preset);
  b->add_option("--trials", bn.trials);
  b->add_option("--seed", bn.seed);
  b->add_option("--mode", bn.mode, "heuristic | theory");
  b->add_option("--alpha", bn.alpha);
  b->add_option("--epsilon", bn.epsilon);
  b->add_option("--delta", bn.delta);
  b->add_option("--out", bn.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*c) return cmd_cluster(cl);
    if (*e) return cmd_eval(ev);
    if (*v) return cmd_verify(vf);
    if (*b) return cmd_bench(bn);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
