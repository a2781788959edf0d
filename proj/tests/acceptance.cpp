// Acceptance checks: one PASS/FAIL line per criterion. Tolerances and sample
// sizes are fixed here; the exit status is nonzero if any selected check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gffperc/clusters.hpp"
#include "gffperc/experiments.hpp"
#include "gffperc/gff.hpp"
#include "gffperc/metric_edges.hpp"
#include "gffperc/pivotal.hpp"
#include "gffperc/potential.hpp"
#include "oracles.hpp"

using namespace gffperc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const PointResult& point(const RunResult& r, const std::string& name, int N, double chi = NAN) {
  for (const auto& p : r.points)
    if (p.observable == name && p.N == N && (std::isnan(chi) || p.chi == chi)) return p;
  throw std::runtime_error("missing point " + name + " at N = " + std::to_string(N));
}

// Fit of `name` restricted to the radii in `Ns`.
ExponentFit fit_over(const RunResult& r, const std::string& name, const std::set<int>& Ns) {
  std::vector<FitPoint> pts;
  for (const auto& p : curve_points(r, name))
    if (Ns.count(static_cast<int>(p.scale))) pts.push_back(p);
  ExponentFit f = fit_exponent(pts);
  std::vector<std::vector<FitPoint>> leave;
  for (int b = 0; b < r.spec.blocks; ++b) {
    std::vector<FitPoint> q;
    for (const auto& p : curve_points(r, name, b))
      if (Ns.count(static_cast<int>(p.scale))) q.push_back(p);
    leave.push_back(std::move(q));
  }
  if (r.spec.blocks >= 2) apply_jackknife(f, leave);
  return f;
}

std::string curve_text(const RunResult& r, const std::string& name) {
  std::string s;
  for (const auto& p : curve_points(r, name))
    s += fmt(" %g:%.4g(%.2g)", p.scale, p.estimate, p.stderr_);
  return s;
}

Outcome c1_two_point() {
  ExperimentSpec s;
  s.observable = Observable::TwoPoint;
  s.N = {8};
  s.pad = 1.0;
  s.x = {0, 0, 0};
  s.y = {2, 0, 0};
  s.replicas = 200000;
  s.seed = 101;
  const RunResult r = run_experiment(s);
  const auto& p = point(r, "two_point", 8);
  const auto& q = point(r, "two_point_negative", 8);
  const double tol = std::max(0.01, 4.0 * p.stderr_);
  const double diff = std::abs(p.estimate - *r.reference);
  return {diff <= tol, fmt("P(x<->y) = %.5f +- %.5f, arcsin prediction %.5f, |diff| %.5f <= %.5f; "
                           "nonpositive set %.5f",
                           p.estimate, p.stderr_, *r.reference, diff, tol, q.estimate)};
}

Outcome c2_hitting() {
  const auto box = make_box(3, 6, 1.0);
  std::mt19937 gen(202);
  Rng rng(StreamKey::root(203));
  const VertexSet inner = box.box(5);
  const std::int64_t walks = 100000;
  bool ok = true;
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const VertexId v = inner[gen() % inner.size()];
    VertexId w;
    do w = inner[gen() % inner.size()];
    while (w == v);
    std::vector<VertexId> d;
    std::bernoulli_distribution take(0.08);
    for (VertexId u : inner)
      if (u != v && u != w && take(gen)) d.push_back(u);
    const VertexSet D = make_vertex_set(d);
    const GreenOperator g = killed_green(box, D);
    const double p = hitting_probability(g, v, w);
    const double mc =
        static_cast<double>(oracle::walk_hits(box, to_mask(box, D), v, w, walks, rng)) / walks;
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / walks);
    const double z = std::abs(mc - p) / se;
    worst = std::max(worst, z);
    ok = ok && z <= 3.0;
  }
  return {ok, fmt("10 triples, %lld walks each, largest |z| = %.2f (bound 3)",
                  static_cast<long long>(walks), worst)};
}

Outcome c3_bridge() {
  const int k = 4096;
  const std::int64_t trials = 1000000;
  struct P {
    double a, b, L;
  };
  bool ok = true;
  std::string detail;
  int idx = 0;
  for (P p : {P{1, 1, 3}, P{0.5, 2, 3}, P{2, 2, 4}}) {
    Rng rng(StreamKey::root(300 + idx++));
    std::int64_t avoid = 0;
    for (std::int64_t t = 0; t < trials; ++t) avoid += oracle::fine_bridge_avoids(p.a, p.b, p.L, k, rng);
    const double mc = static_cast<double>(avoid) / trials;
    const double exact = edge_open_probability(p.a, p.b, p.L);
    const double se = std::sqrt(mc * (1 - mc) / trials);
    const double z = std::abs(mc - exact) / se;
    ok = ok && z <= 3.0;
    detail += fmt("(%g,%g,%g): formula %.5f, fine bridge %.5f, |z| %.2f; ", p.a, p.b, p.L, exact,
                  mc, z);
  }
  return {ok, detail + "bound 3 stderr"};
}

Outcome c4_pivotal() {
  bool ok = true;
  std::string detail;
  for (double pad : {1.0, 2.0}) {
    const auto box = make_box(3, 4, pad);
    SpectralSampler sampler(box);
    // With pad 1 the sphere of radius N is the zero shell, so both sets are
    // always empty; the padded domain exercises nonempty sets.
    const int count = pad == 1.0 ? 200 : 1000;
    int agree = 0, nonempty = 0;
    for (int t = 0; t < count; ++t) {
      const FieldConfig f = sampler.sample(404, t);
      const OpenEdgeSet edges = open_edges(f);
      const ClusterLabeling lab(edges, f);
      const auto fast = pivotal_edges(lab, edges, 4);
      agree += fast == pivotal_bruteforce(edges, f, 4);
      nonempty += !fast.empty();
    }
    ok = ok && agree == count;
    detail += fmt("pad %g: %d/%d equal, %d with a nonempty pivotal set; ", pad, agree, count,
                  nonempty);
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

RunResult pivotal_sweep() {
  ExperimentSpec s;
  s.observable = Observable::Pivotal;
  s.N = {4, 8, 16, 32};
  s.pad = 2.0;
  s.delta = 0.5;
  s.replicas = 10000;
  s.seed = 505;
  s.blocks = 10;
  return run_experiment(s);
}

Outcome c5_one_arm(const RunResult& r) {
  const ExponentFit f = fit_over(r, "one_arm", {4, 8, 16, 32});
  const bool ok = f.slope >= -0.70 && f.slope <= -0.30;
  return {ok, fmt("slope %.3f (jackknife se %.3f), window [-0.70, -0.30];", f.slope, f.slope_se) +
                  curve_text(r, "one_arm")};
}

Outcome c6_pivotal_median(const RunResult& r) {
  const ExponentFit f = fit_over(r, "pivotal_median", {8, 16, 32});
  const bool ok = f.slope >= 0.25 && f.slope <= 0.75;
  return {ok, fmt("slope %.3f (jackknife se %.3f), window [0.25, 0.75];", f.slope, f.slope_se) +
                  curve_text(r, "pivotal_median")};
}

Outcome c8_heterochromatic(const RunResult& r) {
  const ExponentFit f = fit_over(r, "heterochromatic", {8, 16, 32});
  const bool ok = f.slope >= 0.2 && f.slope <= 0.8;
  return {ok, fmt("slope %.3f (jackknife se %.3f), window [0.2, 0.8], delta %.2f;", f.slope,
                  f.slope_se, r.spec.delta) +
                  curve_text(r, "heterochromatic")};
}

Outcome c7_mindist() {
  ExperimentSpec s;
  s.observable = Observable::MindistCdf;
  s.N = {16};
  s.pad = 2.0;
  s.k = 128;
  s.seed = 707;
  // Largest delta for which two macroscopic clusters are seen often enough.
  double chosen = 0;
  double freq = 0;
  std::string pilot;
  for (double delta : {1.0, 0.75, 0.5, 0.375, 0.25}) {
    ExperimentSpec p = s;
    p.delta = delta;
    p.replicas = 400;
    p.seed = 708;
    p.chi = {3.0};
    const RunResult r = run_experiment(p);
    freq = point(r, "mindist_two_clusters", 16).estimate;
    pilot += fmt(" %.3g:%.3f", delta, freq);
    if (freq >= 0.05) {
      chosen = delta;
      break;
    }
  }
  if (chosen == 0) return {false, "no delta reaches frequency 0.05; pilot" + pilot};
  s.delta = chosen;
  s.replicas = 6000;
  const RunResult r = run_experiment(s);
  const double two = point(r, "mindist_two_clusters", 16).estimate;
  const ExponentFit fit = fit_exponent(curve_points(r, "mindist_cdf"));
  const bool ok = two >= 0.05 && fit.slope >= 0.25 && fit.slope <= 0.80;
  return {ok, fmt("delta %.3g (pilot%s), k %d, P(two clusters) %.4f, slope %.3f (se %.3f), "
                  "window [0.25, 0.80];",
                  chosen, pilot.c_str(), s.k, two, fit.slope, fit.slope_se) +
                  curve_text(r, "mindist_cdf")};
}

Outcome c9_capacity() {
  std::vector<double> ratio;
  std::string detail;
  for (int N : {2, 4, 8}) {
    const auto box = make_box(3, N, 4.0);
    const double c = capacity(box, box.box(N), {}).capacity;
    ratio.push_back(c / N);
    detail += fmt("N=%d cap/N %.4f; ", N, c / N);
  }
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  const double spread = *hi / *lo;
  return {spread <= 2.0, detail + fmt("max/min %.3f (bound 2)", spread)};
}

Outcome c10_symmetry() {
  // Exact exchange under a sign flip, with the same edge randomness.
  int mismatches = 0;
  {
    const auto box = make_box(3, 8, 2.0);
    SpectralSampler sampler(box);
    for (int t = 0; t < 200; ++t) {
      const FieldConfig f = sampler.sample(1001, t);
      const FieldConfig g = f.negated();
      const OpenEdgeSet ef = open_edges(f, EdgeOptions{0.0, 8});
      const OpenEdgeSet eg = open_edges(g, EdgeOptions{0.0, 8});
      const ClusterLabeling a(ef, f), b(eg, g);
      for (int n : {2, 4, 8}) {
        mismatches += one_arm_indicator(a, n) != one_arm_indicator_negative(b, n);
        mismatches += one_arm_indicator_negative(a, n) != one_arm_indicator(b, n);
      }
      const auto ha = heterochromatic_census(a, 8, 0.5);
      const auto hb = heterochromatic_census(b, 8, 0.5);
      mismatches += ha.same_sign != hb.same_sign || ha.opposite_sign != hb.opposite_sign;
      mismatches += ha.edges != hb.edges;
    }
  }

  // Independent runs: theta+ from one seed against theta- from another.
  ExperimentSpec s;
  s.observable = Observable::OneArm;
  s.N = {4, 8};
  s.pad = 2.0;
  s.replicas = 20000;
  s.seed = 1101;
  const RunResult plus = run_experiment(s);
  s.seed = 1202;
  const RunResult minus = run_experiment(s);
  bool agree = true;
  std::string theta;
  for (int N : s.N) {
    const auto& p = point(plus, "one_arm", N);
    const auto& m = point(minus, "one_arm_negative", N);
    const double z = std::abs(p.estimate - m.estimate) / std::hypot(p.stderr_, m.stderr_);
    agree = agree && z <= 3.0;
    theta += fmt(" N=%d: %.4f vs %.4f (|z| %.2f);", N, p.estimate, m.estimate, z);
  }

  // Union-find partitions against breadth-first search.
  int uf_fail = 0;
  for (int t = 0; t < 500; ++t) {
    const auto box = make_box(3, 2 + t % 3, 1.0 + 0.5 * (t % 2));
    const FieldConfig f = SpectralSampler(box).sample(1303, t);
    const OpenEdgeSet edges = open_edges(f, EdgeOptions{t % 7 == 0 ? 0.25 : 0.0, -1});
    const ClusterLabeling lab(edges, f);
    for (Sign sg : {Sign::Positive, Sign::Negative}) {
      const auto labels = oracle::bfs_components(edges, f, sg);
      std::map<VertexId, VertexId> fw, bw;
      bool ok = true;
      for (VertexId v = 0; v < box.vertex_count() && ok; ++v) {
        const VertexId r = lab.root(v, sg);
        if ((r >= 0) != (labels[v] >= 0)) ok = false;
        if (r < 0) continue;
        ok = ok && fw.try_emplace(r, labels[v]).first->second == labels[v];
        ok = ok && bw.try_emplace(labels[v], r).first->second == r;
      }
      uf_fail += !ok;
    }
  }
  const bool ok = mismatches == 0 && agree && uf_fail == 0;
  return {ok, fmt("sign-flip mismatches %d; theta+ vs theta-:", mismatches) + theta +
                  fmt(" union-find vs BFS failures %d of 1000 partitions", uf_fail)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> criteria;
  std::vector<int> known;
  app.add_option("--criteria", criteria, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--known-failures", known,
                 "criteria documented as failing; they still print FAIL, and the exit status "
                 "flags them only if they pass")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::set<int> want(criteria.begin(), criteria.end());
  const std::set<int> expected_fail(known.begin(), known.end());

  bool all = true;
  auto report = [&](int id, const Outcome& o, double seconds) {
    const bool known_failure = expected_fail.count(id) > 0;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << fmt("  [%.0f s]", seconds);
    if (known_failure) std::cout << (o.pass ? "  (listed as a known failure but passed)" : "  (known failure)");
    std::cout << std::endl;
    all = all && o.pass != known_failure;
  };
  auto timed = [&](int id, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    report(id, o,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };

  if (want.count(1)) timed(1, c1_two_point);
  if (want.count(2)) timed(2, c2_hitting);
  if (want.count(3)) timed(3, c3_bridge);
  if (want.count(4)) timed(4, c4_pivotal);
  if (want.count(5) || want.count(6) || want.count(8)) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult sweep;
    std::string error;
    try {
      sweep = pivotal_sweep();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (int id : {5, 6, 8}) {
      if (!want.count(id)) continue;
      if (!error.empty()) {
        report(id, {false, "error: " + error}, sec);
        continue;
      }
      Outcome o;
      try {
        o = id == 5 ? c5_one_arm(sweep) : id == 6 ? c6_pivotal_median(sweep) : c8_heterochromatic(sweep);
      } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
      }
      report(id, o, sec);
    }
  }
  if (want.count(7)) timed(7, c7_mindist);
  if (want.count(9)) timed(9, c9_capacity);
  if (want.count(10)) timed(10, c10_symmetry);
  return all ? 0 : 1;
}
