#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gffperc/experiments.hpp"

using namespace gffperc;

namespace {

ExperimentSpec small_spec(Observable o) {
  ExperimentSpec s;
  s.observable = o;
  s.N = {2, 3, 4};
  s.pad = 1.5;
  s.replicas = 200;
  s.seed = 17;
  s.threads = 1;
  s.blocks = 4;
  return s;
}

const PointResult& find_point(const RunResult& r, const std::string& name, int N) {
  for (const auto& p : r.points)
    if (p.observable == name && p.N == N) return p;
  throw std::runtime_error("missing point " + name);
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("spec parsing") {
    std::istringstream in(
        "# comment\nobservable = one-arm\nd = 4\nN = 4, 8 # trailing\n"
        "delta=0.25\nchi = 0.5,1\nseed = 99\nx = 0,0,0,0\n");
    const ExperimentSpec s = parse_spec(in);
    CHECK(s.observable == Observable::OneArm);
    CHECK(s.d == 4);
    CHECK(s.N == std::vector<int>{4, 8});
    CHECK(s.delta == 0.25);
    CHECK(s.chi == std::vector<double>{0.5, 1.0});
    CHECK(s.seed == 99);
    std::istringstream again(format_spec(s));
    CHECK(parse_spec(again) == s);

    ExperimentSpec t;
    CHECK_THROWS_AS(apply_setting(t, "bogus", "1"), SpecError);
    CHECK_THROWS_AS(apply_setting(t, "d", "three"), SpecError);
    CHECK(t.chi_grid().size() == 5);
    CHECK(t.chi_grid().front() == doctest::Approx(1.5));
    CHECK(parse_observable("mindist-cdf") == Observable::MindistCdf);
    CHECK(observable_name(Observable::Heterochromatic) == "heterochromatic");
  }

  TEST_CASE("validation") {
    ExperimentSpec s;
    s.d = 2;
    CHECK_THROWS_AS(validate(s), SpecError);
    s = {};
    s.delta = 0;
    CHECK_THROWS_AS(validate(s), SpecError);
    s = {};
    s.observable = Observable::Crossing;
    s.n = 8;
    CHECK_THROWS_AS(validate(s), SpecError);
    s = {};
    s.observable = Observable::TwoPoint;
    s.x = {1, 0, 0};
    s.y = {1, 0, 0};
    CHECK_THROWS_AS(validate(s), SpecError);
    s = {};
    s.domain_radius = 4;
    CHECK_THROWS_AS(validate(s), SpecError);
    CHECK_NOTHROW(validate(ExperimentSpec{}));
  }

  TEST_CASE("zero replicas") {
    ExperimentSpec s = small_spec(Observable::OneArm);
    s.replicas = 0;
    const RunResult r = run_experiment(s);
    CHECK_FALSE(r.partial);
    for (const auto& p : r.points) CHECK(p.replicas == 0);
    CHECK(r.fits.empty());
    std::ostringstream os;
    write_csv(os, r);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == kCsvHeader);
  }

  TEST_CASE("deterministic and poolable") {
    for (Observable o : {Observable::OneArm, Observable::Pivotal, Observable::MindistCdf}) {
      ExperimentSpec s = small_spec(o);
      s.k = 8;
      s.replicas = 60;
      const RunResult whole = run_experiment(s);
      const RunResult again = run_experiment(s);
      ExperimentSpec a = s, b = s;
      a.replicas = 25;
      b.first_replica = 25;
      b.replicas = 35;
      const RunResult pooled = pool_results({run_experiment(a), run_experiment(b)});
      REQUIRE(whole.points.size() == pooled.points.size());
      for (std::size_t i = 0; i < whole.points.size(); ++i) {
        CHECK(whole.points[i].total == again.points[i].total);
        CHECK(whole.points[i].total == pooled.points[i].total);
        CHECK(whole.points[i].estimate == pooled.points[i].estimate);
        CHECK(whole.points[i].replicas == pooled.points[i].replicas);
      }
      CHECK(whole.records == pooled.records);
    }
  }

  TEST_CASE("two-point estimate near the arcsin prediction") {
    ExperimentSpec s = small_spec(Observable::TwoPoint);
    s.N = {4};
    s.pad = 1.0;
    s.replicas = 3000;
    const RunResult r = run_experiment(s);
    REQUIRE(r.reference.has_value());
    const auto& pos = find_point(r, "two_point", 4);
    const auto& neg = find_point(r, "two_point_negative", 4);
    CHECK(std::abs(pos.estimate - *r.reference) < 4 * pos.stderr_);
    CHECK(std::abs(neg.estimate - *r.reference) < 4 * neg.stderr_);
  }

  TEST_CASE("standard error shrinks with the replica count") {
    ExperimentSpec s = small_spec(Observable::OneArm);
    s.N = {2};
    s.replicas = 500;
    const double se1 = find_point(run_experiment(s), "one_arm", 2).stderr_;
    s.replicas = 2000;
    const double se4 = find_point(run_experiment(s), "one_arm", 2).stderr_;
    CHECK(se4 / se1 == doctest::Approx(0.5).epsilon(0.2));
  }

  TEST_CASE("exponent fits") {
    std::vector<FitPoint> exact;
    for (double n : {2.0, 4.0, 8.0, 16.0}) exact.push_back({n, 3.0 * std::pow(n, -0.5), 0.0});
    const ExponentFit f = fit_exponent(exact);
    CHECK(f.slope == doctest::Approx(-0.5));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-9));

    std::vector<FitPoint> flat{{2, 1, 0.1}, {4, 1, 0.1}, {8, 1, 0.1}};
    CHECK(fit_exponent(flat).slope == doctest::Approx(0.0));
    std::vector<FitPoint> two{{2, 1, 0.1}, {4, 1, 0.1}};
    CHECK_THROWS_AS(fit_exponent(two), std::invalid_argument);
    std::vector<FitPoint> with_zero{{2, 1, 0.1}, {4, 0, 0.1}, {8, 0.5, 0.1}, {16, 0.25, 0.1}};
    CHECK(fit_exponent(with_zero).warnings.size() == 1);

    std::mt19937 gen(3);
    std::normal_distribution<double> noise;
    int covered = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
      std::vector<FitPoint> pts;
      for (double n : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        const double mean = std::pow(n, -2.0);
        const double se = 0.05 * mean;
        pts.push_back({n, mean + se * noise(gen), se});
      }
      const ExponentFit g = fit_exponent(pts);
      covered += g.ci_low <= -2.0 && -2.0 <= g.ci_high;
    }
    CHECK(covered >= 0.9 * trials);
  }

  TEST_CASE("quantiles") {
    Tally t;
    for (int v : {1, 2, 2, 3, 7}) {
      ++t.accepted;
      ++t.histogram[v];
      t.sum += v;
      t.sum_sq += v * v;
    }
    CHECK(quantile(t.histogram, 0.5) == 2);
    CHECK(quantile(t.histogram, 0.0) == 1);
    CHECK(quantile(t.histogram, 1.0) == 7);
    CHECK(median_value(t).value == 2);
    CHECK(mean_value(t).value == doctest::Approx(3.0));
  }

  TEST_CASE("csv and json round trips") {
    ExperimentSpec s = small_spec(Observable::Pivotal);
    s.replicas = 40;
    const RunResult r = run_experiment(s);
    std::ostringstream os;
    write_csv(os, r);
    std::istringstream is(os.str());
    const auto rows = read_csv(is);
    REQUIRE(rows.size() == r.points.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].observable == r.points[i].observable);
      CHECK(rows[i].N == r.points[i].N);
      CHECK(rows[i].estimate == r.points[i].estimate);
      CHECK(rows[i].stderr_ == r.points[i].stderr_);
      CHECK(rows[i].replicas == r.points[i].replicas);
    }
    const RunResult back = parse_summary_json(summary_json(r));
    CHECK(back.spec == r.spec);
    CHECK(back.records == r.records);
    REQUIRE(back.points.size() == r.points.size());
    for (std::size_t i = 0; i < back.points.size(); ++i) {
      CHECK(back.points[i].total == r.points[i].total);
      CHECK(back.points[i].blocks == r.points[i].blocks);
    }
    CHECK(back.fits.size() == r.fits.size());
  }
}
