#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "spinqpt/csvio.hpp"
#include "spinqpt/errors.hpp"
#include "spinqpt/sweep.hpp"

using namespace spinqpt;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  xs.back() = b;
  return xs;
}

SweepOptions fast_opts() {
  SweepOptions o;
  o.threads = 1;
  o.seesaw_restarts = 8;
  return o;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("measure names round-trip") {
  CHECK(measure_from_name(measure_name(Measure::SharedPurity)) == Measure::SharedPurity);
  CHECK(measure_from_name(measure_name(Measure::Concurrence)) == Measure::Concurrence);
  CHECK(measure_from_name("c") == Measure::Concurrence);
  CHECK(measure_from_name("shared-purity") == Measure::SharedPurity);
  CHECK_THROWS_AS(measure_from_name("purity"), ConfigError);
  for (MeasureSet s : {MeasureSet::Concurrence, MeasureSet::SharedPurity, MeasureSet::Both})
    CHECK(measure_set_from_name(measure_set_name(s)) == s);
  CHECK_THROWS_AS(measure_set_from_name("everything"), ConfigError);
}

TEST_CASE("params_for maps the sweep parameter onto the right coupling") {
  CouplingParams base;
  base.j1 = 2.0;
  const auto heis = params_for(Model::J1J2Chain, base, 0.3);
  CHECK(heis.j1 == doctest::Approx(2.0));
  CHECK(heis.j2 == doctest::Approx(0.6));
  const auto tfim = params_for(Model::TfimChain, base, 1.2);
  CHECK(tfim.lambda == doctest::Approx(1.2));
}

TEST_CASE("four-site single-point sweep: analytic levels, clamped mixture depth") {
  const auto lattice = LatticeSpec::chain(Model::J1J2Chain, 4);
  const auto sweep = run_sweep(lattice, {}, 0.0, 0.0, 1, {0, 1}, fast_opts());
  REQUIRE(sweep.points.size() == 1);
  const auto& pt = sweep.points[0];
  CHECK(pt.param == 0.0);
  // Only 4 distinct levels exist in the 16-dimensional spectrum; the mixture
  // retains them all.
  CHECK(pt.n_levels == 4);
  const double energies[] = {-8.0, -4.0, 0.0, 4.0};
  const int degens[] = {1, 3, 7, 5};
  for (int k = 0; k < 4; ++k) {
    CHECK(pt.energy[static_cast<std::size_t>(k)] == doctest::Approx(energies[k]).epsilon(1e-10));
    CHECK(pt.degeneracy[static_cast<std::size_t>(k)] == degens[k]);
  }
  CHECK(pt.energy[4] == 0.0);
  CHECK(pt.degeneracy[4] == 0);
  CHECK(pt.concurrence >= 0.0);
  CHECK(pt.sp >= 0.0);
  CHECK(pt.f_global >= pt.f_local - 1e-12);

  const auto xs = grid(sweep);
  REQUIRE(xs.size() == 1);
  CHECK(xs[0] == 0.0);
}

TEST_CASE("skipped measures are recorded as NaN") {
  const auto lattice = LatticeSpec::chain(Model::J1J2Chain, 4);
  auto opts = fast_opts();

  opts.measures = MeasureSet::Concurrence;
  const auto c_only = run_sweep(lattice, {}, 0.0, 0.2, 3, {0, 1}, opts);
  for (const auto& pt : c_only.points) {
    CHECK(std::isfinite(pt.concurrence));
    CHECK(std::isnan(pt.sp));
    CHECK(std::isnan(pt.f_global));
    CHECK(std::isnan(pt.f_local));
  }
  // Analysis of a never-evaluated column is a configuration error.
  CHECK_THROWS_AS(detect_discontinuities(c_only, Measure::SharedPurity), ConfigError);

  opts.measures = MeasureSet::SharedPurity;
  const auto sp_only = run_sweep(lattice, {}, 0.0, 0.2, 3, {0, 1}, opts);
  for (const auto& pt : sp_only.points) {
    CHECK(std::isfinite(pt.sp));
    CHECK(std::isnan(pt.concurrence));
  }
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto lattice = LatticeSpec::chain(Model::J1J2Chain, 6);
  auto opts = fast_opts();
  opts.threads = 1;
  const auto serial = run_sweep(lattice, {}, 0.0, 0.6, 7, {0, 1}, opts);
  opts.threads = 4;
  const auto parallel = run_sweep(lattice, {}, 0.0, 0.6, 7, {0, 1}, opts);
  CHECK(sweep_to_csv(serial) == sweep_to_csv(parallel));  // bitwise identical
}

TEST_CASE("run_sweep validates its grid") {
  const auto lattice = LatticeSpec::chain(Model::J1J2Chain, 4);
  CHECK_THROWS_AS(run_sweep(lattice, {}, 0.0, 1.0, 0, {0, 1}, fast_opts()), ConfigError);
  CHECK_THROWS_AS(run_sweep(lattice, {}, 1.0, 0.0, 5, {0, 1}, fast_opts()), ConfigError);
  CHECK_THROWS_AS(
      run_sweep(lattice, {}, 0.0, std::numeric_limits<double>::infinity(), 5, {0, 1}, fast_opts()),
      ConfigError);
  CHECK_THROWS_AS(run_sweep(lattice, {}, 0.0, 1.0, 3, {0, 0}, fast_opts()), ConfigError);
}

TEST_CASE("failures carry the offending parameter value") {
  const auto lattice = LatticeSpec::chain(Model::TfimChain, 4);
  // lambda < 0 is rejected by coupling validation inside the sweep.
  CHECK_THROWS_WITH_AS(run_sweep(lattice, {}, -0.5, 0.5, 3, {0, 1}, fast_opts()),
                       doctest::Contains("at parameter value"), ConfigError);
}

TEST_CASE("detect_discontinuities finds isolated steps with the default threshold") {
  const auto xs = linspace(0.0, 1.0, 101);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = 0.2 * xs[i] + (xs[i] > 0.423 ? 1.0 : 0.0);  // smooth ramp + one step

  const auto found = detect_discontinuities(xs, ys);
  REQUIRE(found.size() == 1);
  CHECK(found[0].bracket_lo < 0.423);
  CHECK(found[0].bracket_hi > 0.423);
  CHECK(found[0].jump == doctest::Approx(1.0).epsilon(0.02));
  CHECK_FALSE(found[0].refined);
  CHECK(found[0].location == doctest::Approx((found[0].bracket_lo + found[0].bracket_hi) / 2));

  // Two separated steps of opposite sign.
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = (xs[i] > 0.3 ? 1.0 : 0.0) - (xs[i] > 0.7 ? 0.8 : 0.0);
  const auto two = detect_discontinuities(xs, ys);
  REQUIRE(two.size() == 2);
  CHECK(two[0].jump == doctest::Approx(1.0).epsilon(0.02));
  CHECK(two[1].jump == doctest::Approx(-0.8).epsilon(0.02));

  // A jump smeared over two adjacent intervals merges into one detection.
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = xs[i] < 0.50 ? 0.0 : (xs[i] < 0.51 ? 0.5 : 1.0);
  const auto merged = detect_discontinuities(xs, ys);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].jump == doctest::Approx(1.0).epsilon(0.02));
  CHECK(merged[0].bracket_width == doctest::Approx(0.02).epsilon(0.01));

  // A pure linear ramp has uniform differences: nothing to flag.
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = 3.0 * xs[i];
  CHECK(detect_discontinuities(xs, ys).empty());

  // Explicit threshold overrides the data-driven default.
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = (xs[i] > 0.5 ? 0.1 : 0.0);
  CHECK(detect_discontinuities(xs, ys, 0.5).empty());
  CHECK(detect_discontinuities(xs, ys, 0.05).size() == 1);
}

TEST_CASE("detect_discontinuities input validation") {
  CHECK_THROWS_AS(detect_discontinuities({0.0, 1.0}, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(detect_discontinuities({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(detect_discontinuities({0.0, 1.0, 2.0}, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(
      detect_discontinuities({0.0, 1.0, 2.0}, {0.0, std::numeric_limits<double>::quiet_NaN(), 2.0}),
      ConfigError);
}

TEST_CASE("refine_discontinuity bisects an analytic step to tolerance") {
  const double loc = 0.4234567;
  int evals = 0;
  auto f = [&](double x) {
    ++evals;
    return x < loc ? 0.25 : 1.25;
  };
  const auto d = refine_discontinuity(f, 0.40, 0.45, 1e-6);
  CHECK(d.refined);
  CHECK(std::abs(d.location - loc) < 1e-6);
  CHECK(d.bracket_width <= 1e-6);
  CHECK(d.jump == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.bracket_lo <= loc);
  CHECK(d.bracket_hi >= loc);
  CHECK(evals < 40);
}

TEST_CASE("refine_discontinuity rejects features that are not jumps") {
  // A steep but smooth slope: the cross-bracket jump decays as the bracket
  // narrows, which is exactly the vanish guard's signature.
  auto smooth = [](double x) { return std::tanh((x - 0.42) / 1e-4); };
  CHECK_THROWS_WITH_AS(refine_discontinuity(smooth, 0.40, 0.45, 1e-6),
                       doctest::Contains("finer"), NumericalError);

  auto flat = [](double) { return 1.0; };
  CHECK_THROWS_AS(refine_discontinuity(flat, 0.40, 0.45, 1e-6), NumericalError);

  auto step = [](double x) { return x < 0.42 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(refine_discontinuity(step, 0.45, 0.40, 1e-6), ConfigError);
  CHECK_THROWS_AS(refine_discontinuity(step, 0.40, 0.45, 0.0), ConfigError);
}

TEST_CASE("derivative_extremum recovers analytic extrema") {
  const auto xs = linspace(0.0, 1.0, 501);
  // y'(x) = (x - 0.6)^2 + 0.1  ->  y = (x-0.6)^3/3 + 0.1 x; minimum at 0.6.
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = std::pow(xs[i] - 0.6, 3) / 3.0 + 0.1 * xs[i];
  const auto mn = derivative_extremum(xs, ys, {0.4, 0.8}, ExtremumKind::Min);
  CHECK(std::abs(mn.location - 0.6) < 2e-3);
  CHECK(mn.kind == ExtremumKind::Min);
  CHECK(mn.n_samples >= 8);
  CHECK(mn.n_rejected == 0);
  // The fitted cubic evaluated at the center reproduces y' = 0.1.
  const double g = mn.fit_coeffs[0] + mn.fit_coeffs[1] * 0.6 + mn.fit_coeffs[2] * 0.36 +
                   mn.fit_coeffs[3] * 0.216;
  CHECK(g == doctest::Approx(0.1).epsilon(1e-3));

  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = -(std::pow(xs[i] - 0.6, 3) / 3.0);
  const auto mx = derivative_extremum(xs, ys, {0.4, 0.8}, ExtremumKind::Max);
  CHECK(std::abs(mx.location - 0.6) < 2e-3);

  // A linear derivative has no interior extremum.
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i] * xs[i];
  CHECK_THROWS_AS(derivative_extremum(xs, ys, {0.4, 0.8}, ExtremumKind::Min), NumericalError);
}

TEST_CASE("derivative_extremum window validation") {
  const auto xs = linspace(0.0, 1.0, 41);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i] * xs[i];
  CHECK_THROWS_AS(derivative_extremum(xs, ys, {0.8, 0.4}, ExtremumKind::Min), ConfigError);
  // Only a handful of samples inside a sliver window.
  CHECK_THROWS_WITH_AS(derivative_extremum(xs, ys, {0.40, 0.52}, ExtremumKind::Min),
                       doctest::Contains("8"), ConfigError);
}

TEST_CASE("robust fitting rejects level-crossing spikes") {
  const auto xs = linspace(0.0, 1.0, 201);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    ys[i] = std::pow(xs[i] - 0.6, 3) / 3.0 + 0.1 * xs[i];
  // Corrupt two interior samples: a small level-crossing artifact inside the
  // fit window. Each corrupted y pollutes two central-difference samples.
  ys[100] += 0.004;  // x = 0.50
  ys[130] -= 0.004;  // x = 0.65

  DerivativeFitOptions robust;
  const auto r = derivative_extremum(xs, ys, {0.4, 0.8}, ExtremumKind::Min, robust);
  CHECK(std::abs(r.location - 0.6) < 2e-3);
  CHECK(r.n_rejected >= 2);

  DerivativeFitOptions naive;
  naive.robust = false;
  const auto n = derivative_extremum(xs, ys, {0.4, 0.8}, ExtremumKind::Min, naive);
  CHECK(n.n_rejected == 0);
  // The spikes displace the unguarded fit noticeably more.
  CHECK(std::abs(n.location - 0.6) > std::abs(r.location - 0.6));
}

TEST_CASE("fit_scaling recovers exact power laws") {
  const double ac = 0.2412, amp = 0.9, beta = -2.0;
  std::vector<std::pair<double, double>> above, below, mixed;
  for (double n : {8.0, 10.0, 12.0, 14.0, 16.0}) {
    above.emplace_back(n, ac + amp * std::pow(n, beta));
    below.emplace_back(n, ac - amp * std::pow(n, beta));
  }
  const auto fa = fit_scaling(above, ac);
  CHECK(fa.beta == doctest::Approx(beta).epsilon(1e-10));
  CHECK(fa.intercept == doctest::Approx(std::log(amp)).epsilon(1e-9));
  CHECK(fa.sign == 1);
  CHECK(fa.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fa.asymptotic_critical_point == doctest::Approx(ac));
  CHECK(fa.points.size() == 5);

  const auto fb = fit_scaling(below, ac);
  CHECK(fb.beta == doctest::Approx(beta).epsilon(1e-10));
  CHECK(fb.sign == -1);

  mixed = above;
  mixed[0].second = ac - amp * std::pow(8.0, beta);
  CHECK(fit_scaling(mixed, ac).sign == 0);
}

TEST_CASE("fit_scaling input validation") {
  std::vector<std::pair<double, double>> two = {{8.0, 0.3}, {10.0, 0.29}};
  CHECK_THROWS_AS(fit_scaling(two, 0.24), ConfigError);
  std::vector<std::pair<double, double>> sing = {{8.0, 0.3}, {10.0, 0.24}, {12.0, 0.28}};
  CHECK_THROWS_AS(fit_scaling(sing, 0.24), NumericalError);
  std::vector<std::pair<double, double>> badn = {{-8.0, 0.3}, {10.0, 0.29}, {12.0, 0.28}};
  CHECK_THROWS_AS(fit_scaling(badn, 0.24), ConfigError);
  std::vector<std::pair<double, double>> same = {{8.0, 0.3}, {8.0, 0.29}, {8.0, 0.28}};
  CHECK_THROWS_AS(fit_scaling(same, 0.24), ConfigError);
}

TEST_CASE("PointEvaluator caches and reuses sweep points") {
  const auto lattice = LatticeSpec::chain(Model::J1J2Chain, 4);
  const auto opts = fast_opts();
  const auto sweep = run_sweep(lattice, {}, 0.0, 0.4, 5, {0, 1}, opts);

  PointEvaluator eval(lattice, {}, {0, 1}, opts);
  CHECK(eval.cache_size() == 0);
  eval.seed_cache(sweep);
  CHECK(eval.cache_size() == 5);

  // Grid points come straight from the cache, bit for bit.
  const auto& cached = eval.evaluate(sweep.points[2].param);
  CHECK(eval.cache_size() == 5);
  CHECK(cached.concurrence == sweep.points[2].concurrence);
  CHECK(cached.sp == sweep.points[2].sp);

  // A fresh parameter value is computed once, then cached.
  const double fresh = 0.123456;
  const double c1 = eval.evaluate_measure(fresh, Measure::Concurrence);
  CHECK(eval.cache_size() == 6);
  const double c2 = eval.evaluate_measure(fresh, Measure::Concurrence);
  CHECK(eval.cache_size() == 6);
  CHECK(c1 == c2);

  auto fn = eval.measure_fn(Measure::SharedPurity);
  CHECK(fn(fresh) == eval.evaluate_measure(fresh, Measure::SharedPurity));
  CHECK(eval.cache_size() == 6);
}

TEST_CASE("analyze_2d rejects sweeps that do not cover the transition region") {
  SweepResult sweep;
  sweep.lattice = LatticeSpec::square(4, 4);
  sweep.pair = {0, 1};
  for (double x : {0.30, 0.40, 0.50}) {
    SweepPoint pt;
    pt.param = x;
    pt.sp = 0.1;
    pt.concurrence = 0.1;
    sweep.points.push_back(pt);
  }
  CHECK_THROWS_WITH_AS(analyze_2d(sweep, {}), doctest::Contains("[0.3, 0.7]"), ConfigError);
  sweep.points.resize(2);
  CHECK_THROWS_AS(analyze_2d(sweep, {}), ConfigError);
}

}  // TEST_SUITE("sweep")
