#include "spinqpt/sweep.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "spinqpt/errors.hpp"
#include "spinqpt/mixture.hpp"

namespace spinqpt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void rethrow_with_param(const std::exception_ptr& ep, double param) {
  const std::string suffix = " (at parameter value " + format_value(param) + ")";
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + suffix);
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + suffix);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + suffix);
  } catch (const std::exception& e) {
    throw NumericalError(std::string(e.what()) + suffix);
  }
}

void check_series(const std::vector<double>& xs, const std::vector<double>& ys,
                  const char* fn) {
  if (xs.size() != ys.size())
    throw ConfigError(std::string(fn) + ": grid and measure series differ in length");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw ConfigError(std::string(fn) + ": grid must be strictly ascending");
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (!std::isfinite(ys[i]))
      throw ConfigError(std::string(fn) + ": non-finite measure value at parameter " +
                        format_value(xs[i]) + " (was this measure evaluated in the sweep?)");
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (n % 2 == 0) {
    auto lo = std::max_element(v.begin(), mid);
    m = 0.5 * (m + *lo);
  }
  return m;
}

double poly3(const Eigen::Vector4d& c, double t) {
  return ((c(3) * t + c(2)) * t + c(1)) * t + c(0);
}

// Real roots of g'(t) = c1 + 2 c2 t + 3 c3 t^2 (critical points of the cubic).
std::vector<double> cubic_critical_points(double c1, double c2, double c3) {
  std::vector<double> ts;
  const double a = 3.0 * c3, b = 2.0 * c2, c = c1;
  if (a == 0.0) {
    if (b != 0.0) ts.push_back(-c / b);
    return ts;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return ts;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  if (q != 0.0) {
    ts.push_back(q / a);
    ts.push_back(c / q);
    if (ts[0] == ts[1]) ts.pop_back();
  } else {
    ts.push_back(0.0);  // b = 0 and disc = 0 imply c = 0: double root at the origin
  }
  return ts;
}

}  // namespace

std::string measure_name(Measure m) {
  return m == Measure::SharedPurity ? "sp" : "concurrence";
}

Measure measure_from_name(const std::string& name) {
  if (name == "sp" || name == "shared-purity") return Measure::SharedPurity;
  if (name == "concurrence" || name == "c") return Measure::Concurrence;
  throw ConfigError("unknown measure '" + name + "' (expected 'sp' or 'concurrence')");
}

std::string measure_set_name(MeasureSet m) {
  switch (m) {
    case MeasureSet::Concurrence: return "concurrence";
    case MeasureSet::SharedPurity: return "sp";
    default: return "both";
  }
}

MeasureSet measure_set_from_name(const std::string& name) {
  if (name == "both") return MeasureSet::Both;
  if (name == "sp" || name == "shared-purity") return MeasureSet::SharedPurity;
  if (name == "concurrence" || name == "c") return MeasureSet::Concurrence;
  throw ConfigError("unknown measure set '" + name +
                    "' (expected 'sp', 'concurrence', or 'both')");
}

CouplingParams params_for(Model model, const CouplingParams& base, double param) {
  CouplingParams p = base;
  if (model == Model::TfimChain) {
    p.lambda = param;
  } else {
    p.j2 = param * base.j1;
  }
  return p;
}

SweepPoint evaluate_point(const LatticeSpec& lattice, const CouplingParams& base,
                          double param, std::pair<int, int> pair,
                          const SweepOptions& opts, std::uint64_t solver_seed,
                          std::uint64_t seesaw_seed) {
  lattice.validate();
  if (opts.k_max < 0) throw ConfigError("evaluate_point: k_max must be >= 0");
  const CouplingParams p = params_for(lattice.model, base, param);
  p.validate(lattice.model);

  const SparseHamiltonian h = build_hamiltonian(lattice, p);
  const SpectralSymmetry sym = spectral_symmetry(lattice);
  SolverOptions sopts = opts.solver;
  sopts.seed = solver_seed;
  const LowSpectrum spectrum = solve_spectrum(h, opts.k_max + 1, sopts, 24, &sym);

  // solve_spectrum returns fewer levels than requested only when the full
  // spectrum holds fewer distinct levels (tiny dimensions); mix what exists.
  const int k_eff = std::min<int>(opts.k_max, static_cast<int>(spectrum.levels.size()) - 1);
  const LowLyingMixture mix = build_mixture(spectrum, k_eff);
  const TwoQubitState tq = reduce_to_pair(mix, pair, lattice.sites);

  SweepPoint pt;
  pt.param = param;
  const double qnan = std::numeric_limits<double>::quiet_NaN();
  if (opts.measures != MeasureSet::SharedPurity) {
    pt.concurrence = concurrence(tq).value;
  } else {
    pt.concurrence = qnan;
  }
  if (opts.measures != MeasureSet::Concurrence) {
    const SharedPurityResult spr =
        shared_purity(tq, opts.seesaw_restarts, opts.seesaw_tol, seesaw_seed);
    pt.sp = spr.sp;
    pt.f_global = spr.f_global;
    pt.f_local = spr.f_local;
  } else {
    pt.sp = pt.f_global = pt.f_local = qnan;
  }

  pt.n_levels = std::min(kLevelSlots, k_eff + 1);
  for (int j = 0; j < pt.n_levels; ++j) {
    pt.energy[static_cast<std::size_t>(j)] = spectrum.levels[static_cast<std::size_t>(j)].energy;
    pt.degeneracy[static_cast<std::size_t>(j)] =
        spectrum.levels[static_cast<std::size_t>(j)].degeneracy;
  }
  return pt;
}

SweepResult run_sweep(const LatticeSpec& lattice, const CouplingParams& base,
                      double from, double to, int steps, std::pair<int, int> pair,
                      const SweepOptions& opts) {
  lattice.validate();
  if (steps < 1) throw ConfigError("run_sweep: steps must be >= 1");
  if (!std::isfinite(from) || !std::isfinite(to))
    throw ConfigError("run_sweep: parameter range must be finite");
  if (steps >= 2 && !(to > from))
    throw ConfigError("run_sweep: range end must exceed range start");

  std::vector<double> xs(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    xs[static_cast<std::size_t>(i)] =
        from + (to - from) * static_cast<double>(i) / static_cast<double>(std::max(1, steps - 1));
  if (steps >= 2) xs.back() = to;

  SweepResult result;
  result.lattice = lattice;
  result.pair = pair;
  result.points.resize(static_cast<std::size_t>(steps));

  int n_threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, steps);

  std::atomic<bool> failed{false};
  std::mutex err_mu;
  int err_index = std::numeric_limits<int>::max();
  std::exception_ptr err;
  double err_param = 0.0;

  auto worker = [&](int t) {
    for (int i = t; i < steps; i += n_threads) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::uint64_t u = static_cast<std::uint64_t>(i);
      try {
        result.points[static_cast<std::size_t>(i)] =
            evaluate_point(lattice, base, xs[static_cast<std::size_t>(i)], pair, opts,
                           mix_seed(opts.seed, 2 * u + 1), mix_seed(opts.seed, 2 * u + 2));
      } catch (...) {
        const std::lock_guard<std::mutex> lk(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
          err_param = xs[static_cast<std::size_t>(i)];
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (err) rethrow_with_param(err, err_param);
  return result;
}

std::vector<double> grid(const SweepResult& sweep) {
  std::vector<double> xs;
  xs.reserve(sweep.points.size());
  for (const auto& pt : sweep.points) xs.push_back(pt.param);
  return xs;
}

std::vector<double> measure_values(const SweepResult& sweep, Measure measure) {
  std::vector<double> ys;
  ys.reserve(sweep.points.size());
  for (const auto& pt : sweep.points)
    ys.push_back(measure == Measure::SharedPurity ? pt.sp : pt.concurrence);
  return ys;
}

std::vector<Discontinuity> detect_discontinuities(const std::vector<double>& xs,
                                                  const std::vector<double>& ys,
                                                  double jump_threshold) {
  check_series(xs, ys, "detect_discontinuities");
  const std::size_t n = xs.size();
  if (n < 3) throw ConfigError("detect_discontinuities: need at least 3 grid points");

  std::vector<double> diff(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = ys[i + 1] - ys[i];

  double threshold = jump_threshold;
  if (!(threshold > 0.0)) {
    std::vector<double> mags(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) mags[i] = std::abs(diff[i]);
    threshold = 5.0 * median_of(std::move(mags));
  }

  std::vector<Discontinuity> out;
  std::size_t i = 0;
  while (i + 1 < n) {
    if (std::abs(diff[i]) > threshold) {
      std::size_t j = i;
      while (j + 2 < n && std::abs(diff[j + 1]) > threshold) ++j;
      Discontinuity d;
      d.bracket_lo = xs[i];
      d.bracket_hi = xs[j + 1];
      d.location = 0.5 * (d.bracket_lo + d.bracket_hi);
      d.jump = ys[j + 1] - ys[i];
      d.refined = false;
      d.bracket_width = d.bracket_hi - d.bracket_lo;
      out.push_back(d);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<Discontinuity> detect_discontinuities(const SweepResult& sweep,
                                                  Measure measure,
                                                  double jump_threshold) {
  return detect_discontinuities(grid(sweep), measure_values(sweep, measure), jump_threshold);
}

Discontinuity refine_discontinuity(const std::function<double(double)>& evaluate,
                                   double bracket_lo, double bracket_hi, double tol) {
  if (!(bracket_hi > bracket_lo))
    throw ConfigError("refine_discontinuity: bracket is empty");
  if (!(tol > 0.0)) throw ConfigError("refine_discontinuity: tol must be positive");

  double lo = bracket_lo, hi = bracket_hi;
  double ylo = evaluate(lo), yhi = evaluate(hi);
  const double initial_jump = std::abs(yhi - ylo);
  if (!(initial_jump > 0.0))
    throw NumericalError("refine_discontinuity: no jump across the initial bracket [" +
                         format_value(lo) + ", " + format_value(hi) + "]");

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo) || !(mid < hi)) break;  // bracket at floating-point resolution
    const double ymid = evaluate(mid);
    const double dl = std::abs(ymid - ylo);
    const double dr = std::abs(yhi - ymid);
    if (std::max(dl, dr) < 0.25 * initial_jump)
      throw NumericalError(
          "refine_discontinuity: jump vanished inside the bracket [" + format_value(lo) +
          ", " + format_value(hi) +
          "] (likely two opposite jumps merged); rerun detection on a finer grid");
    if (dl >= dr) {
      hi = mid;
      yhi = ymid;
    } else {
      lo = mid;
      ylo = ymid;
    }
  }

  Discontinuity d;
  d.bracket_lo = lo;
  d.bracket_hi = hi;
  d.location = 0.5 * (lo + hi);
  d.jump = yhi - ylo;
  d.refined = true;
  d.bracket_width = hi - lo;
  return d;
}

DerivativeExtremum derivative_extremum(const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       std::pair<double, double> window,
                                       ExtremumKind kind,
                                       const DerivativeFitOptions& fit) {
  check_series(xs, ys, "derivative_extremum");
  const auto [wlo, whi] = window;
  if (!(whi > wlo)) throw ConfigError("derivative_extremum: fit window is empty");

  // Central finite differences at interior grid points inside the window.
  std::vector<double> tx, td;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (xs[i] < wlo || xs[i] > whi) continue;
    tx.push_back(xs[i]);
    td.push_back((ys[i + 1] - ys[i - 1]) / (xs[i + 1] - xs[i - 1]));
  }
  const int ns = static_cast<int>(tx.size());
  if (ns < 8)
    throw ConfigError("derivative_extremum: need at least 8 derivative samples inside window [" +
                      format_value(wlo) + ", " + format_value(whi) + "], got " +
                      std::to_string(ns));

  // Fit in centered, scaled coordinates for conditioning.
  const double xm = 0.5 * (wlo + whi);
  const double xsc = 0.5 * (whi - wlo);
  Eigen::VectorXd t(ns), d(ns);
  for (int i = 0; i < ns; ++i) {
    t(i) = (tx[static_cast<std::size_t>(i)] - xm) / xsc;
    d(i) = td[static_cast<std::size_t>(i)];
  }

  std::vector<char> keep(static_cast<std::size_t>(ns), 1);
  int kept = ns;
  int rejected = 0;
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
  const int rounds = fit.robust ? std::max(0, fit.max_reject_rounds) : 0;

  for (int round = 0;; ++round) {
    Eigen::MatrixXd A(kept, 4);
    Eigen::VectorXd b(kept);
    for (int i = 0, r = 0; i < ns; ++i) {
      if (!keep[static_cast<std::size_t>(i)]) continue;
      const double ti = t(i);
      A(r, 0) = 1.0;
      A(r, 1) = ti;
      A(r, 2) = ti * ti;
      A(r, 3) = ti * ti * ti;
      b(r) = d(i);
      ++r;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    c = svd.solve(b);
    if (round >= rounds || kept <= 8) break;

    // Robust scale of the kept residuals (median absolute deviation).
    std::vector<double> res;
    res.reserve(static_cast<std::size_t>(kept));
    for (int i = 0; i < ns; ++i)
      if (keep[static_cast<std::size_t>(i)]) res.push_back(d(i) - poly3(c, t(i)));
    const double med = median_of(res);
    std::vector<double> absdev(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) absdev[i] = std::abs(res[i] - med);
    const double sigma = 1.4826 * median_of(std::move(absdev));
    double dscale = 0.0;
    for (int i = 0; i < ns; ++i) dscale = std::max(dscale, std::abs(d(i)));
    if (!(sigma > 1e-12 * (1.0 + dscale))) break;  // essentially exact fit

    // Discard the worst offenders beyond 3 robust standard deviations,
    // keeping at least 8 samples.
    std::vector<std::pair<double, int>> offenders;
    for (int i = 0; i < ns; ++i) {
      if (!keep[static_cast<std::size_t>(i)]) continue;
      const double dev = std::abs(d(i) - poly3(c, t(i)) - med);
      if (dev > 3.0 * sigma) offenders.emplace_back(dev, i);
    }
    std::sort(offenders.begin(), offenders.end(), [](const auto& a, const auto& b2) {
      return a.first > b2.first || (a.first == b2.first && a.second < b2.second);
    });
    int newly = 0;
    for (const auto& [dev, idx] : offenders) {
      if (kept <= 8) break;
      keep[static_cast<std::size_t>(idx)] = 0;
      --kept;
      ++newly;
    }
    if (newly == 0) break;
    rejected += newly;
  }

  // Interior critical point of the fitted cubic with the requested curvature.
  const auto ts = cubic_critical_points(c(1), c(2), c(3));
  double best_x = 0.0;
  bool found = false;
  for (const double tc : ts) {
    const double curvature = 2.0 * c(2) + 6.0 * c(3) * tc;
    const bool right_kind =
        kind == ExtremumKind::Min ? curvature > 0.0 : curvature < 0.0;
    if (!right_kind) continue;
    const double x = xm + xsc * tc;
    if (!(x > wlo) || !(x < whi)) continue;
    best_x = x;
    found = true;
  }
  if (!found)
    throw NumericalError(
        std::string("derivative_extremum: fitted cubic has no interior ") +
        (kind == ExtremumKind::Min ? "minimum" : "maximum") + " in window [" +
        format_value(wlo) + ", " + format_value(whi) + "]; centered coefficients (" +
        format_value(c(0)) + ", " + format_value(c(1)) + ", " + format_value(c(2)) + ", " +
        format_value(c(3)) + ")");

  // Expand g((x - xm)/xsc) into ascending powers of the raw parameter.
  static constexpr double kBinom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  std::array<double, 4> coeffs{};
  for (int k = 0; k < 4; ++k) {
    const double ck = c(k) / std::pow(xsc, k);
    for (int j = 0; j <= k; ++j)
      coeffs[static_cast<std::size_t>(j)] += ck * kBinom[k][j] * std::pow(-xm, k - j);
  }

  DerivativeExtremum out;
  out.location = best_x;
  out.kind = kind;
  out.fit_window = window;
  out.fit_coeffs = coeffs;
  out.n_samples = ns;
  out.n_rejected = rejected;
  return out;
}

DerivativeExtremum derivative_extremum(const SweepResult& sweep, Measure measure,
                                       std::pair<double, double> window,
                                       ExtremumKind kind,
                                       const DerivativeFitOptions& fit) {
  return derivative_extremum(grid(sweep), measure_values(sweep, measure), window, kind, fit);
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double asymptotic) {
  const std::size_t n = points.size();
  if (n < 3) throw ConfigError("fit_scaling: need at least 3 points");

  Eigen::VectorXd lx(static_cast<Eigen::Index>(n)), ly(static_cast<Eigen::Index>(n));
  int above = 0, below = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double N = points[i].first;
    const double v = points[i].second;
    if (!(N > 0.0)) throw ConfigError("fit_scaling: system sizes must be positive");
    if (!std::isfinite(v)) throw ConfigError("fit_scaling: non-finite pseudo-critical value");
    const double dv = v - asymptotic;
    if (dv == 0.0)
      throw NumericalError("fit_scaling: pseudo-critical value at N = " + format_value(N) +
                           " equals the asymptotic critical point (log singularity)");
    (dv > 0.0 ? above : below) += 1;
    lx(static_cast<Eigen::Index>(i)) = std::log(N);
    ly(static_cast<Eigen::Index>(i)) = std::log(std::abs(dv));
  }

  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  if (!(sxx > 0.0)) throw ConfigError("fit_scaling: at least two distinct system sizes required");
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();

  ScalingFit out;
  out.beta = sxy / sxx;
  out.intercept = my - out.beta * mx;
  const double ss_tot = (ly.array() - my).square().sum();
  const double ss_res =
      (ly.array() - (out.intercept + out.beta * lx.array())).square().sum();
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.asymptotic_critical_point = asymptotic;
  out.sign = above == static_cast<int>(n) ? 1 : (below == static_cast<int>(n) ? -1 : 0);
  out.points = points;
  return out;
}

PointEvaluator::PointEvaluator(LatticeSpec lattice, CouplingParams base,
                               std::pair<int, int> pair, SweepOptions opts)
    : lattice_(lattice), base_(base), pair_(pair), opts_(opts) {
  lattice_.validate();
}

void PointEvaluator::seed_cache(const SweepResult& sweep) {
  for (const auto& pt : sweep.points) {
    auto it = std::lower_bound(cache_.begin(), cache_.end(), pt.param,
                               [](const auto& e, double p) { return e.first < p; });
    if (it != cache_.end() && it->first == pt.param) continue;
    cache_.insert(it, {pt.param, pt});
  }
}

const SweepPoint& PointEvaluator::evaluate(double param) {
  auto it = std::lower_bound(cache_.begin(), cache_.end(), param,
                             [](const auto& e, double p) { return e.first < p; });
  if (it != cache_.end() && it->first == param) return it->second;
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(param);
  SweepPoint pt = evaluate_point(lattice_, base_, param, pair_, opts_,
                                 mix_seed(opts_.seed, bits ^ 0xD1A6D1A6ULL),
                                 mix_seed(opts_.seed, bits ^ 0x0CEA0CEAULL));
  it = cache_.insert(it, {param, std::move(pt)});
  return it->second;
}

double PointEvaluator::evaluate_measure(double param, Measure measure) {
  const SweepPoint& pt = evaluate(param);
  return measure == Measure::SharedPurity ? pt.sp : pt.concurrence;
}

std::function<double(double)> PointEvaluator::measure_fn(Measure measure) {
  return [this, measure](double p) { return evaluate_measure(p, measure); };
}

Analysis2d analyze_2d(const SweepResult& sweep, const Analyze2dOptions& opts) {
  const auto xs = grid(sweep);
  if (xs.size() < 3) throw ConfigError("analyze_2d: need at least 3 sweep points");
  if (xs.front() > 0.3 + 1e-12 || xs.back() < 0.7 - 1e-12)
    throw ConfigError("analyze_2d: sweep must cover at least [0.3, 0.7]");

  PointEvaluator eval(sweep.lattice, opts.base, sweep.pair, opts.sweep);
  eval.seed_cache(sweep);

  std::vector<std::pair<Measure, Discontinuity>> candidates, others;
  for (const Measure m : {Measure::SharedPurity, Measure::Concurrence}) {
    for (const auto& d : detect_discontinuities(sweep, m, opts.jump_threshold)) {
      if (d.location >= opts.drop_window.first && d.location <= opts.drop_window.second) {
        candidates.emplace_back(
            m, refine_discontinuity(eval.measure_fn(m), d.bracket_lo, d.bracket_hi,
                                    opts.refine_tol));
      } else {
        others.emplace_back(m, d);
      }
    }
  }
  if (candidates.empty())
    throw NumericalError("analyze_2d: no discontinuity detected inside the drop window [" +
                         format_value(opts.drop_window.first) + ", " +
                         format_value(opts.drop_window.second) + "]");

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (std::abs(candidates[i].second.jump) > std::abs(candidates[best].second.jump))
      best = i;

  Analysis2d out;
  out.drop = candidates[best].second;
  out.drop_measure = candidates[best].first;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (i != best) others.push_back(candidates[i]);
  out.second = derivative_extremum(sweep, Measure::SharedPurity, opts.sp_window,
                                   ExtremumKind::Min, opts.fit);
  out.other = std::move(others);
  return out;
}

}  // namespace spinqpt
