#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spinqpt/eigensolver.hpp"
#include "spinqpt/lattice.hpp"
#include "spinqpt/measures.hpp"

namespace spinqpt {

// ---------------------------------------------------------------------------
// Measures and sweep records
// ---------------------------------------------------------------------------

enum class Measure { SharedPurity, Concurrence };

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

// Which measures a sweep evaluates. Skipped measures are recorded as NaN.
enum class MeasureSet { Concurrence, SharedPurity, Both };

std::string measure_set_name(MeasureSet m);
MeasureSet measure_set_from_name(const std::string& name);

// Number of level slots recorded per sweep point (E_0..E_4, d_0..d_4).
inline constexpr int kLevelSlots = 5;

struct SweepPoint {
  double param = 0.0;  // alpha = J2/J1 for Heisenberg models, lambda for TFIM
  double sp = 0.0;
  double concurrence = 0.0;
  double f_global = 0.0;
  double f_local = 0.0;
  // Lowest distinct energy levels retained in the mixture. Slots beyond the
  // number of retained levels have degeneracy 0 and energy 0.
  std::array<double, kLevelSlots> energy{};
  std::array<int, kLevelSlots> degeneracy{};
  int n_levels = 0;
};

struct SweepResult {
  LatticeSpec lattice{};
  std::pair<int, int> pair{0, 1};
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  // Mixture depth: levels 0..k_max are retained (k_max + 1 levels).
  int k_max = 4;
  MeasureSet measures = MeasureSet::Both;
  SolverOptions solver{};
  int seesaw_restarts = 20;
  double seesaw_tol = 1e-10;
  // Master seed; per-point solver and optimizer seeds are derived from it
  // and from the grid index only, so results do not depend on thread count.
  std::uint64_t seed = 0x5eed0002ULL;
  int threads = 0;  // 0 = hardware concurrency
};

// Map a sweep parameter value to coupling parameters for the given model:
// Heisenberg models sweep alpha (j2 = alpha * j1), TFIM sweeps lambda.
CouplingParams params_for(Model model, const CouplingParams& base, double param);

// Evaluate the full pipeline at a single parameter value.
SweepPoint evaluate_point(const LatticeSpec& lattice, const CouplingParams& base,
                          double param, std::pair<int, int> pair,
                          const SweepOptions& opts, std::uint64_t solver_seed,
                          std::uint64_t seesaw_seed);

// Run a sweep over `steps` parameter values uniformly spaced on [from, to]
// (steps == 1 evaluates the single value `from`). Points are evaluated by a
// deterministic parallel map; a failed point aborts the sweep with the
// offending parameter value attached to the error message.
SweepResult run_sweep(const LatticeSpec& lattice, const CouplingParams& base,
                      double from, double to, int steps, std::pair<int, int> pair,
                      const SweepOptions& opts = {});

// Column access helpers.
std::vector<double> grid(const SweepResult& sweep);
std::vector<double> measure_values(const SweepResult& sweep, Measure measure);

// ---------------------------------------------------------------------------
// Discontinuities
// ---------------------------------------------------------------------------

struct Discontinuity {
  double location = 0.0;       // bracket midpoint
  double jump = 0.0;           // signed y(hi) - y(lo) across the bracket
  bool refined = false;        // true after bisection refinement
  double bracket_width = 0.0;  // hi - lo
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Flag adjacent-point jumps with |dy| > jump_threshold; consecutive flagged
// intervals merge into one discontinuity. jump_threshold <= 0 selects the
// data-driven default of 5x the median absolute adjacent difference.
std::vector<Discontinuity> detect_discontinuities(const std::vector<double>& xs,
                                                  const std::vector<double>& ys,
                                                  double jump_threshold = 0.0);
std::vector<Discontinuity> detect_discontinuities(const SweepResult& sweep,
                                                  Measure measure,
                                                  double jump_threshold = 0.0);

// Bisect a bracket containing exactly one jump: evaluate the measure at the
// midpoint and keep the half-interval with the larger jump, stopping once the
// bracket is narrower than tol. Errors if the jump vanishes inside the
// bracket (two opposite jumps merged), advising a finer initial grid.
Discontinuity refine_discontinuity(const std::function<double(double)>& evaluate,
                                   double bracket_lo, double bracket_hi,
                                   double tol = 1e-6);

// ---------------------------------------------------------------------------
// Derivative extrema
// ---------------------------------------------------------------------------

enum class ExtremumKind { Min, Max };

struct DerivativeExtremum {
  double location = 0.0;
  ExtremumKind kind = ExtremumKind::Min;
  std::pair<double, double> fit_window{0.0, 0.0};
  // Fitted cubic for the derivative, ascending powers of the raw parameter:
  // g(x) = fit_coeffs[0] + fit_coeffs[1] x + fit_coeffs[2] x^2 + fit_coeffs[3] x^3.
  std::array<double, 4> fit_coeffs{};
  int n_samples = 0;
  int n_rejected = 0;
};

struct DerivativeFitOptions {
  // Iteratively discard derivative samples whose cubic-fit residual exceeds
  // 3 robust standard deviations (median absolute deviation scale). Level
  // crossings inside the fit window otherwise leak spike artifacts into the
  // fit through the finite-difference derivative.
  bool robust = true;
  int max_reject_rounds = 5;
};

// Default fit windows and asymptotic critical points.
inline constexpr double kWindowConcurrenceMinLo = 0.95;
inline constexpr double kWindowConcurrenceMinHi = 1.15;
inline constexpr double kWindowSharedPurityMaxLo = 0.85;
inline constexpr double kWindowSharedPurityMaxHi = 1.05;
inline constexpr double kWindow2dSharedPurityLo = 0.55;
inline constexpr double kWindow2dSharedPurityHi = 0.68;
inline constexpr double kAlphaCritical = 0.2412;
inline constexpr double kLambdaCritical = 1.0;

// Central finite-difference derivative on the grid, least-squares cubic fit
// to the derivative samples inside [window.first, window.second], analytic
// interior extremum of the requested kind. At least 8 derivative samples must
// fall inside the window. Errors if the fitted cubic has no extremum of the
// requested kind strictly inside the window.
DerivativeExtremum derivative_extremum(const std::vector<double>& xs,
                                       const std::vector<double>& ys,
                                       std::pair<double, double> window,
                                       ExtremumKind kind,
                                       const DerivativeFitOptions& fit = {});
DerivativeExtremum derivative_extremum(const SweepResult& sweep, Measure measure,
                                       std::pair<double, double> window,
                                       ExtremumKind kind,
                                       const DerivativeFitOptions& fit = {});

// ---------------------------------------------------------------------------
// Finite-size scaling
// ---------------------------------------------------------------------------

struct ScalingFit {
  double beta = 0.0;  // slope of ln|value - asymptotic| against ln N
  double intercept = 0.0;
  double r_squared = 0.0;
  double asymptotic_critical_point = 0.0;
  // +1 if every pseudo-critical value lies above the asymptotic point,
  // -1 if every value lies below, 0 if mixed (fit uses |value - asymptotic|).
  int sign = 0;
  std::vector<std::pair<double, double>> points;  // (N, pseudo-critical value)
};

// Ordinary least squares of ln|pseudo_critical - asymptotic| on ln N.
// Requires >= 3 points; errors on a log singularity (value == asymptotic).
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double asymptotic);

// ---------------------------------------------------------------------------
// 2-D analysis
// ---------------------------------------------------------------------------

struct Analyze2dOptions {
  CouplingParams base{};  // j1 baseline for re-evaluation during refinement
  SweepOptions sweep{};
  std::pair<double, double> drop_window{0.35, 0.45};
  std::pair<double, double> sp_window{kWindow2dSharedPurityLo,
                                      kWindow2dSharedPurityHi};
  double jump_threshold = 0.0;  // <= 0: data-driven default
  double refine_tol = 1e-6;
  DerivativeFitOptions fit{};
};

struct Analysis2d {
  Discontinuity drop;      // largest refined discontinuity inside drop_window
  Measure drop_measure = Measure::SharedPurity;
  DerivativeExtremum second;  // shared-purity derivative minimum in sp_window
  // All other detected discontinuities, unrefined and unclassified.
  std::vector<std::pair<Measure, Discontinuity>> other;
};

// Analyze a 2-D lattice sweep covering at least [0.3, 0.7]: refine the
// discontinuities of both measures inside drop_window and keep the largest
// jump; locate the shared-purity derivative minimum in sp_window; report the
// remaining discontinuities without classification.
Analysis2d analyze_2d(const SweepResult& sweep, const Analyze2dOptions& opts);

// ---------------------------------------------------------------------------
// Cached single-point evaluator (shared by refinement passes)
// ---------------------------------------------------------------------------

class PointEvaluator {
 public:
  PointEvaluator(LatticeSpec lattice, CouplingParams base, std::pair<int, int> pair,
                 SweepOptions opts);

  // Seed the cache with already-computed sweep points.
  void seed_cache(const SweepResult& sweep);

  const SweepPoint& evaluate(double param);
  double evaluate_measure(double param, Measure measure);

  // Measure evaluator bound to this cache, suitable for refine_discontinuity.
  std::function<double(double)> measure_fn(Measure measure);

  std::size_t cache_size() const { return cache_.size(); }

 private:
  LatticeSpec lattice_;
  CouplingParams base_;
  std::pair<int, int> pair_;
  SweepOptions opts_;
  std::vector<std::pair<double, SweepPoint>> cache_;  // sorted by param
};

}  // namespace spinqpt
