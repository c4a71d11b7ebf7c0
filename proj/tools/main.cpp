// spinqpt CLI: run parameter sweeps and analyze them (discontinuities,
// derivative extrema, finite-size scaling fits).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spinqpt/config.hpp"
#include "spinqpt/csvio.hpp"
#include "spinqpt/errors.hpp"
#include "spinqpt/sweep.hpp"

namespace {

using namespace spinqpt;

struct SweepFlags {
  std::string config_path;
  std::string model;
  int n = 0, rows = 0, cols = 0;
  double from = 0.0, to = 0.0;
  int steps = 0;
  std::string measure;
  int pair_a = 0, pair_b = 0;
  int k_max = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  int block_size = 0;
  double solver_tol = 0.0, seesaw_tol = 0.0, refine_tol = 0.0;
  double jump_threshold = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  std::string out, manifest;
};

struct AnalyzeFlags {
  std::vector<std::string> inputs;
  std::string measure = "both";
  double jump_threshold = 0.0;
  bool refine = false;
  bool two_d = false;
  double window_lo = 0.0, window_hi = 0.0;
  std::string kind;
  double asymptotic = 0.0;
  std::string out;
};

std::vector<Measure> measures_of(MeasureSet set) {
  switch (set) {
    case MeasureSet::Concurrence: return {Measure::Concurrence};
    case MeasureSet::SharedPurity: return {Measure::SharedPurity};
    default: return {Measure::SharedPurity, Measure::Concurrence};
  }
}

ExtremumKind kind_from_name(const std::string& name) {
  if (name == "min") return ExtremumKind::Min;
  if (name == "max") return ExtremumKind::Max;
  throw ConfigError("unknown extremum kind '" + name + "' (expected 'min' or 'max')");
}

nlohmann::json discontinuity_json(const Discontinuity& d) {
  return {{"location", d.location},   {"jump", d.jump},
          {"refined", d.refined},     {"bracket_width", d.bracket_width},
          {"bracket_lo", d.bracket_lo}, {"bracket_hi", d.bracket_hi}};
}

nlohmann::json extremum_json(const DerivativeExtremum& e) {
  return {{"location", e.location},
          {"kind", e.kind == ExtremumKind::Min ? "min" : "max"},
          {"window", {e.fit_window.first, e.fit_window.second}},
          {"fit_coeffs", {e.fit_coeffs[0], e.fit_coeffs[1], e.fit_coeffs[2], e.fit_coeffs[3]}},
          {"n_samples", e.n_samples},
          {"n_rejected", e.n_rejected}};
}

nlohmann::json scaling_json(const ScalingFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [N, v] : f.points) pts.push_back({N, v});
  return {{"beta", f.beta},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"asymptotic", f.asymptotic_critical_point},
          {"sign", f.sign},
          {"points", pts}};
}

int cmd_sweep(const SweepFlags& f, const CLI::App& sub) {
  RunConfig cfg;
  if (sub.count("--config")) cfg = load_config(f.config_path);
  const auto given = [&sub](const std::string& flag) { return sub.count(flag) > 0; };
  if (given("--model")) cfg.model = model_from_name(f.model);
  else if (!sub.count("--config")) throw ConfigError("--model is required (or pass --config)");
  if (given("--n")) cfg.n = f.n;
  if (given("--rows")) cfg.rows = f.rows;
  if (given("--cols")) cfg.cols = f.cols;
  if (given("--from")) cfg.from = f.from;
  if (given("--to")) cfg.to = f.to;
  if (given("--steps")) cfg.steps = f.steps;
  if (given("--measure")) cfg.measures = measure_set_from_name(f.measure);
  if (given("--pair-a")) cfg.pair_a = f.pair_a;
  if (given("--pair-b")) cfg.pair_b = f.pair_b;
  if (given("--k-max")) cfg.k_max = f.k_max;
  if (given("--restarts")) cfg.restarts = f.restarts;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--threads")) cfg.threads = f.threads;
  if (given("--block-size")) cfg.block_size = f.block_size;
  if (given("--solver-tol")) cfg.solver_tol = f.solver_tol;
  if (given("--seesaw-tol")) cfg.seesaw_tol = f.seesaw_tol;
  if (given("--refine-tol")) cfg.refine_tol = f.refine_tol;
  if (given("--jump-threshold")) cfg.jump_threshold = f.jump_threshold;
  if (given("--window-lo")) cfg.window_lo = f.window_lo;
  if (given("--window-hi")) cfg.window_hi = f.window_hi;
  if (given("--out")) cfg.csv_path = f.out;
  if (given("--manifest")) cfg.manifest_path = f.manifest;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult result =
      run_sweep(cfg.lattice(), cfg.couplings(), cfg.from, cfg.to, cfg.steps,
                {cfg.pair_a, cfg.pair_b}, cfg.sweep_options());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_sweep_csv(result, cfg.csv_path);
  RunManifest manifest;
  manifest.config = cfg;
  manifest.wall_time_seconds = wall;
  write_manifest(manifest, cfg.resolved_manifest_path());

  std::cout << "wrote " << cfg.csv_path << " (" << result.points.size() << " rows) and "
            << cfg.resolved_manifest_path() << " in " << wall << " s\n";
  return 0;
}

int cmd_analyze(const AnalyzeFlags& f, const CLI::App& sub) {
  const bool has_window = sub.count("--window-lo") > 0 || sub.count("--window-hi") > 0;
  if (has_window && (sub.count("--window-lo") == 0 || sub.count("--window-hi") == 0))
    throw ConfigError("--window-lo and --window-hi must be given together");
  if (has_window && sub.count("--kind") == 0)
    throw ConfigError("--kind is required when a fit window is given");
  const bool has_asymptotic = sub.count("--asymptotic") > 0;
  const auto measure_set = measure_set_from_name(f.measure);
  const auto measures = measures_of(measure_set);

  nlohmann::json out;
  out["format"] = "spinqpt-analysis";
  out["schema_version"] = 1;
  out["library_version"] = kLibraryVersion;
  nlohmann::json inputs = nlohmann::json::array();

  // (measure, discontinuity ordinal) -> (N, location) series across inputs.
  std::map<std::pair<std::string, std::size_t>, std::vector<std::pair<double, double>>>
      disc_series;
  std::map<std::string, std::vector<std::pair<double, double>>> ext_series;
  std::size_t min_disc_count = std::numeric_limits<std::size_t>::max();

  for (const std::string& path : f.inputs) {
    const std::vector<SweepPoint> points = read_sweep_csv(path);
    if (points.empty()) throw IoError("sweep file has no data rows: " + path);

    const std::string manifest_path = path + ".manifest.json";
    const bool have_manifest = std::filesystem::exists(manifest_path);
    const bool need_manifest = f.refine || f.two_d || has_asymptotic;
    if (need_manifest && !have_manifest)
      throw IoError("manifest required for --refine/--two-d/--asymptotic but not found: " +
                    manifest_path);
    RunManifest manifest;
    if (have_manifest) manifest = read_manifest(manifest_path);

    std::vector<double> xs;
    xs.reserve(points.size());
    for (const auto& pt : points) xs.push_back(pt.param);

    nlohmann::json entry;
    entry["csv"] = path;
    double n_sites = 0.0;
    if (have_manifest) {
      entry["model"] = model_name(manifest.config.model);
      n_sites = static_cast<double>(manifest.config.lattice().sites);
      entry["n_sites"] = manifest.config.lattice().sites;
    }

    SweepResult sweep;
    if (have_manifest) {
      sweep.lattice = manifest.config.lattice();
      sweep.pair = {manifest.config.pair_a, manifest.config.pair_b};
    }
    sweep.points = points;

    for (const Measure m : measures) {
      std::vector<double> ys;
      ys.reserve(points.size());
      for (const auto& pt : points)
        ys.push_back(m == Measure::SharedPurity ? pt.sp : pt.concurrence);

      std::vector<Discontinuity> discs = detect_discontinuities(xs, ys, f.jump_threshold);
      if (f.refine && !discs.empty()) {
        PointEvaluator eval(sweep.lattice, manifest.config.couplings(), sweep.pair,
                            manifest.config.sweep_options());
        eval.seed_cache(sweep);
        for (auto& d : discs)
          d = refine_discontinuity(eval.measure_fn(m), d.bracket_lo, d.bracket_hi,
                                   manifest.config.refine_tol);
      }

      nlohmann::json mj;
      nlohmann::json dj = nlohmann::json::array();
      for (const auto& d : discs) dj.push_back(discontinuity_json(d));
      mj["discontinuities"] = dj;

      if (has_window) {
        const DerivativeExtremum ext = derivative_extremum(
            xs, ys, {f.window_lo, f.window_hi}, kind_from_name(f.kind));
        mj["extremum"] = extremum_json(ext);
        if (has_asymptotic) ext_series[measure_name(m)].emplace_back(n_sites, ext.location);
      }
      entry["measures"][measure_name(m)] = mj;

      if (has_asymptotic) {
        min_disc_count = std::min(min_disc_count, discs.size());
        for (std::size_t k = 0; k < discs.size(); ++k)
          disc_series[{measure_name(m), k}].emplace_back(n_sites, discs[k].location);
      }
    }

    if (f.two_d) {
      if (manifest.config.model != Model::J1J2Square)
        throw ConfigError("--two-d requires a j1j2-2d sweep, got model '" +
                          model_name(manifest.config.model) + "' in " + manifest_path);
      Analyze2dOptions opts;
      opts.base = manifest.config.couplings();
      opts.sweep = manifest.config.sweep_options();
      opts.jump_threshold = f.jump_threshold;
      opts.refine_tol = manifest.config.refine_tol;
      const Analysis2d a2 = analyze_2d(sweep, opts);
      nlohmann::json tj;
      tj["drop"] = discontinuity_json(a2.drop);
      tj["drop"]["measure"] = measure_name(a2.drop_measure);
      tj["second"] = extremum_json(a2.second);
      nlohmann::json oj = nlohmann::json::array();
      for (const auto& [m, d] : a2.other) {
        nlohmann::json e = discontinuity_json(d);
        e["measure"] = measure_name(m);
        oj.push_back(e);
      }
      tj["other"] = oj;
      entry["two_d"] = tj;
    }

    inputs.push_back(entry);
  }
  out["inputs"] = inputs;

  if (has_asymptotic) {
    nlohmann::json scal = nlohmann::json::array();
    for (const auto& [key, series] : disc_series) {
      const auto& [mname, ordinal] = key;
      if (ordinal >= min_disc_count || series.size() < 3) continue;
      nlohmann::json e = scaling_json(fit_scaling(series, f.asymptotic));
      e["measure"] = mname;
      e["source"] = "discontinuity";
      e["ordinal"] = ordinal;
      scal.push_back(e);
    }
    for (const auto& [mname, series] : ext_series) {
      if (series.size() < 3) continue;
      nlohmann::json e = scaling_json(fit_scaling(series, f.asymptotic));
      e["measure"] = mname;
      e["source"] = "extremum";
      scal.push_back(e);
    }
    out["scaling"] = scal;
  }

  atomic_write_file(f.out, out.dump(2) + "\n");
  std::cout << "wrote " << f.out << " (" << f.inputs.size() << " input sweep"
            << (f.inputs.size() == 1 ? "" : "s") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-chain quantum phase transitions from concurrence and shared purity"};
  app.set_version_flag("--version", std::string(kLibraryVersion));
  app.require_subcommand(1);

  SweepFlags sf;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and write CSV + manifest");
  sweep_cmd->add_option("--config", sf.config_path, "key=value config file to start from");
  sweep_cmd->add_option("--model", sf.model, "j1j2-1d, tfim, or j1j2-2d");
  sweep_cmd->add_option("--n", sf.n, "chain length");
  sweep_cmd->add_option("--rows", sf.rows, "square lattice rows");
  sweep_cmd->add_option("--cols", sf.cols, "square lattice columns");
  sweep_cmd->add_option("--from", sf.from, "sweep range start (alpha or lambda)");
  sweep_cmd->add_option("--to", sf.to, "sweep range end");
  sweep_cmd->add_option("--steps", sf.steps, "number of grid points");
  sweep_cmd->add_option("--measure", sf.measure, "sp, concurrence, or both");
  sweep_cmd->add_option("--pair-a", sf.pair_a, "first site of the reduced pair");
  sweep_cmd->add_option("--pair-b", sf.pair_b, "second site of the reduced pair");
  sweep_cmd->add_option("--k-max", sf.k_max, "highest retained level index (k_max+1 levels)");
  sweep_cmd->add_option("--restarts", sf.restarts, "see-saw random restarts");
  sweep_cmd->add_option("--seed", sf.seed, "master PRNG seed (solver + optimizer)");
  sweep_cmd->add_option("--threads", sf.threads, "worker threads (0 = hardware)");
  sweep_cmd->add_option("--block-size", sf.block_size, "eigensolver block size");
  sweep_cmd->add_option("--solver-tol", sf.solver_tol, "eigensolver residual tolerance");
  sweep_cmd->add_option("--seesaw-tol", sf.seesaw_tol, "see-saw convergence tolerance");
  sweep_cmd->add_option("--refine-tol", sf.refine_tol, "bisection bracket tolerance");
  sweep_cmd->add_option("--jump-threshold", sf.jump_threshold,
                        "discontinuity threshold (<= 0: 5x median)");
  sweep_cmd->add_option("--window-lo", sf.window_lo, "fit window low edge override");
  sweep_cmd->add_option("--window-hi", sf.window_hi, "fit window high edge override");
  sweep_cmd->add_option("--out", sf.out, "output CSV path");
  sweep_cmd->add_option("--manifest", sf.manifest, "output manifest path");

  AnalyzeFlags af;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "analyze sweep CSVs and write an analysis JSON");
  analyze_cmd->add_option("--in", af.inputs, "input sweep CSV (repeat for an N-series)")
      ->required()
      ->expected(-1);
  analyze_cmd->add_option("--measure", af.measure, "sp, concurrence, or both");
  analyze_cmd->add_option("--jump-threshold", af.jump_threshold,
                          "discontinuity threshold (<= 0: 5x median)");
  analyze_cmd->add_flag("--refine", af.refine,
                        "bisection-refine discontinuities (needs the manifest next to each CSV)");
  analyze_cmd->add_flag("--two-d", af.two_d, "run the 2-D drop/extremum analysis");
  analyze_cmd->add_option("--window-lo", af.window_lo, "derivative fit window low edge");
  analyze_cmd->add_option("--window-hi", af.window_hi, "derivative fit window high edge");
  analyze_cmd->add_option("--kind", af.kind, "extremum kind: min or max");
  analyze_cmd->add_option("--asymptotic", af.asymptotic,
                          "asymptotic critical point for scaling fits");
  analyze_cmd->add_option("--out", af.out, "output analysis JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sweep_cmd->parsed()) return cmd_sweep(sf, *sweep_cmd);
    if (analyze_cmd->parsed()) return cmd_analyze(af, *analyze_cmd);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
