#pragma once

#include <cstdint>
#include <string>

#include "spinqpt/lattice.hpp"
#include "spinqpt/sweep.hpp"

namespace spinqpt {

inline constexpr const char* kLibraryVersion = "1.0.0";

// Full description of one sweep run. Round-trips losslessly through the
// key=value config file format (doubles printed with 17 significant digits).
struct RunConfig {
  // Model and geometry.
  Model model = Model::J1J2Chain;
  int n = 12;        // chain length (j1j2-1d, tfim)
  int rows = 4;      // square lattice only
  int cols = 4;      // square lattice only

  // Parameter grid: alpha = J2/J1 for Heisenberg models, lambda for TFIM.
  double from = 0.0;
  double to = 1.0;
  int steps = 101;

  // Measures and reduction pair.
  MeasureSet measures = MeasureSet::Both;
  int pair_a = 0;
  int pair_b = 1;
  int k_max = 4;

  // Optimizer / solver knobs.
  int restarts = 20;            // see-saw random restarts per state
  std::uint64_t seed = 0x5eed0002ULL;
  int threads = 0;              // 0 = hardware concurrency
  int block_size = 8;
  double solver_tol = 1e-10;
  double seesaw_tol = 1e-10;

  // Analysis knobs.
  double refine_tol = 1e-6;
  double jump_threshold = 0.0;  // <= 0: data-driven default (5x median)
  double window_lo = 0.0;       // fit window override; lo == hi means
  double window_hi = 0.0;       //   "use the per-measure default window"

  // Output paths.
  std::string csv_path = "sweep.csv";
  std::string manifest_path;    // empty: csv_path + ".manifest.json"

  void validate() const;  // throws ConfigError naming the offending field

  LatticeSpec lattice() const;
  CouplingParams couplings() const;  // j1 = 1 baseline
  SweepOptions sweep_options() const;
  std::string resolved_manifest_path() const;
};

// Serialize to the documented key=value format (one `key = value` per line,
// '#' comments allowed when parsing, unknown keys rejected).
std::string config_to_string(const RunConfig& config);
RunConfig config_from_string(const std::string& text);

void save_config(const RunConfig& config, const std::string& path);
RunConfig load_config(const std::string& path);

}  // namespace spinqpt
