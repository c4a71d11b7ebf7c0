#include "spinqpt/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>

#include "spinqpt/csvio.hpp"
#include "spinqpt/errors.hpp"

namespace spinqpt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("config key '" + key + "': invalid floating-point value '" + value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("config key '" + key + "': invalid integer value '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  std::string_view v(value);
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    v.remove_prefix(2);
    base = 16;
  }
  const char* first = v.data();
  const char* last = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(first, last, out, base);
  if (ec != std::errc{} || ptr != last || v.empty())
    throw ConfigError("config key '" + key + "': invalid unsigned integer value '" + value + "'");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  lattice().validate();
  if (steps < 1) throw ConfigError("config field 'steps' must be >= 1");
  if (!std::isfinite(from)) throw ConfigError("config field 'from' must be finite");
  if (!std::isfinite(to)) throw ConfigError("config field 'to' must be finite");
  if (steps >= 2 && !(to > from))
    throw ConfigError("config field 'to' must exceed 'from' when steps >= 2");
  const int sites = lattice().sites;
  if (pair_a < 0 || pair_a >= sites) throw ConfigError("config field 'pair_a' out of range");
  if (pair_b < 0 || pair_b >= sites) throw ConfigError("config field 'pair_b' out of range");
  if (pair_a == pair_b) throw ConfigError("config fields 'pair_a' and 'pair_b' must differ");
  if (k_max < 0) throw ConfigError("config field 'k_max' must be >= 0");
  if (restarts < 1) throw ConfigError("config field 'restarts' must be >= 1");
  if (threads < 0) throw ConfigError("config field 'threads' must be >= 0");
  if (block_size < 1) throw ConfigError("config field 'block_size' must be >= 1");
  if (!(solver_tol > 0.0)) throw ConfigError("config field 'solver_tol' must be positive");
  if (!(seesaw_tol > 0.0)) throw ConfigError("config field 'seesaw_tol' must be positive");
  if (!(refine_tol > 0.0)) throw ConfigError("config field 'refine_tol' must be positive");
  if (!std::isfinite(jump_threshold))
    throw ConfigError("config field 'jump_threshold' must be finite");
  if (!(window_hi >= window_lo))
    throw ConfigError("config field 'window_hi' must be >= 'window_lo'");
  if (csv_path.empty()) throw ConfigError("config field 'csv_path' must not be empty");
}

LatticeSpec RunConfig::lattice() const {
  if (model == Model::J1J2Square) return LatticeSpec::square(rows, cols);
  return LatticeSpec::chain(model, n);
}

CouplingParams RunConfig::couplings() const {
  CouplingParams p;
  p.j1 = 1.0;
  p.j2 = 0.0;
  p.lambda = 0.0;
  return p;
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions opts;
  opts.k_max = k_max;
  opts.measures = measures;
  opts.solver.block_size = block_size;
  opts.solver.tol = solver_tol;
  opts.seesaw_restarts = restarts;
  opts.seesaw_tol = seesaw_tol;
  opts.seed = seed;
  opts.threads = threads;
  return opts;
}

std::string RunConfig::resolved_manifest_path() const {
  return manifest_path.empty() ? csv_path + ".manifest.json" : manifest_path;
}

std::string config_to_string(const RunConfig& c) {
  std::ostringstream out;
  out << "model = " << model_name(c.model) << "\n";
  out << "n = " << c.n << "\n";
  out << "rows = " << c.rows << "\n";
  out << "cols = " << c.cols << "\n";
  out << "from = " << fmt_double(c.from) << "\n";
  out << "to = " << fmt_double(c.to) << "\n";
  out << "steps = " << c.steps << "\n";
  out << "measures = " << measure_set_name(c.measures) << "\n";
  out << "pair_a = " << c.pair_a << "\n";
  out << "pair_b = " << c.pair_b << "\n";
  out << "k_max = " << c.k_max << "\n";
  out << "restarts = " << c.restarts << "\n";
  out << "seed = " << c.seed << "\n";
  out << "threads = " << c.threads << "\n";
  out << "block_size = " << c.block_size << "\n";
  out << "solver_tol = " << fmt_double(c.solver_tol) << "\n";
  out << "seesaw_tol = " << fmt_double(c.seesaw_tol) << "\n";
  out << "refine_tol = " << fmt_double(c.refine_tol) << "\n";
  out << "jump_threshold = " << fmt_double(c.jump_threshold) << "\n";
  out << "window_lo = " << fmt_double(c.window_lo) << "\n";
  out << "window_hi = " << fmt_double(c.window_hi) << "\n";
  out << "csv_path = " << c.csv_path << "\n";
  out << "manifest_path = " << c.manifest_path << "\n";
  return out.str();
}

RunConfig config_from_string(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");

    if (key == "model") c.model = model_from_name(value);
    else if (key == "n") c.n = parse_int(key, value);
    else if (key == "rows") c.rows = parse_int(key, value);
    else if (key == "cols") c.cols = parse_int(key, value);
    else if (key == "from") c.from = parse_double(key, value);
    else if (key == "to") c.to = parse_double(key, value);
    else if (key == "steps") c.steps = parse_int(key, value);
    else if (key == "measures") c.measures = measure_set_from_name(value);
    else if (key == "pair_a") c.pair_a = parse_int(key, value);
    else if (key == "pair_b") c.pair_b = parse_int(key, value);
    else if (key == "k_max") c.k_max = parse_int(key, value);
    else if (key == "restarts") c.restarts = parse_int(key, value);
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "threads") c.threads = parse_int(key, value);
    else if (key == "block_size") c.block_size = parse_int(key, value);
    else if (key == "solver_tol") c.solver_tol = parse_double(key, value);
    else if (key == "seesaw_tol") c.seesaw_tol = parse_double(key, value);
    else if (key == "refine_tol") c.refine_tol = parse_double(key, value);
    else if (key == "jump_threshold") c.jump_threshold = parse_double(key, value);
    else if (key == "window_lo") c.window_lo = parse_double(key, value);
    else if (key == "window_hi") c.window_hi = parse_double(key, value);
    else if (key == "csv_path") c.csv_path = value;
    else if (key == "manifest_path") c.manifest_path = value;
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

void save_config(const RunConfig& config, const std::string& path) {
  atomic_write_file(path, config_to_string(config));
}

RunConfig load_config(const std::string& path) {
  return config_from_string(read_file(path));
}

}  // namespace spinqpt
