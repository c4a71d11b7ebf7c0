#include "spinqpt/csvio.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "spinqpt/errors.hpp"

namespace spinqpt {

namespace {

std::string fmt17(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_field_double(std::string_view field, std::size_t line_no) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw IoError("sweep file line " + std::to_string(line_no) +
                  ": invalid floating-point field '" + std::string(field) + "'");
  return out;
}

int parse_field_int(std::string_view field, std::size_t line_no) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw IoError("sweep file line " + std::to_string(line_no) + ": invalid integer field '" +
                  std::string(field) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = model_name(c.model);
  j["n"] = c.n;
  j["rows"] = c.rows;
  j["cols"] = c.cols;
  j["from"] = c.from;
  j["to"] = c.to;
  j["steps"] = c.steps;
  j["measures"] = measure_set_name(c.measures);
  j["pair_a"] = c.pair_a;
  j["pair_b"] = c.pair_b;
  j["k_max"] = c.k_max;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["block_size"] = c.block_size;
  j["solver_tol"] = c.solver_tol;
  j["seesaw_tol"] = c.seesaw_tol;
  j["refine_tol"] = c.refine_tol;
  j["jump_threshold"] = c.jump_threshold;
  j["window_lo"] = c.window_lo;
  j["window_hi"] = c.window_hi;
  j["csv_path"] = c.csv_path;
  j["manifest_path"] = c.manifest_path;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.model = model_from_name(j.at("model").get<std::string>());
  c.n = j.at("n").get<int>();
  c.rows = j.at("rows").get<int>();
  c.cols = j.at("cols").get<int>();
  c.from = j.at("from").get<double>();
  c.to = j.at("to").get<double>();
  c.steps = j.at("steps").get<int>();
  c.measures = measure_set_from_name(j.at("measures").get<std::string>());
  c.pair_a = j.at("pair_a").get<int>();
  c.pair_b = j.at("pair_b").get<int>();
  c.k_max = j.at("k_max").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.block_size = j.at("block_size").get<int>();
  c.solver_tol = j.at("solver_tol").get<double>();
  c.seesaw_tol = j.at("seesaw_tol").get<double>();
  c.refine_tol = j.at("refine_tol").get<double>();
  c.jump_threshold = j.at("jump_threshold").get<double>();
  c.window_lo = j.at("window_lo").get<double>();
  c.window_hi = j.at("window_hi").get<double>();
  c.csv_path = j.at("csv_path").get<std::string>();
  c.manifest_path = j.at("manifest_path").get<std::string>();
  return c;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for reading: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on file: " + path);
  return content;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("write failure on file: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move temporary file into place: " + path);
  }
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& pt : sweep.points) {
    out += fmt17(pt.param);
    out.push_back(',');
    out += fmt17(pt.sp);
    out.push_back(',');
    out += fmt17(pt.concurrence);
    out.push_back(',');
    out += fmt17(pt.f_global);
    out.push_back(',');
    out += fmt17(pt.f_local);
    for (int j = 0; j < kLevelSlots; ++j) {
      out.push_back(',');
      out += fmt17(pt.energy[static_cast<std::size_t>(j)]);
      out.push_back(',');
      out += std::to_string(pt.degeneracy[static_cast<std::size_t>(j)]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  atomic_write_file(path, sweep_to_csv(sweep));
}

std::vector<SweepPoint> parse_sweep_csv(const std::string& text) {
  if (text.empty())
    throw IoError(std::string("sweep file is empty; expected header '") + kCsvHeader + "'");

  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& line : lines)
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (lines.empty())
    throw IoError(std::string("sweep file is empty; expected header '") + kCsvHeader + "'");

  if (lines[0] != kCsvHeader)
    throw IoError(std::string("sweep file schema mismatch: expected columns '") + kCsvHeader +
                  "', got '" + std::string(lines[0]) + "'");

  std::vector<SweepPoint> points;
  points.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(lines[li], ',');
    if (fields.size() != 15)
      throw IoError("sweep file line " + std::to_string(li + 1) + ": expected 15 fields, got " +
                    std::to_string(fields.size()));
    SweepPoint pt;
    pt.param = parse_field_double(fields[0], li + 1);
    pt.sp = parse_field_double(fields[1], li + 1);
    pt.concurrence = parse_field_double(fields[2], li + 1);
    pt.f_global = parse_field_double(fields[3], li + 1);
    pt.f_local = parse_field_double(fields[4], li + 1);
    pt.n_levels = 0;
    for (int j = 0; j < kLevelSlots; ++j) {
      pt.energy[static_cast<std::size_t>(j)] =
          parse_field_double(fields[static_cast<std::size_t>(5 + 2 * j)], li + 1);
      pt.degeneracy[static_cast<std::size_t>(j)] =
          parse_field_int(fields[static_cast<std::size_t>(6 + 2 * j)], li + 1);
      if (pt.degeneracy[static_cast<std::size_t>(j)] > 0 && pt.n_levels == j) pt.n_levels = j + 1;
    }
    points.push_back(pt);
  }
  return points;
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  return parse_sweep_csv(read_file(path));
}

std::string manifest_to_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["format"] = "spinqpt-run-manifest";
  j["schema_version"] = 1;
  j["library_version"] = manifest.library_version;
  j["wall_time_seconds"] = manifest.wall_time_seconds;
  j["config"] = config_to_json(manifest.config);
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "spinqpt-run-manifest")
      throw IoError("manifest format field is not 'spinqpt-run-manifest'");
    RunManifest m;
    m.library_version = j.at("library_version").get<std::string>();
    m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    m.config = config_from_json(j.at("config"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("manifest parse error: ") + e.what());
  }
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  atomic_write_file(path, manifest_to_json(manifest));
}

RunManifest read_manifest(const std::string& path) {
  return manifest_from_json(read_file(path));
}

}  // namespace spinqpt
