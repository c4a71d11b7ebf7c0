#pragma once

#include <string>
#include <vector>

#include "spinqpt/config.hpp"
#include "spinqpt/sweep.hpp"

namespace spinqpt {

// Fixed sweep CSV schema. Floating-point columns carry 17 significant digits,
// lines end in LF, formatting is locale-independent. Level slots beyond the
// number of retained levels hold energy 0 with degeneracy 0.
inline constexpr const char* kCsvHeader =
    "param,sp,concurrence,f_global,f_local,e0,d0,e1,d1,e2,d2,e3,d3,e4,d4";

// Whole-file helpers; writes go to a temporary file in the same directory
// followed by an atomic rename.
std::string read_file(const std::string& path);
void atomic_write_file(const std::string& path, const std::string& content);

std::string sweep_to_csv(const SweepResult& sweep);
void write_sweep_csv(const SweepResult& sweep, const std::string& path);

// Parse a sweep CSV. The header must match kCsvHeader exactly; a mismatch
// raises IoError carrying the column-list difference.
std::vector<SweepPoint> parse_sweep_csv(const std::string& text);
std::vector<SweepPoint> read_sweep_csv(const std::string& path);

// Run manifest: everything needed to regenerate a sweep file bit-identically
// (full config echo including seeds), plus provenance (library version,
// wall time).
struct RunManifest {
  RunConfig config;
  std::string library_version = kLibraryVersion;
  double wall_time_seconds = 0.0;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

}  // namespace spinqpt
