#include "spinqpt/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "spinqpt/errors.hpp"

namespace spinqpt {

std::string model_name(Model m) {
  switch (m) {
    case Model::J1J2Chain: return "j1j2-1d";
    case Model::TfimChain: return "tfim";
    case Model::J1J2Square: return "j1j2-2d";
  }
  throw ConfigError("unknown model enum value");
}

Model model_from_name(const std::string& name) {
  if (name == "j1j2-1d") return Model::J1J2Chain;
  if (name == "tfim") return Model::TfimChain;
  if (name == "j1j2-2d") return Model::J1J2Square;
  throw ConfigError("unknown model '" + name + "' (expected j1j2-1d, tfim, or j1j2-2d)");
}

LatticeSpec LatticeSpec::chain(Model m, int n) {
  if (m == Model::J1J2Square) throw ConfigError("chain() called with square-lattice model");
  LatticeSpec s;
  s.model = m;
  s.sites = n;
  s.validate();
  return s;
}

LatticeSpec LatticeSpec::square(int rows, int cols) {
  LatticeSpec s;
  s.model = Model::J1J2Square;
  s.rows = rows;
  s.cols = cols;
  s.sites = rows * cols;
  s.validate();
  return s;
}

void LatticeSpec::validate() const {
  if (model == Model::J1J2Square) {
    if (rows < 2 || cols < 2)
      throw ConfigError("square lattice requires rows >= 2 and cols >= 2 (got " +
                        std::to_string(rows) + "x" + std::to_string(cols) + ")");
    if (sites != rows * cols)
      throw ConfigError("square lattice sites must equal rows*cols");
    if (sites > 24) throw ConfigError("lattice with " + std::to_string(sites) + " sites exceeds the 2^24 state-space capacity");
  } else {
    if (sites < 2 || sites > 20)
      throw ConfigError("chain length must satisfy 2 <= N <= 20 (got " + std::to_string(sites) + ")");
  }
}

double CouplingParams::alpha() const {
  if (j1 <= 0.0) throw ConfigError("alpha = j2/j1 requires j1 > 0");
  return j2 / j1;
}

void CouplingParams::validate(Model m) const {
  if (m == Model::TfimChain) {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  } else {
    if (j1 < 0.0 || j2 < 0.0) throw ConfigError("j1 and j2 must be >= 0");
  }
}

namespace {

SitePair normalized(int a, int b) { return a < b ? SitePair{a, b} : SitePair{b, a}; }

// Deduplicate unordered candidate pairs and drop self-pairs (wrapped bonds on
// the smallest lattices would otherwise be double-counted).
std::vector<SitePair> dedup(const std::vector<SitePair>& cand) {
  std::set<SitePair> seen;
  std::vector<SitePair> out;
  for (const auto& [a, b] : cand) {
    if (a == b) continue;
    auto p = normalized(a, b);
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

}  // namespace

NeighborPairs neighbor_pairs(const LatticeSpec& spec) {
  spec.validate();
  std::vector<SitePair> nn_cand, nnn_cand;
  if (spec.model == Model::J1J2Square) {
    const int R = spec.rows, C = spec.cols;
    auto idx = [C](int r, int c) { return r * C + c; };
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < C; ++c) {
        const int i = idx(r, c);
        nn_cand.emplace_back(i, idx(r, (c + 1) % C));
        nn_cand.emplace_back(i, idx((r + 1) % R, c));
        nnn_cand.emplace_back(i, idx((r + 1) % R, (c + 1) % C));
        nnn_cand.emplace_back(i, idx((r + 1) % R, (c - 1 + C) % C));
      }
  } else {
    const int N = spec.sites;
    for (int i = 0; i < N; ++i) {
      nn_cand.emplace_back(i, (i + 1) % N);
      nnn_cand.emplace_back(i, (i + 2) % N);
    }
  }
  return {dedup(nn_cand), dedup(nnn_cand)};
}

namespace {

// Row-by-row CSR assembly from bit-flip/phase bond rules. For a Heisenberg
// bond (i,j) with coupling J (Pauli convention, sigma.sigma):
//   equal bits     -> diagonal +J
//   opposite bits  -> diagonal -J and off-diagonal 2J to the double-flipped state
// For a TFIM xx bond with coupling c: off-diagonal c to the double-flipped
// state for every basis state; the field term contributes N - 2*popcount(z)
// on the diagonal.
struct BondRule {
  std::uint32_t mask;  // bits of the two sites
  double j;            // coupling
};

SparseHamiltonian assemble(const LatticeSpec& spec, const CouplingParams& params,
                           const NeighborPairs& pairs) {
  spec.validate();
  params.validate(spec.model);
  const int N = spec.sites;
  const std::size_t dim = std::size_t{1} << N;

  auto to_mask = [N](const SitePair& p) {
    return (std::uint32_t{1} << (N - 1 - p.first)) | (std::uint32_t{1} << (N - 1 - p.second));
  };

  std::vector<BondRule> heis, xx;
  bool field = false;
  if (spec.model == Model::TfimChain) {
    // Ferromagnetic xx coupling: -lambda * sigma^x_i sigma^x_j, plus unit
    // transverse field. The sign keeps the ring unfrustrated for odd N; for
    // even N it is related to the +lambda convention by a sublattice spin
    // rotation and has an identical spectrum.
    for (const auto& p : pairs.nn) xx.push_back({to_mask(p), -params.lambda});
    field = true;
  } else {
    for (const auto& p : pairs.nn) heis.push_back({to_mask(p), params.j1});
    for (const auto& p : pairs.nnn) heis.push_back({to_mask(p), params.j2});
  }

  SparseHamiltonian h;
  h.dim = dim;
  h.n_sites = N;
  h.row_ptr.assign(dim + 1, 0);
  h.col.reserve(dim * (1 + heis.size() / 2 + xx.size()));
  h.val.reserve(dim * (1 + heis.size() / 2 + xx.size()));

  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::uint32_t z = 0; z < dim; ++z) {
    row.clear();
    double diag = 0.0;
    if (field) diag += static_cast<double>(N) - 2.0 * std::popcount(z);
    for (const auto& b : heis) {
      const std::uint32_t bits = z & b.mask;
      if (bits == 0 || bits == b.mask) {
        diag += b.j;  // parallel spins
      } else {
        diag -= b.j;  // antiparallel: sigma^z part
        if (b.j != 0.0) row.emplace_back(z ^ b.mask, 2.0 * b.j);
      }
    }
    for (const auto& b : xx)
      if (b.j != 0.0) row.emplace_back(z ^ b.mask, b.j);
    row.emplace_back(z, diag);

    std::sort(row.begin(), row.end());
    // Merge duplicate columns (distinct bonds never produce the same flip
    // target here, but merging keeps the representation canonical).
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && h.col[h.row_ptr[z] + w - 1] == row[r].first) {
        h.val[h.row_ptr[z] + w - 1] += row[r].second;
      } else {
        h.col.push_back(row[r].first);
        h.val.push_back(row[r].second);
        ++w;
      }
    }
    h.row_ptr[z + 1] = static_cast<std::int64_t>(h.col.size());
  }
  return h;
}

}  // namespace

SparseHamiltonian build_hamiltonian(const LatticeSpec& spec, const CouplingParams& params) {
  return assemble(spec, params, neighbor_pairs(spec));
}

SparseHamiltonian build_hamiltonian_from_pairs(const LatticeSpec& spec,
                                               const CouplingParams& params,
                                               const NeighborPairs& pairs) {
  return assemble(spec, params, pairs);
}

void apply(const SparseHamiltonian& h, std::span<const double> v, std::span<double> out) {
  if (v.size() != h.dim || out.size() != h.dim)
    throw ConfigError("apply: vector length " + std::to_string(v.size()) +
                      " does not match Hamiltonian dimension " + std::to_string(h.dim));
  for (std::size_t i = 0; i < h.dim; ++i) {
    double acc = 0.0;  // fixed ascending-column order per row
    for (std::int64_t k = h.row_ptr[i]; k < h.row_ptr[i + 1]; ++k)
      acc += h.val[k] * v[h.col[k]];
    out[i] = acc;
  }
}

std::vector<double> apply(const SparseHamiltonian& h, std::span<const double> v) {
  std::vector<double> out(h.dim);
  apply(h, v, out);
  return out;
}

SpectralSymmetry spectral_symmetry(const LatticeSpec& spec) {
  spec.validate();
  const int N = spec.sites;
  const std::uint32_t dim = std::uint32_t{1} << N;
  SpectralSymmetry sym;
  if (spec.model == Model::TfimChain) {
    sym.sectors.assign(2, {});
    for (std::uint32_t z = 0; z < dim; ++z) sym.sectors[std::popcount(z) & 1].push_back(z);
    sym.complement_mirror = false;
  } else {
    sym.sectors.assign(N + 1, {});
    for (std::uint32_t z = 0; z < dim; ++z) sym.sectors[std::popcount(z)].push_back(z);
    sym.complement_mirror = true;
  }
  return sym;
}

std::vector<std::vector<std::uint32_t>> symmetry_sectors(const LatticeSpec& spec) {
  return spectral_symmetry(spec).sectors;
}

}  // namespace spinqpt
