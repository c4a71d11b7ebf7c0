#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinqpt {

enum class Model { J1J2Chain, TfimChain, J1J2Square };

std::string model_name(Model m);
Model model_from_name(const std::string& name);  // throws ConfigError

// Lattice geometry. Chains are rings of `sites` spins; the square lattice is
// rows x cols with periodic wraparound in both directions and sites indexed
// row-major (index = row*cols + col). Boundary conditions are periodic
// everywhere, by construction.
struct LatticeSpec {
  Model model = Model::J1J2Chain;
  int sites = 0;     // chains: ring length; square: rows*cols (derived)
  int rows = 0;      // square lattice only
  int cols = 0;      // square lattice only

  static LatticeSpec chain(Model m, int n);
  static LatticeSpec square(int rows, int cols);

  void validate() const;  // throws ConfigError on violation
};

// Couplings. Heisenberg models use j1/j2 (alpha = j2/j1); the transverse-field
// Ising chain uses lambda (xx coupling over field strength).
struct CouplingParams {
  double j1 = 1.0;
  double j2 = 0.0;
  double lambda = 0.0;

  double alpha() const;  // j2/j1; throws ConfigError when j1 <= 0
  void validate(Model m) const;
};

using SitePair = std::pair<int, int>;

struct NeighborPairs {
  std::vector<SitePair> nn;   // nearest neighbors
  std::vector<SitePair> nnn;  // next-nearest neighbors
};

// Deduplicated unordered neighbor pair lists (each physical bond appears once,
// self-pairs dropped). For chains nn = (i, i+1 mod N) and nnn = (i, i+2 mod N);
// for the square lattice nn = horizontal+vertical wrapped neighbors and
// nnn = both diagonals.
NeighborPairs neighbor_pairs(const LatticeSpec& spec);

// Real symmetric sparse Hamiltonian in CSR form over the 2^N computational
// sigma^z product basis. Convention: sigma^z|0> = +|0>, basis states ordered
// lexicographically with site 0 the most significant bit.
struct SparseHamiltonian {
  std::size_t dim = 0;
  int n_sites = 0;
  std::vector<std::int64_t> row_ptr;  // size dim+1
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }
};

// Build the model Hamiltonian (Pauli matrices, not spin-1/2 operators):
//   J1J2Chain / J1J2Square:  j1 * sum_nn sigma_i.sigma_j + j2 * sum_nnn sigma_i.sigma_j
//   TfimChain:               -lambda * sum_nn sigma^x_i sigma^x_j + sum_i sigma^z_i
// The ferromagnetic xx sign keeps odd rings unfrustrated; for even rings it
// is unitarily equivalent to the +lambda convention (sublattice rotation).
// Bonds are the deduplicated pair lists from neighbor_pairs.
SparseHamiltonian build_hamiltonian(const LatticeSpec& spec, const CouplingParams& params);

// As build_hamiltonian but over explicit pair lists; used by translation
// invariance tests which rotate the bond lists.
SparseHamiltonian build_hamiltonian_from_pairs(const LatticeSpec& spec,
                                               const CouplingParams& params,
                                               const NeighborPairs& pairs);

// out = H*v with a fixed (row-major, ascending column) summation order.
void apply(const SparseHamiltonian& h, std::span<const double> v, std::span<double> out);
std::vector<double> apply(const SparseHamiltonian& h, std::span<const double> v);

// Symmetry structure the eigensolver may exploit; correctness never depends
// on it. `sectors` are basis-index subsets preserved by the Hamiltonian:
// total-S^z sectors (fixed popcount) for the Heisenberg models, spin-flip
// parity sectors (popcount mod 2) for the TFIM. Indices ascend within each
// sector and the sectors partition 0..2^N-1. `complement_mirror` marks the
// global spin flip z -> ~z as a spectrum-preserving symmetry mapping sector
// popcount p onto N-p (true for the Heisenberg models, false for the TFIM,
// whose field term changes sign under it).
struct SpectralSymmetry {
  std::vector<std::vector<std::uint32_t>> sectors;
  bool complement_mirror = false;
};

SpectralSymmetry spectral_symmetry(const LatticeSpec& spec);
std::vector<std::vector<std::uint32_t>> symmetry_sectors(const LatticeSpec& spec);

}  // namespace spinqpt
