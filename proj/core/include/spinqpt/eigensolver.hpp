#pragma once

#include <cstdint>
#include <vector>

#include "spinqpt/lattice.hpp"

namespace spinqpt {

struct EigenPair {
  double energy = 0.0;
  std::vector<double> vector;  // unit norm, length dim
};

struct Level {
  double energy = 0.0;
  int degeneracy = 0;
  std::vector<std::vector<double>> basis;  // orthonormal, degeneracy columns
};

struct LowSpectrum {
  std::vector<Level> levels;  // energies strictly ascending
  int levels_requested = 0;
};

struct SolverOptions {
  int block_size = 8;        // >= max expected degeneracy per symmetry sector
  int max_basis = 0;         // Krylov basis cap; 0 = auto from m and block_size
  double tol = 1e-10;        // residual tolerance, relative to max(1, |E|)
  long max_iterations = 10000;  // total basis vectors appended per sector solve
  std::uint64_t seed = 0x5eed0001ULL;
  int dense_cutoff = 400;    // subproblems at or below this order are solved densely
};

// Lowest m eigenpairs of h, sorted ascending. When `sym` is given, the solve
// runs per symmetry sector (and uses the complement mirror when declared);
// the result is identical up to degenerate-subspace rotation. Deterministic
// for a fixed seed. Throws NumericalError on non-convergence (message carries
// the best residual reached).
std::vector<EigenPair> lowest_eigenpairs(const SparseHamiltonian& h, int m,
                                         const SolverOptions& opts = {},
                                         const SpectralSymmetry* sym = nullptr);

// Group ascending eigenpairs into degenerate levels: energies within
// tol_rel * max(1, |E|) of the level's first energy merge; each level's basis
// is re-orthonormalized (modified Gram-Schmidt). No truncation.
LowSpectrum group_levels(std::vector<EigenPair> pairs, double tol_rel = 1e-7);

// The n_levels lowest distinct energy levels with complete degenerate bases.
// Solves with m0 requested pairs and re-invokes the solver with larger m until
// the boundary of the last retained level is resolved (either a further level
// is visible above it in every sector, or the full spectrum was computed).
// If the whole spectrum holds fewer than n_levels distinct levels, returns
// them all (levels_requested still records the request).
LowSpectrum solve_spectrum(const SparseHamiltonian& h, int n_levels = 5,
                           const SolverOptions& opts = {}, int m0 = 24,
                           const SpectralSymmetry* sym = nullptr);

}  // namespace spinqpt
