#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "spinqpt/eigensolver.hpp"

namespace spinqpt {

// Low-rank mixture of the lowest energy levels: the k-th level carries total
// weight e^{-k}/Z spread uniformly over its d_k degenerate eigenstates
// (term weight e^{-k}/(d_k Z)), with Z = sum_{k=0}^{K-1} e^{-k} over exactly
// the K retained levels. The 2^N x 2^N density matrix is never materialized.
struct LowLyingMixture {
  struct Term {
    double weight = 0.0;
    int level_index = 0;
    std::vector<double> vector;  // unit norm, length 2^N
  };
  std::vector<Term> terms;  // weights sum to 1
};

// Two-qubit reduced density matrix, row/column index = 2*q_a + q_b for the
// (site_a, site_b) pair in the sigma^z product basis.
struct TwoQubitState {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  std::pair<int, int> pair{0, 1};
};

// Mixture over levels 0..k_max (k_max+1 levels). Throws ConfigError if the
// spectrum holds fewer distinct levels than requested.
LowLyingMixture build_mixture(const LowSpectrum& spectrum, int k_max = 4);

// rho_nn = sum_t w_t Tr_{rest}(|v_t><v_t|), computed per pure term in
// O(2^N) time with O(1) extra reduced-state memory. Eigenvalues in
// (-1e-10, 0) are clipped to zero and the state renormalized; anything below
// -1e-10 raises NumericalError (that signals solver failure, not roundoff).
TwoQubitState reduce_to_pair(const LowLyingMixture& mix, std::pair<int, int> pair, int n_sites);

}  // namespace spinqpt
