#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <random>

#include "spinqpt/mixture.hpp"

namespace spinqpt {

struct ConcurrenceResult {
  double value = 0.0;               // max(0, l1 - l2 - l3 - l4)
  std::array<double, 4> lambdas{};  // descending sqrt eigenvalues of rho*rho_tilde
};

// Single-qubit pure states defining a product state |a> (x) |b>.
struct ProductState {
  Eigen::Vector2cd a = Eigen::Vector2cd::Zero();
  Eigen::Vector2cd b = Eigen::Vector2cd::Zero();
};

struct LocalFidelityResult {
  double value = 0.0;
  ProductState optimizer;
  int restarts_used = 0;
  bool converged = false;
};

struct SharedPurityResult {
  double sp = 0.0;
  double f_global = 0.0;
  double f_local = 0.0;
  ProductState optimizer;
  int restarts_used = 0;
  bool converged = false;
};

// rho_tilde = (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y).
Eigen::Matrix4cd spin_flip(const TwoQubitState& rho);

// Wootters concurrence via the general (non-symmetric) eigenproblem of
// rho * rho_tilde; tiny negative eigenvalues above -1e-8 are clipped, below
// that is a NumericalError.
ConcurrenceResult concurrence(const TwoQubitState& rho);

// Largest eigenvalue of rho.
double global_fidelity(const TwoQubitState& rho);

// Max over product states of <ab|rho|ab> by alternating (see-saw)
// maximization: with |b> fixed the optimal |a> is the top eigenvector of a
// 2x2 conditioned matrix, and symmetrically. Runs 4 deterministic
// computational-basis starts plus `restarts` random starts drawn from rng;
// the objective is non-decreasing across half-steps (asserted). Throws
// NumericalError only if no start converges within 10000 alternations.
LocalFidelityResult local_fidelity(const TwoQubitState& rho, std::mt19937_64& rng,
                                   int restarts = 20, double tol = 1e-10);
LocalFidelityResult local_fidelity(const TwoQubitState& rho, int restarts = 20,
                                   double tol = 1e-10, std::uint64_t seed = 0x10ca1f1dULL);

// Sp = F_G - F_L (clamped at 0 against roundoff at the 1e-10 scale).
SharedPurityResult shared_purity(const TwoQubitState& rho, std::mt19937_64& rng,
                                 int restarts = 20, double tol = 1e-10);
SharedPurityResult shared_purity(const TwoQubitState& rho, int restarts = 20, double tol = 1e-10,
                                 std::uint64_t seed = 0x10ca1f1dULL);

// Positive partial transpose test (transpose on the second qubit); for two
// qubits PPT is equivalent to separability, i.e. to concurrence zero.
bool is_ppt(const TwoQubitState& rho, double tol = 1e-9);

}  // namespace spinqpt
