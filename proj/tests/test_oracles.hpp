#pragma once

// Independent dense reference implementations used to cross-check the
// library: Kronecker-product Hamiltonians built from explicit Pauli
// matrices, full-density-matrix partial traces driven by bit arithmetic
// written from scratch, and closed-form values for analytically solvable
// states. Nothing here shares code with the library beyond its public types.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinqpt/lattice.hpp"
#include "spinqpt/mixture.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline Mat2 pauli_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 pauli_y() {
  Mat2 m;
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Mat2 pauli_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

inline Mat2 id2() { return Mat2::Identity(); }

// Kronecker chain with `op` at `site` and identities elsewhere. Site 0 is
// the leftmost (most significant) factor, matching the basis convention
// sigma^z|0> = +|0> with basis states ordered lexicographically.
inline Eigen::MatrixXcd site_op(int n_sites, int site, const Mat2& op) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (int s = 0; s < n_sites; ++s) {
    const Mat2 factor = (s == site) ? op : id2();
    Eigen::MatrixXcd next(acc.rows() * 2, acc.cols() * 2);
    for (int i = 0; i < acc.rows(); ++i)
      for (int j = 0; j < acc.cols(); ++j) next.block<2, 2>(2 * i, 2 * j) = acc(i, j) * factor;
    acc = std::move(next);
  }
  return acc;
}

inline Eigen::MatrixXcd two_site_op(int n_sites, int a, int b, const Mat2& op_a,
                                    const Mat2& op_b) {
  return site_op(n_sites, a, op_a) * site_op(n_sites, b, op_b);
}

// Dense model Hamiltonian assembled purely from Kronecker products:
//   Heisenberg: j1 * sum_nn (XX + YY + ZZ) + j2 * sum_nnn (XX + YY + ZZ)
//   TFIM:       -lambda * sum_nn XX + sum_i Z
inline Eigen::MatrixXcd dense_hamiltonian(const spinqpt::LatticeSpec& spec,
                                          const spinqpt::CouplingParams& params) {
  const int n = spec.sites;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto pairs = spinqpt::neighbor_pairs(spec);
  if (spec.model == spinqpt::Model::TfimChain) {
    for (const auto& [a, b] : pairs.nn)
      h -= params.lambda * two_site_op(n, a, b, pauli_x(), pauli_x());
    for (int s = 0; s < n; ++s) h += site_op(n, s, pauli_z());
  } else {
    auto add_bond = [&](int a, int b, double j) {
      h += j * two_site_op(n, a, b, pauli_x(), pauli_x());
      h += j * two_site_op(n, a, b, pauli_y(), pauli_y());
      h += j * two_site_op(n, a, b, pauli_z(), pauli_z());
    };
    for (const auto& [a, b] : pairs.nn) add_bond(a, b, params.j1);
    for (const auto& [a, b] : pairs.nnn) add_bond(a, b, params.j2);
  }
  return h;
}

// Full 2^N x 2^N density matrix of a low-lying mixture.
inline Eigen::MatrixXcd mixture_density(const spinqpt::LowLyingMixture& mix, int n_sites) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_sites);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : mix.terms) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = term.vector[static_cast<std::size_t>(i)];
    rho += term.weight * (v * v.adjoint());
  }
  return rho;
}

// Partial trace of a full density matrix down to sites (a, b); reduced
// index = 2*q_a + q_b. Site s occupies bit (n_sites - 1 - s). The traced
// sites are enumerated independently of any library helper.
inline Mat4 dense_pair_reduction(const Eigen::MatrixXcd& rho_full, int n_sites, int a, int b) {
  if (a == b) throw std::invalid_argument("dense_pair_reduction: sites must differ");
  std::vector<int> rest;
  for (int s = 0; s < n_sites; ++s)
    if (s != a && s != b) rest.push_back(s);

  auto full_index = [&](int qa, int qb, std::uint32_t rest_bits) {
    std::uint32_t z = 0;
    if (qa) z |= std::uint32_t{1} << (n_sites - 1 - a);
    if (qb) z |= std::uint32_t{1} << (n_sites - 1 - b);
    for (std::size_t r = 0; r < rest.size(); ++r)
      if (rest_bits & (std::uint32_t{1} << r)) z |= std::uint32_t{1} << (n_sites - 1 - rest[r]);
    return static_cast<Eigen::Index>(z);
  };

  const std::uint32_t rest_dim = std::uint32_t{1} << rest.size();
  Mat4 out = Mat4::Zero();
  for (int qa = 0; qa < 2; ++qa)
    for (int qb = 0; qb < 2; ++qb)
      for (int pa = 0; pa < 2; ++pa)
        for (int pb = 0; pb < 2; ++pb) {
          Complex acc = 0.0;
          for (std::uint32_t r = 0; r < rest_dim; ++r)
            acc += rho_full(full_index(qa, qb, r), full_index(pa, pb, r));
          out(2 * qa + qb, 2 * pa + pb) = acc;
        }
  return out;
}

// --- analytic two-qubit states -------------------------------------------

inline Vec4 bell_phi_plus() {
  Vec4 v = Vec4::Zero();
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v;
}

inline Vec4 bell_phi_minus() {
  Vec4 v = Vec4::Zero();
  v[0] = 1.0 / std::sqrt(2.0);
  v[3] = -1.0 / std::sqrt(2.0);
  return v;
}

inline Vec4 bell_psi_plus() {
  Vec4 v = Vec4::Zero();
  v[1] = v[2] = 1.0 / std::sqrt(2.0);
  return v;
}

inline Vec4 bell_psi_minus() {
  Vec4 v = Vec4::Zero();
  v[1] = 1.0 / std::sqrt(2.0);
  v[2] = -1.0 / std::sqrt(2.0);
  return v;
}

inline Mat4 pure_density(const Vec4& v) { return v * v.adjoint(); }

inline spinqpt::TwoQubitState make_state(const Mat4& rho) {
  spinqpt::TwoQubitState s;
  s.rho = rho;
  return s;
}

// Werner state p |Phi+><Phi+| + (1-p) I/4; concurrence max(0, (3p-1)/2).
inline Mat4 werner(double p) {
  return p * pure_density(bell_phi_plus()) + (1.0 - p) * 0.25 * Mat4::Identity();
}

inline double werner_concurrence(double p) { return std::max(0.0, (3.0 * p - 1.0) / 2.0); }

// Concurrence of a pure two-qubit state: 2 |c00 c11 - c01 c10|.
inline double pure_concurrence(const Vec4& v) { return 2.0 * std::abs(v[0] * v[3] - v[1] * v[2]); }

// Largest Schmidt weight of a pure two-qubit state (= local fidelity).
inline double schmidt_weight(const Vec4& v) {
  Mat2 red = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int ip = 0; ip < 2; ++ip)
      for (int j = 0; j < 2; ++j) red(i, ip) += v[2 * i + j] * std::conj(v[2 * ip + j]);
  Eigen::SelfAdjointEigenSolver<Mat2> es(red);
  return es.eigenvalues().maxCoeff();
}

// --- random state generators ---------------------------------------------

inline Vec4 random_pure(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec4 v;
  for (int i = 0; i < 4; ++i) v[i] = Complex(g(rng), g(rng));
  v.normalize();
  return v;
}

// Ginibre-induced random density matrix of the given rank.
inline Mat4 random_density(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd G(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) G(i, j) = Complex(g(rng), g(rng));
  Mat4 rho = G * G.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// Haar-ish random single-qubit unitary (QR of a Ginibre matrix).
inline Mat2 random_unitary2(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat2 G;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) G(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Mat2> qr(G);
  Mat2 Q = qr.householderQ();
  Mat2 R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) Q.col(i) *= R(i, i) / std::abs(R(i, i));
  return Q;
}

// --- brute-force bounds ---------------------------------------------------

// Lower bound on the local (product-state) fidelity: scan qubit a over an
// n_theta x n_phi Bloch grid; for each |a> the optimal |b> is the top
// eigenvector of the conditioned 2x2 matrix B(a)_{jk} = <a j| rho |a k>,
// so every grid value is an exactly attained product-state overlap.
inline double bloch_grid_local_fidelity(const Mat4& rho, int n_theta = 64, int n_phi = 64) {
  const double pi = std::acos(-1.0);
  double best = 0.0;
  for (int t = 0; t < n_theta; ++t) {
    const double theta = pi * t / (n_theta - 1);
    for (int p = 0; p < n_phi; ++p) {
      const double phi = 2.0 * pi * p / n_phi;
      Eigen::Vector2cd a;
      a << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
      Mat2 B = Mat2::Zero();
      for (int i = 0; i < 2; ++i)
        for (int ip = 0; ip < 2; ++ip)
          for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
              B(j, k) += std::conj(a[i]) * a[ip] * rho(2 * i + j, 2 * ip + k);
      Eigen::SelfAdjointEigenSolver<Mat2> es((B + B.adjoint()) / 2.0);
      best = std::max(best, es.eigenvalues().maxCoeff());
    }
  }
  return best;
}

// Minimum eigenvalue of the partial transpose on the second qubit.
inline double min_pt_eigenvalue(const Mat4& rho) {
  Mat4 pt;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int ip = 0; ip < 2; ++ip)
        for (int jp = 0; jp < 2; ++jp) pt(2 * i + j, 2 * ip + jp) = rho(2 * i + jp, 2 * ip + j);
  Eigen::SelfAdjointEigenSolver<Mat4> es((pt + pt.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

}  // namespace oracle
