#include "spinqpt/mixture.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "spinqpt/errors.hpp"

namespace spinqpt {

LowLyingMixture build_mixture(const LowSpectrum& spectrum, int k_max) {
  if (k_max < 0) throw ConfigError("build_mixture: k_max must be >= 0");
  const int K = k_max + 1;
  if (static_cast<int>(spectrum.levels.size()) < K)
    throw ConfigError("build_mixture: only " + std::to_string(spectrum.levels.size()) +
                      " distinct levels are resolvable but k_max=" + std::to_string(k_max) +
                      " requires " + std::to_string(K) + "; use a smaller k_max");
  double z = 0.0;
  for (int k = 0; k < K; ++k) z += std::exp(-static_cast<double>(k));

  LowLyingMixture mix;
  for (int k = 0; k < K; ++k) {
    const Level& lev = spectrum.levels[k];
    const double w = std::exp(-static_cast<double>(k)) / (lev.degeneracy * z);
    for (const auto& v : lev.basis) mix.terms.push_back({w, k, v});
  }
  return mix;
}

TwoQubitState reduce_to_pair(const LowLyingMixture& mix, std::pair<int, int> pair, int n_sites) {
  const auto [site_a, site_b] = pair;
  if (site_a == site_b) throw ConfigError("reduce_to_pair: sites must be distinct");
  if (site_a < 0 || site_a >= n_sites || site_b < 0 || site_b >= n_sites)
    throw ConfigError("reduce_to_pair: site index out of range for N=" + std::to_string(n_sites));

  const int pa = n_sites - 1 - site_a;  // bit position of site_a
  const int pb = n_sites - 1 - site_b;
  const int hi = std::max(pa, pb);
  const int lo = std::min(pa, pb);
  const std::size_t rest = std::size_t{1} << (n_sites - 2);
  const std::size_t dim = std::size_t{1} << n_sites;

  // z(l, r): insert the pair bits into the rest pattern r at positions lo, hi.
  const std::size_t low_mask = (std::size_t{1} << lo) - 1;
  const std::size_t mid_mask = (std::size_t{1} << (hi - 1)) - 1;

  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (const auto& term : mix.terms) {
    if (term.vector.size() != dim)
      throw ConfigError("reduce_to_pair: term vector length does not match N");
    const double* v = term.vector.data();
    Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
    for (std::size_t r = 0; r < rest; ++r) {
      const std::size_t base =
          ((r & ~mid_mask) << 2) | ((r & mid_mask & ~low_mask) << 1) | (r & low_mask);
      double a4[4];
      for (int l = 0; l < 4; ++l) {
        const std::size_t qa = static_cast<std::size_t>((l >> 1) & 1);
        const std::size_t qb = static_cast<std::size_t>(l & 1);
        a4[l] = v[base | (qa << pa) | (qb << pb)];
      }
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) local(i, j) += a4[i] * a4[j];
    }
    acc += term.weight * local;
  }

  TwoQubitState out;
  out.pair = pair;
  out.rho = acc.cast<std::complex<double>>();

  // Positivity policy: eigenvalues in (-1e-10, 0) are roundoff -> clip and
  // renormalize; below -1e-10 the upstream solve is broken.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(out.rho);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10)
    throw NumericalError("reduce_to_pair: reduced state eigenvalue " + std::to_string(min_eig) +
                         " below -1e-10 signals a solver failure");
  if (min_eig < 0.0) {
    Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    out.rho = es.eigenvectors() * clipped.cast<std::complex<double>>().asDiagonal() *
              es.eigenvectors().adjoint();
  }
  return out;
}

}  // namespace spinqpt
