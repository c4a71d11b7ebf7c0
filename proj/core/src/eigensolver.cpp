#include "spinqpt/eigensolver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spinqpt/errors.hpp"

namespace spinqpt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// CSR restricted to an invariant basis subset, rows/cols renumbered by the
// subset's ascending order.
struct SubCsr {
  std::size_t dim = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  void matvec(const double* x, double* y) const {
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        acc += val[k] * x[col[k]];
      y[i] = acc;
    }
  }
};

SubCsr extract_sector(const SparseHamiltonian& h, const std::vector<std::uint32_t>& idx,
                      std::vector<std::int32_t>& pos_scratch) {
  if (pos_scratch.size() != h.dim) pos_scratch.assign(h.dim, -1);
  for (std::size_t k = 0; k < idx.size(); ++k) pos_scratch[idx[k]] = static_cast<std::int32_t>(k);
  SubCsr s;
  s.dim = idx.size();
  s.row_ptr.reserve(s.dim + 1);
  s.row_ptr.push_back(0);
  for (std::uint32_t z : idx) {
    for (std::int64_t k = h.row_ptr[z]; k < h.row_ptr[z + 1]; ++k) {
      const std::int32_t p = pos_scratch[h.col[k]];
      if (p < 0)
        throw NumericalError("declared symmetry sector is not invariant under H (basis state " +
                             std::to_string(z) + " couples outside it)");
      s.col.push_back(static_cast<std::uint32_t>(p));
      s.val.push_back(h.val[k]);
    }
    s.row_ptr.push_back(static_cast<std::int64_t>(s.col.size()));
  }
  for (std::uint32_t z : idx) pos_scratch[z] = -1;  // restore scratch
  return s;
}

struct SectorResult {
  std::vector<double> energies;          // ascending
  std::vector<Eigen::VectorXd> vectors;  // sector-local coordinates
  bool complete = false;                 // all subdim states computed
};

SectorResult solve_dense(const SubCsr& a, int m) {
  const auto n = static_cast<Eigen::Index>(a.dim);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::int64_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      dense(i, static_cast<Eigen::Index>(a.col[k])) = a.val[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense symmetric eigensolver failed on a sector of dimension " +
                         std::to_string(a.dim));
  SectorResult r;
  const int take = std::min<int>(m, static_cast<int>(n));
  r.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + take);
  r.vectors.reserve(take);
  for (int i = 0; i < take; ++i) r.vectors.push_back(es.eigenvectors().col(i));
  r.complete = take == static_cast<int>(n);
  return r;
}

// Thick-restart block Lanczos with full reorthogonalization.
//
// The basis V and its image AV = A*V are both kept; the projected matrix
// T = V^T A V is maintained incrementally (one new column per appended basis
// vector; a restart V <- V*S_keep turns T into exactly diag(theta)).
// Residuals r_i = ||AV s_i - theta_i V s_i|| come straight from the cached
// image, so convergence checks cost no extra matvecs. After convergence a
// fresh random block is injected and the window re-checked, so a degenerate
// multiplet the current block missed gets one dedicated chance to surface
// before the result is accepted.
SectorResult solve_lanczos(const SubCsr& a, int m_want, const SolverOptions& opts,
                           std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(a.dim);
  const int b = std::max(1, std::min<int>(opts.block_size, static_cast<int>(n)));
  int max_basis = opts.max_basis > 0 ? opts.max_basis : std::max(4 * m_want + 2 * b, 128);
  max_basis = std::min<int>(max_basis, static_cast<int>(n));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uni(rng);
    return v;
  };

  Eigen::MatrixXd V(n, max_basis), AV(n, max_basis);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(max_basis, max_basis);
  int k = 0;
  long appended = 0;
  double best_resid = std::numeric_limits<double>::infinity();
  double stagnation_ref = std::numeric_limits<double>::infinity();
  int stagnant_restarts = 0;

  const double cluster_tol = 1e-7;  // never split a near-degenerate Ritz cluster

  // Orthogonalize w against the current basis (two classical Gram-Schmidt
  // passes), replacing a numerically dependent candidate by a random
  // direction (breakdown handling), then append it and extend T. The
  // candidate is normalized up front so the dependence test is scale-free:
  // a tiny residual direction is still a perfectly good expansion vector.
  auto append_vector = [&](Eigen::VectorXd w) -> bool {
    if (k >= max_basis) return false;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double n0 = w.norm();
      if (n0 > 0.0 && std::isfinite(n0)) {
        w /= n0;
        if (k > 0) {
          w.noalias() -= V.leftCols(k) * (V.leftCols(k).transpose() * w);
          w.noalias() -= V.leftCols(k) * (V.leftCols(k).transpose() * w);
        }
        const double nrm = w.norm();
        if (nrm > 1e-8) {
          w /= nrm;
          V.col(k) = w;
          a.matvec(V.col(k).data(), AV.col(k).data());
          T.col(k).head(k + 1).noalias() = V.leftCols(k + 1).transpose() * AV.col(k);
          T.row(k).head(k + 1) = T.col(k).head(k + 1);
          ++k;
          ++appended;
          return true;
        }
      }
      w = random_vector();  // breakdown: candidate lies in span(V)
    }
    return false;  // space exhausted
  };

  Eigen::VectorXd theta;
  Eigen::MatrixXd S;

  auto ritz = [&] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(k, k));
    theta = es.eigenvalues();
    S = es.eigenvectors();
  };

  auto residual = [&](int i) {
    Eigen::VectorXd rv = AV.leftCols(k) * S.col(i) - theta[i] * (V.leftCols(k) * S.col(i));
    return rv;
  };

  // Double the basis capacity in place (up to the sector dimension).
  auto grow_capacity = [&]() -> bool {
    const int new_cap = std::min<int>(max_basis * 2, static_cast<int>(n));
    if (new_cap == max_basis) return false;
    Eigen::MatrixXd V2(n, new_cap), AV2(n, new_cap);
    V2.leftCols(k) = V.leftCols(k);
    AV2.leftCols(k) = AV.leftCols(k);
    Eigen::MatrixXd T2 = Eigen::MatrixXd::Zero(new_cap, new_cap);
    T2.topLeftCorner(k, k) = T.topLeftCorner(k, k);
    V.swap(V2);
    AV.swap(AV2);
    T.swap(T2);
    max_basis = new_cap;
    return true;
  };

  // Compress to the leading Ritz vectors so a further block fits. The
  // compressed basis is re-orthonormalized and its image recomputed with
  // fresh matvecs: compression roundoff would otherwise accumulate across
  // restarts and floor the attainable residual above tight tolerances.
  // Refreshes (theta, S) from the exactly rebuilt projected matrix.
  auto restart_for_room = [&]() -> bool {
    if (k + b <= max_basis) return true;
    int keep = std::min(m_want + b, k - 1);
    while (keep < k - 1 &&
           theta[keep] - theta[keep - 1] <= cluster_tol * std::max(1.0, std::abs(theta[keep])))
      ++keep;
    keep = std::min(keep, max_basis - 2 * b);
    if (keep < m_want) {
      if (!grow_capacity())
        throw NumericalError("eigensolver: basis cap " + std::to_string(max_basis) +
                             " cannot hold the requested eigenpairs plus workspace");
      return true;
    }

    // Stagnation guard: several consecutive restarts without meaningful
    // residual progress means the Krylov runs between restarts are too
    // shallow; deepen them by doubling the basis.
    if (best_resid > 0.5 * stagnation_ref) {
      if (++stagnant_restarts >= 8) {
        stagnant_restarts = 0;
        if (grow_capacity()) {
          stagnation_ref = best_resid;
          return true;
        }
      }
    } else {
      stagnant_restarts = 0;
    }
    stagnation_ref = best_resid;

    Eigen::MatrixXd Vk = V.leftCols(k) * S.leftCols(keep);
    for (int j = 0; j < keep; ++j) {
      if (j > 0) {
        Vk.col(j).noalias() -= Vk.leftCols(j) * (Vk.leftCols(j).transpose() * Vk.col(j));
        Vk.col(j).noalias() -= Vk.leftCols(j) * (Vk.leftCols(j).transpose() * Vk.col(j));
      }
      const double nrm = Vk.col(j).norm();
      if (nrm < 0.5)  // S is orthogonal, so the compressed columns stay near unit norm
        throw NumericalError("eigensolver: restart basis lost orthogonality");
      Vk.col(j) /= nrm;
    }
    V.leftCols(keep) = Vk;
    for (int j = 0; j < keep; ++j) a.matvec(V.col(j).data(), AV.col(j).data());
    k = keep;
    T.topLeftCorner(max_basis, max_basis).setZero();
    T.topLeftCorner(k, k).noalias() = V.leftCols(k).transpose() * AV.leftCols(k);
    T.topLeftCorner(k, k) =
        ((T.topLeftCorner(k, k) + T.topLeftCorner(k, k).transpose()) / 2.0).eval();
    ritz();
    return true;
  };

  for (int i = 0; i < b && k < static_cast<int>(n); ++i) append_vector(random_vector());

  bool verification_pending = false;
  Eigen::VectorXd snapshot;

  while (true) {
    ritz();

    const int mm = std::min(m_want, k);
    bool all_converged = k >= m_want;
    double worst = 0.0;
    for (int i = 0; i < mm; ++i) {
      const double r = residual(i).norm();
      worst = std::max(worst, r);
      if (r > opts.tol * std::max(1.0, std::abs(theta[i]))) all_converged = false;
    }
    best_resid = std::min(best_resid, worst);

    if (all_converged) {
      if (verification_pending) {
        bool missed = false;
        for (int i = 0; i < m_want; ++i)
          if (theta[i] < snapshot[i] - opts.tol * std::max(1.0, std::abs(snapshot[i])) - 1e-12)
            missed = true;
        if (!missed) {
          SectorResult r;
          r.energies.resize(m_want);
          r.vectors.reserve(m_want);
          for (int i = 0; i < m_want; ++i) {
            r.energies[i] = theta[i];
            r.vectors.emplace_back(V.leftCols(k) * S.col(i));
            r.vectors.back().normalize();
          }
          r.complete = m_want == static_cast<int>(n);
          return r;
        }
        verification_pending = false;  // a lower state surfaced; keep going
      } else {
        snapshot = theta.head(m_want);
        verification_pending = true;
        restart_for_room();
        bool grew = false;
        for (int i = 0; i < b; ++i) grew |= append_vector(random_vector());
        if (grew) continue;
        // Space exhausted: the Ritz problem is exact, nothing can be missed.
        SectorResult r;
        r.energies.resize(m_want);
        r.vectors.reserve(m_want);
        for (int i = 0; i < m_want; ++i) {
          r.energies[i] = theta[i];
          r.vectors.emplace_back(V.leftCols(k) * S.col(i));
          r.vectors.back().normalize();
        }
        r.complete = m_want == static_cast<int>(n);
        return r;
      }
    }

    if (appended >= opts.max_iterations) {
      std::ostringstream msg;
      msg << "eigensolver: no convergence after " << appended << " basis vectors (m=" << m_want
          << ", dim=" << n << ", best residual " << best_resid << ")";
      throw NumericalError(msg.str());
    }

    restart_for_room();

    // Expansion block: residual directions of the lowest unconverged Ritz
    // pairs, padded with random directions (the padding also explores
    // degenerate subspaces the current block may have missed).
    std::vector<Eigen::VectorXd> block;
    for (int i = 0; i < k && static_cast<int>(block.size()) < b; ++i) {
      Eigen::VectorXd rv = residual(i);
      if (rv.norm() > opts.tol * std::max(1.0, std::abs(theta[i]))) block.push_back(std::move(rv));
    }
    while (static_cast<int>(block.size()) < b) block.push_back(random_vector());
    for (auto& w : block) append_vector(std::move(w));
  }
}

SectorResult solve_sector(const SparseHamiltonian& h, const std::vector<std::uint32_t>& idx,
                          int m, const SolverOptions& opts, std::uint64_t seed,
                          std::vector<std::int32_t>& pos_scratch) {
  SubCsr sub = extract_sector(h, idx, pos_scratch);
  const int m_s = std::min<int>(m, static_cast<int>(sub.dim));
  const bool dense =
      static_cast<int>(sub.dim) <= opts.dense_cutoff || 3 * m_s >= static_cast<int>(sub.dim);
  if (dense) return solve_dense(sub, m_s);
  return solve_lanczos(sub, m_s, opts, seed);
}

std::uint32_t complement_of(std::uint32_t z, int n_sites) {
  return ~z & ((std::uint32_t{1} << n_sites) - 1u);
}

// Index of the sector that sectors[s] maps onto under bit complement, or -1.
int mirror_partner(const std::vector<std::vector<std::uint32_t>>& sectors, int s, int n_sites) {
  const auto& src = sectors[s];
  if (src.empty()) return -1;
  const std::uint32_t probe = complement_of(src.front(), n_sites);
  for (int t = 0; t < static_cast<int>(sectors.size()); ++t) {
    const auto& dst = sectors[t];
    if (dst.size() != src.size()) continue;
    if (std::binary_search(dst.begin(), dst.end(), probe)) return t;
  }
  return -1;
}

struct SectorSolveSet {
  std::vector<SectorResult> results;  // sector-local, one per sector
  std::vector<int> solved_from;       // source sector index (mirror) or self
};

SectorSolveSet solve_all_sectors(const SparseHamiltonian& h,
                                 const std::vector<std::vector<std::uint32_t>>& sectors,
                                 bool complement_mirror, int m, const SolverOptions& opts) {
  SectorSolveSet set;
  const int ns = static_cast<int>(sectors.size());
  set.results.resize(ns);
  set.solved_from.assign(ns, -1);
  std::vector<std::int32_t> pos_scratch;

  for (int s = 0; s < ns; ++s) {
    if (set.solved_from[s] >= 0) continue;  // filled via mirror
    const std::uint64_t seed_s = splitmix64(opts.seed ^ (0x51ecULL + s));
    set.results[s] = solve_sector(h, sectors[s], m, opts, seed_s, pos_scratch);
    set.solved_from[s] = s;
    if (complement_mirror) {
      const int t = mirror_partner(sectors, s, h.n_sites);
      if (t > s && set.solved_from[t] < 0) {
        // The partner's spectrum is identical and its eigenvectors are the
        // complement-permuted images; the scatter step materializes them and
        // verifies one residual explicitly.
        set.results[t].energies = set.results[s].energies;
        set.results[t].complete = set.results[s].complete;
        set.solved_from[t] = s;
      }
    }
  }
  return set;
}

std::vector<double> scatter(const Eigen::VectorXd& sub, const std::vector<std::uint32_t>& idx,
                            std::size_t dim) {
  std::vector<double> full(dim, 0.0);
  for (std::size_t j = 0; j < idx.size(); ++j) full[idx[j]] = sub[static_cast<Eigen::Index>(j)];
  return full;
}

std::vector<double> scatter_complement(const Eigen::VectorXd& sub,
                                       const std::vector<std::uint32_t>& idx, std::size_t dim,
                                       int n_sites) {
  std::vector<double> full(dim, 0.0);
  for (std::size_t j = 0; j < idx.size(); ++j)
    full[complement_of(idx[j], n_sites)] = sub[static_cast<Eigen::Index>(j)];
  return full;
}

double residual_norm(const SparseHamiltonian& h, const std::vector<double>& v, double e) {
  std::vector<double> hv(h.dim);
  apply(h, v, hv);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.dim; ++i) {
    const double d = hv[i] - e * v[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

struct MergedPairs {
  std::vector<EigenPair> pairs;       // global lowest, ascending
  std::vector<double> sector_top;     // highest computed energy per sector
  std::vector<bool> sector_complete;  // full sector spectrum computed
};

MergedPairs merge_sectors(const SparseHamiltonian& h,
                          const std::vector<std::vector<std::uint32_t>>& sectors,
                          const SectorSolveSet& set, int m, const SolverOptions& opts) {
  struct Slot {
    double e;
    int sector;
    int rank;
  };
  std::vector<Slot> slots;
  const int ns = static_cast<int>(sectors.size());
  MergedPairs out;
  out.sector_top.assign(ns, -std::numeric_limits<double>::infinity());
  out.sector_complete.assign(ns, false);
  for (int s = 0; s < ns; ++s) {
    const auto& es = set.results[s].energies;
    for (int r = 0; r < static_cast<int>(es.size()); ++r) slots.push_back({es[r], s, r});
    if (!es.empty()) out.sector_top[s] = es.back();
    out.sector_complete[s] = set.results[s].complete;
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& x, const Slot& y) { return x.e < y.e; });
  if (static_cast<int>(slots.size()) > m) slots.resize(m);

  out.pairs.reserve(slots.size());
  std::vector<bool> mirror_checked(ns, false);
  for (const auto& sl : slots) {
    const int src = set.solved_from[sl.sector];
    EigenPair p;
    p.energy = sl.e;
    if (src == sl.sector) {
      p.vector = scatter(set.results[src].vectors[sl.rank], sectors[sl.sector], h.dim);
    } else {
      p.vector =
          scatter_complement(set.results[src].vectors[sl.rank], sectors[src], h.dim, h.n_sites);
      if (!mirror_checked[sl.sector]) {
        mirror_checked[sl.sector] = true;
        const double r = residual_norm(h, p.vector, p.energy);
        if (r > 10 * opts.tol * std::max(1.0, std::abs(p.energy)) && r > 1e-8)
          throw NumericalError(
              "complement-mirror symmetry violated: mirrored eigenvector residual " +
              std::to_string(r));
      }
    }
    out.pairs.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> whole_space(std::size_t dim) {
  std::vector<std::uint32_t> all(dim);
  for (std::size_t i = 0; i < dim; ++i) all[i] = static_cast<std::uint32_t>(i);
  return {std::move(all)};
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const SparseHamiltonian& h, int m,
                                         const SolverOptions& opts, const SpectralSymmetry* sym) {
  if (m < 1 || static_cast<std::size_t>(m) > h.dim)
    throw ConfigError("lowest_eigenpairs: m must satisfy 1 <= m <= dim");
  const auto sectors = sym ? sym->sectors : whole_space(h.dim);
  const bool mirror = sym ? sym->complement_mirror : false;
  auto set = solve_all_sectors(h, sectors, mirror, m, opts);
  return merge_sectors(h, sectors, set, m, opts).pairs;
}

LowSpectrum group_levels(std::vector<EigenPair> pairs, double tol_rel) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.energy < b.energy; });
  LowSpectrum out;
  out.levels_requested = static_cast<int>(pairs.size());
  std::size_t i = 0;
  while (i < pairs.size()) {
    const double anchor = pairs[i].energy;
    Level lev;
    double esum = 0.0;
    std::size_t j = i;
    while (j < pairs.size() &&
           std::abs(pairs[j].energy - anchor) <= tol_rel * std::max(1.0, std::abs(anchor))) {
      esum += pairs[j].energy;
      lev.basis.push_back(std::move(pairs[j].vector));
      ++j;
    }
    lev.degeneracy = static_cast<int>(j - i);
    lev.energy = esum / lev.degeneracy;
    // Re-orthonormalize within the level (modified Gram-Schmidt); the solver
    // returns an orthonormal set, so this is a numerical touch-up only.
    for (std::size_t a = 0; a < lev.basis.size(); ++a) {
      auto& va = lev.basis[a];
      for (std::size_t p = 0; p < a; ++p) {
        const auto& vb = lev.basis[p];
        double dot = 0.0;
        for (std::size_t t = 0; t < va.size(); ++t) dot += va[t] * vb[t];
        for (std::size_t t = 0; t < va.size(); ++t) va[t] -= dot * vb[t];
      }
      double nrm = 0.0;
      for (double x : va) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm < 1e-6)
        throw NumericalError("group_levels: degenerate level basis is numerically dependent");
      for (double& x : va) x /= nrm;
    }
    out.levels.push_back(std::move(lev));
    i = j;
  }
  return out;
}

LowSpectrum solve_spectrum(const SparseHamiltonian& h, int n_levels, const SolverOptions& opts,
                           int m0, const SpectralSymmetry* sym) {
  if (n_levels < 1) throw ConfigError("solve_spectrum: n_levels must be >= 1");
  const auto sectors = sym ? sym->sectors : whole_space(h.dim);
  const bool mirror = sym ? sym->complement_mirror : false;
  const double tol_rel = 1e-7;

  int m = std::min<int>(std::max(m0, n_levels + 1), static_cast<int>(h.dim));
  while (true) {
    auto set = solve_all_sectors(h, sectors, mirror, m, opts);
    auto merged = merge_sectors(h, sectors, set, m, opts);

    int total_computed = 0;
    for (const auto& r : set.results) total_computed += static_cast<int>(r.energies.size());
    const bool full = total_computed == static_cast<int>(h.dim);

    const auto sector_top = merged.sector_top;
    const auto sector_complete = merged.sector_complete;
    LowSpectrum grouped = group_levels(std::move(merged.pairs), tol_rel);

    bool resolved = full;
    if (!resolved && static_cast<int>(grouped.levels.size()) > n_levels) {
      // The (n_levels+1)-th group bounds the retained window from above;
      // every partially solved sector must have been explored past it,
      // otherwise a hidden state could still belong to the retained levels.
      const double boundary = grouped.levels[n_levels].energy;
      resolved = true;
      for (std::size_t s = 0; s < sectors.size(); ++s) {
        if (sector_complete[s]) continue;
        const double guard = tol_rel * std::max(1.0, std::abs(boundary));
        if (sector_top[s] <= boundary + guard) {
          resolved = false;
          break;
        }
      }
    }

    if (resolved) {
      if (static_cast<int>(grouped.levels.size()) > n_levels) grouped.levels.resize(n_levels);
      grouped.levels_requested = n_levels;
      return grouped;
    }
    if (m >= static_cast<int>(h.dim))
      throw NumericalError("solve_spectrum: could not resolve " + std::to_string(n_levels) +
                           " level boundaries below the full spectrum size");
    m = std::min<int>(static_cast<int>(h.dim), (m * 8) / 5 + 4);
  }
}

}  // namespace spinqpt
