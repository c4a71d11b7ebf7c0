#include "spinqpt/measures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "spinqpt/errors.hpp"

namespace spinqpt {

namespace {

Eigen::Matrix4cd sigma_y_pair() {
  // sigma_y (x) sigma_y: real antidiagonal (-1, 1, 1, -1).
  Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
  s(0, 3) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 0) = -1.0;
  return s;
}

// Top eigenvector of a 2x2 Hermitian matrix along with its eigenvalue.
std::pair<double, Eigen::Vector2cd> top_eigpair2(const Eigen::Matrix2cd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
  return {es.eigenvalues()(1), es.eigenvectors().col(1)};
}

}  // namespace

Eigen::Matrix4cd spin_flip(const TwoQubitState& rho) {
  static const Eigen::Matrix4cd yy = sigma_y_pair();
  return yy * rho.rho.conjugate() * yy;
}

ConcurrenceResult concurrence(const TwoQubitState& rho) {
  const Eigen::Matrix4cd m = rho.rho * spin_flip(rho);
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalError("concurrence: eigensolver failed on rho*rho_tilde");

  std::array<double, 4> ev{};
  for (int i = 0; i < 4; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-8)
      throw NumericalError("concurrence: rho*rho_tilde eigenvalue has imaginary part " +
                           std::to_string(z.imag()));
    double re = z.real();
    if (re < -1e-8)
      throw NumericalError("concurrence: rho*rho_tilde eigenvalue " + std::to_string(re) +
                           " below -1e-8");
    ev[i] = std::max(re, 0.0);
  }
  ConcurrenceResult out;
  for (int i = 0; i < 4; ++i) out.lambdas[i] = std::sqrt(ev[i]);
  std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
  out.value = std::max(0.0, out.lambdas[0] - out.lambdas[1] - out.lambdas[2] - out.lambdas[3]);
  return out;
}

double global_fidelity(const TwoQubitState& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.rho);
  return es.eigenvalues().maxCoeff();
}

namespace {

// <a (x) b | rho | a (x) b>, real by Hermiticity.
double product_fidelity(const Eigen::Matrix4cd& rho, const Eigen::Vector2cd& a,
                        const Eigen::Vector2cd& b) {
  Eigen::Vector4cd ab;
  ab << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return std::real(ab.dot(rho * ab));  // Eigen dot conjugates the left argument
}

// Conditioned matrix for the a-update: M_a[i,i'] = sum_{j,j'} conj(b_j)
// rho[(i j),(i' j')] b_{j'}; its top eigenvector is the optimal |a> for
// fixed |b>. Index convention: row = 2*i + j.
Eigen::Matrix2cd conditioned_a(const Eigen::Matrix4cd& rho, const Eigen::Vector2cd& b) {
  Eigen::Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int ip = 0; ip < 2; ++ip) {
      std::complex<double> acc = 0.0;
      for (int j = 0; j < 2; ++j)
        for (int jp = 0; jp < 2; ++jp)
          acc += std::conj(b(j)) * rho(2 * i + j, 2 * ip + jp) * b(jp);
      m(i, ip) = acc;
    }
  return m;
}

Eigen::Matrix2cd conditioned_b(const Eigen::Matrix4cd& rho, const Eigen::Vector2cd& a) {
  Eigen::Matrix2cd m;
  for (int j = 0; j < 2; ++j)
    for (int jp = 0; jp < 2; ++jp) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int ip = 0; ip < 2; ++ip)
          acc += std::conj(a(i)) * rho(2 * i + j, 2 * ip + jp) * a(ip);
      m(j, jp) = acc;
    }
  return m;
}

struct SeesawOutcome {
  double value;
  ProductState opt;
  bool converged;
};

SeesawOutcome seesaw_from(const Eigen::Matrix4cd& rho, ProductState start, double tol,
                          int max_alternations) {
  double obj = product_fidelity(rho, start.a, start.b);
  ProductState cur = start;
  bool converged = false;
  for (int it = 0; it < max_alternations; ++it) {
    auto [va, a_new] = top_eigpair2(conditioned_a(rho, cur.b));
    if (va < obj - 1e-12)
      throw NumericalError("local_fidelity: see-saw objective decreased (a-step)");
    cur.a = a_new;
    auto [vb, b_new] = top_eigpair2(conditioned_b(rho, cur.a));
    if (vb < va - 1e-12)
      throw NumericalError("local_fidelity: see-saw objective decreased (b-step)");
    cur.b = b_new;
    if (vb - obj < tol) {
      obj = vb;
      converged = true;
      break;
    }
    obj = vb;
  }
  return {obj, cur, converged};
}

}  // namespace

LocalFidelityResult local_fidelity(const TwoQubitState& rho, std::mt19937_64& rng, int restarts,
                                   double tol) {
  if (restarts < 1) throw ConfigError("local_fidelity: restarts must be >= 1");
  constexpr int kMaxAlternations = 5000;  // a+b rounds; 10000 half-step alternations

  std::vector<ProductState> starts;
  const Eigen::Vector2cd e0(1.0, 0.0), e1(0.0, 1.0);
  starts.push_back({e0, e0});
  starts.push_back({e0, e1});
  starts.push_back({e1, e0});
  starts.push_back({e1, e1});
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_qubit = [&] {
    Eigen::Vector2cd v;
    v << std::complex<double>(gauss(rng), gauss(rng)), std::complex<double>(gauss(rng), gauss(rng));
    return v.normalized().eval();
  };
  for (int r = 0; r < restarts; ++r) starts.push_back({random_qubit(), random_qubit()});

  LocalFidelityResult out;
  out.restarts_used = static_cast<int>(starts.size());
  bool any_converged = false;
  double best = -1.0;
  ProductState best_opt;
  bool best_converged = false;
  for (const auto& s : starts) {
    const auto run = seesaw_from(rho.rho, s, tol, kMaxAlternations);
    any_converged = any_converged || run.converged;
    if (run.value > best) {
      best = run.value;
      best_opt = run.opt;
      best_converged = run.converged;
    }
  }
  if (!any_converged)
    throw NumericalError("local_fidelity: no see-saw start converged in 10000 alternations; best value " +
                         std::to_string(best));
  out.value = best;
  out.optimizer = best_opt;
  out.converged = best_converged;
  return out;
}

LocalFidelityResult local_fidelity(const TwoQubitState& rho, int restarts, double tol,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return local_fidelity(rho, rng, restarts, tol);
}

SharedPurityResult shared_purity(const TwoQubitState& rho, std::mt19937_64& rng, int restarts,
                                 double tol) {
  const double fg = global_fidelity(rho);
  const auto fl = local_fidelity(rho, rng, restarts, tol);
  double sp = fg - fl.value;
  if (sp < 0.0) {
    // F_L <= F_G holds exactly (product states are a subset of pure states);
    // only roundoff can produce a tiny negative difference.
    if (sp < -1e-9)
      throw NumericalError("shared_purity: F_L exceeds F_G by " + std::to_string(-sp));
    sp = 0.0;
  }
  SharedPurityResult out;
  out.sp = sp;
  out.f_global = fg;
  out.f_local = fl.value;
  out.optimizer = fl.optimizer;
  out.restarts_used = fl.restarts_used;
  out.converged = fl.converged;
  return out;
}

SharedPurityResult shared_purity(const TwoQubitState& rho, int restarts, double tol,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return shared_purity(rho, rng, restarts, tol);
}

bool is_ppt(const TwoQubitState& rho, double tol) {
  // Partial transpose on qubit b: PT[(i j),(i' j')] = rho[(i j'),(i' j)].
  Eigen::Matrix4cd pt;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int ip = 0; ip < 2; ++ip)
        for (int jp = 0; jp < 2; ++jp)
          pt(2 * i + j, 2 * ip + jp) = rho.rho(2 * i + jp, 2 * ip + j);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace spinqpt
