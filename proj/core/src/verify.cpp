#include "ifsm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "ifsm/config.hpp"
#include "ifsm/data.hpp"
#include "ifsm/errors.hpp"
#include "ifsm/eval.hpp"
#include "ifsm/experiment.hpp"
#include "ifsm/linalg.hpp"
#include "ifsm/model.hpp"
#include "ifsm/offline.hpp"
#include "ifsm/rng.hpp"

namespace ifsm {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

// Collects the worst observed value against a bound.
class Tally {
 public:
  explicit Tally(std::string label) : label_(std::move(label)) {}
  void fail(const std::string& why) {
    if (first_failure_.empty()) first_failure_ = why;
  }
  void observe(double v) { worst_ = std::max(worst_, v); }
  Outcome done(double bound) const {
    std::ostringstream os;
    os << std::setprecision(3) << label_ << " worst=" << worst_ << " bound=" << bound;
    if (!first_failure_.empty()) os << "; " << first_failure_;
    return {first_failure_.empty() && worst_ < bound, os.str()};
  }

 private:
  std::string label_;
  std::string first_failure_;
  double worst_ = 0.0;
};

constexpr std::uint64_t kSeed = 20240611;

const Task kTasks[] = {Task::PSP, Task::PSW};
const Variant kVariants[] = {Variant::IterationFree, Variant::ExactInverse};

std::string pair_name(Task task, Variant variant) {
  return std::string(to_string(task)) + "/" + std::string(to_string(variant));
}

Matrix random_symmetric(std::size_t n, double scale, RngStream& rng) {
  Matrix a = random_normal_matrix(n, n, scale, rng);
  a.symmetrize();
  return a;
}

// Symmetric, zero diagonal, unit Frobenius norm.
Matrix random_hollow(std::size_t n, RngStream& rng) {
  Matrix e = random_symmetric(n, 1.0, rng);
  for (std::size_t i = 0; i < n; ++i) e(i, i) = 0.0;
  e *= 1.0 / e.frobenius_norm();
  return e;
}

Matrix leading_columns(const Matrix& a, std::size_t k) {
  Matrix out(a.rows(), k);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) out(i, j) = a(i, j);
  return out;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log10(x[i]) / n;
    my += std::log10(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log10(x[i]) - mx;
    sxy += dx * (std::log10(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Outcome in_range(const std::string& label, double v, double lo, double hi) {
  std::ostringstream os;
  os << std::setprecision(4) << label << "=" << v << " range=[" << lo << ", " << hi << "]";
  return {v >= lo && v <= hi, os.str()};
}

// ------------------------------------------------------------------ linalg

Outcome sym_eig_reconstruction() {
  RngStream rng(kSeed, 1);
  Tally tally("reconstruction error");
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      Matrix a = random_symmetric(n, 1.0, rng);
      a *= 10.0 * rng.uniform() / std::max(1e-300, a.frobenius_norm());
      const linalg::SymEig e = linalg::sym_eig(a);
      const Matrix rec = e.vectors * DiagonalMatrix(e.values) * e.vectors.transpose();
      tally.observe((rec - a).frobenius_norm());
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (e.values[i] < e.values[i + 1]) tally.fail("eigenvalues not descending");
    }
  }
  return tally.done(1e-9);
}

Outcome svd_ordering() {
  RngStream rng(kSeed, 2);
  Tally tally("reconstruction error");
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 1; n <= 8; ++n) {
      Matrix a = random_normal_matrix(m, n, 1.0, rng);
      if ((m + n) % 3 == 0 && n > 1) a.set_column(n - 1, a.column(0));  // rank-deficient case
      const linalg::Svd d = linalg::svd_small(a);
      for (std::size_t i = 0; i < d.s.size(); ++i) {
        if (d.s[i] < 0.0) tally.fail("negative singular value");
        if (i + 1 < d.s.size() && d.s[i] < d.s[i + 1]) tally.fail("singular values not nonincreasing");
      }
      const Matrix rec = d.u * DiagonalMatrix(d.s) * d.v.transpose();
      tally.observe((rec - a).frobenius_norm());
    }
  }
  return tally.done(1e-9);
}

Outcome qr_determinism() {
  RngStream rng(kSeed, 3);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_normal_matrix(9, 6, 1.0, rng);
    const linalg::Qr first = linalg::qr(a);
    const linalg::Qr second = linalg::qr(a);
    if (!(first.q == second.q)) return {false, "two runs produced different q"};
    for (std::size_t i = 0; i < first.r.rows(); ++i)
      if (first.r(i, i) < 0.0) return {false, "negative diagonal in r"};
  }
  return {true, "10 inputs, bit-identical q"};
}

Outcome solve_agreement() {
  RngStream rng(kSeed, 4);
  Tally tally("solve vs eigen-inverse");
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix q = haar_orthogonal(10, rng);
    DiagonalMatrix d(10);
    for (std::size_t i = 0; i < 10; ++i) d[i] = 1.0 + rng.uniform();
    Matrix a = q * d * q.transpose();
    a.symmetrize();
    Vector b(10);
    for (std::size_t i = 0; i < 10; ++i) b[i] = rng.normal();
    const Vector x = linalg::solve_symmetric(a, b);
    const linalg::SymEig e = linalg::sym_eig(a);
    const Vector ref = e.vectors * (DiagonalMatrix(e.values).inverse() * (e.vectors.transpose() * b));
    tally.observe((x - ref).norm());
  }
  return tally.done(1e-9);
}

// ------------------------------------------------------------------- model

ModelState random_state(std::size_t k, std::size_t n, double coupling, RngStream& rng) {
  Matrix m = Matrix::identity(k);
  m += coupling * random_hollow(k, rng);
  for (std::size_t i = 0; i < k; ++i) m(i, i) += 0.5 * rng.uniform();
  std::vector<double> lam(k);
  for (std::size_t i = 0; i < k; ++i) lam[i] = 1.0 - 0.5 * static_cast<double>(i) / k;
  return ModelState(std::move(m), random_normal_matrix(k, n, 1.0, rng), DiagonalMatrix(lam), 0.5);
}

Vector random_vector(std::size_t n, RngStream& rng) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Outcome symmetry_preservation() {
  RngStream rng(kSeed, 10);
  for (int rep = 0; rep < 50; ++rep) {
    const ModelState s = random_state(4, 7, 0.3, rng);
    const Vector x = random_vector(7, rng);
    const Vector y = random_vector(4, rng);
    for (Task task : kTasks) {
      const ModelState next = plasticity(s, x, y, 0.01, task);
      if (next.m().asymmetry() != 0.0) return {false, "updated M not exactly symmetric"};
    }
  }
  return {true, "100 updates, exact symmetry"};
}

Outcome two_step_equivalence() {
  RngStream rng(kSeed, 11);
  Tally tally("relative deviation");
  for (int rep = 0; rep < 50; ++rep) {
    const ModelState s = random_state(5, 8, 0.2, rng);
    const Vector x = random_vector(8, rng);
    const DiagonalSplit parts = split_diag(s.m());
    const DiagonalMatrix d_inv = parts.diagonal.inverse();
    const Matrix assembled = (Matrix::identity(5) - d_inv * parts.off_diagonal) * (d_inv * s.w());
    const Vector ref = assembled * x;
    const Vector y = forward(s, x, Variant::IterationFree);
    tally.observe((y - ref).norm() / ref.norm());
  }
  return tally.done(1e-13);
}

Outcome approximation_order() {
  RngStream rng(kSeed, 12);
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3};
  double lo = 1e9, hi = -1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix e = random_hollow(5, rng);
    const Matrix w = random_normal_matrix(5, 8, 1.0, rng);
    const Vector x = random_vector(8, rng);
    std::vector<double> rel;
    for (double ep : eps) {
      const ModelState s(Matrix::identity(5) + ep * e, w, DiagonalMatrix{1.0, 0.9, 0.8, 0.7, 0.6}, 1.0);
      const Vector exact = forward(s, x, Variant::ExactInverse);
      rel.push_back((forward(s, x, Variant::IterationFree) - exact).norm() / exact.norm());
    }
    const double slope = fitted_slope(eps, rel);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  std::ostringstream os;
  os << std::setprecision(4) << "slopes in [" << lo << ", " << hi << "], required [1.8, 2.2]";
  return {lo >= 1.8 && hi <= 2.2, os.str()};
}

Outcome cost_contract() {
  // The two-step pass needs only the diagonal of M to be invertible; a
  // singular M is fine there and must be rejected by the exact solve.
  const ModelState s(Matrix{{1.0, 1.0}, {1.0, 1.0}}, Matrix{{1.0, 0.0, 2.0}, {0.5, 1.0, 0.0}},
                     DiagonalMatrix{1.0, 0.5}, 1.0);
  const Vector x{1.0, -1.0, 0.5};
  const Vector y = forward(s, x, Variant::IterationFree);
  if (!y.all_finite()) return {false, "two-step output not finite"};
  try {
    (void)forward(s, x, Variant::ExactInverse);
  } catch (const SingularMatrix&) {
    return {true, "two-step pass avoids any K×K solve"};
  }
  return {false, "exact solve accepted a singular M"};
}

Outcome lambda_ordering() {
  const Matrix w(3, 4, 0.1);
  const DiagonalMatrix bad[] = {{0.7, 0.85, 1.0}, {1.0, 1.0, 0.5}, {1.0, 0.5, 0.5}, {1.0, 0.5, -0.1}};
  for (const auto& lam : bad) {
    try {
      (void)ModelState::with_scaled_identity(1.0, w, lam, 1.0);
      return {false, "non-decreasing Λ accepted"};
    } catch (const InvalidState&) {
    }
  }
  (void)ModelState::with_scaled_identity(1.0, w, DiagonalMatrix{1.0, 0.85, 0.7}, 1.0);
  return {true, "4 invalid orderings rejected"};
}

// ----------------------------------------------------------------- offline

struct Problem {
  Matrix g;
  GroundTruth truth;
};

Problem small_covariance(RngStream& rng) {
  const ProblemPreset p = small_problem();
  Matrix g = build_covariance(random_covariance(p.spectrum, rng));
  GroundTruth truth = ground_truth(g, p.k);
  return {std::move(g), std::move(truth)};
}

DiagonalMatrix random_signs(std::size_t k, RngStream& rng) {
  DiagonalMatrix s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return s;
}

Outcome fixed_point_certification() {
  RngStream rng(kSeed, 20);
  const ProblemPreset p = small_problem();
  Tally tally("residual");
  for (int rep = 0; rep < 20; ++rep) {
    const Problem prob = small_covariance(rng);
    const DiagonalMatrix signs = random_signs(p.k, rng);
    for (Task task : kTasks)
      for (Variant variant : kVariants) {
        const ModelState fp = construct_fixed_point(prob.g, p.lambda, task, signs, p.tau(task));
        tally.observe(fixed_point_residual(fp, prob.g, task, variant));
      }
  }
  return tally.done(1e-10);
}

Outcome stability_dichotomy(bool inject) {
  RngStream rng(kSeed, 21);
  const ProblemPreset p = small_problem();
  const std::vector<std::vector<std::size_t>> permuted = {{1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {0, 1, 3}};
  double worst_stable = -1e300;
  double weakest_unstable = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const Problem prob = small_covariance(rng);
    const DiagonalMatrix signs = random_signs(p.k, rng);
    for (Task task : kTasks)
      for (Variant variant : kVariants) {
        const std::vector<std::size_t> correct = inject ? permuted[static_cast<std::size_t>(rep)]
                                                        : std::vector<std::size_t>{};
        const ModelState fp = construct_fixed_point(prob.g, p.lambda, task, signs, p.tau(task), correct);
        worst_stable = std::max(worst_stable, jacobian_spectrum(fp, prob.g, task, variant).front());
        for (const auto& a : permuted) {
          const ModelState bad = construct_fixed_point(prob.g, p.lambda, task, signs, p.tau(task), a);
          weakest_unstable = std::min(weakest_unstable, jacobian_spectrum(bad, prob.g, task, variant).front());
        }
      }
  }
  std::ostringstream os;
  os << std::setprecision(3) << "ordered max Re=" << worst_stable << " (need < -1e-6), permuted min of max Re="
     << weakest_unstable << " (need > 1e-6)";
  if (worst_stable >= -1e-6) os << "; positive eigenvalue at a fixed point treated as stable";
  return {worst_stable < -1e-6 && weakest_unstable > 1e-6, os.str()};
}

Outcome linearization_agreement() {
  RngStream rng(kSeed, 22);
  const ProblemPreset p = small_problem();
  Tally tally("relative spectral deviation");
  for (int rep = 0; rep < 3; ++rep) {
    const Problem prob = small_covariance(rng);
    for (Task task : kTasks) {
      const ModelState fp = construct_fixed_point(prob.g, p.lambda, task, DiagonalMatrix::identity(p.k), p.tau(task));
      const auto a = jacobian_spectrum(fp, prob.g, task, Variant::IterationFree);
      const auto b = jacobian_spectrum(fp, prob.g, task, Variant::ExactInverse);
      double scale = 0.0, dev = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        dev = std::max(dev, std::abs(a[i] - b[i]));
      }
      tally.observe(dev / scale);
    }
  }
  return tally.done(1e-4);
}

OfflineTrajectory small_offline_run(Task task, Variant variant, const Matrix& g, RngStream& rng,
                                    std::span<const std::uint64_t> checkpoints, std::uint64_t t_max) {
  const ProblemPreset p = small_problem();
  return run_offline(initial_state(p, task, rng), g, p.offline, t_max, checkpoints, task, variant);
}

Outcome lateral_decay() {
  RngStream rng(kSeed, 23);
  Tally tally("‖M_o‖/‖M_d‖");
  for (int rep = 0; rep < 2; ++rep) {
    const Problem prob = small_covariance(rng);
    for (Task task : kTasks)
      for (Variant variant : kVariants) {
        const OfflineTrajectory traj = small_offline_run(task, variant, prob.g, rng, {}, 5000);
        const DiagonalSplit parts = split_diag(traj.final_state().m());
        tally.observe(parts.off_diagonal.frobenius_norm() / parts.diagonal.norm());
      }
  }
  return tally.done(1e-6);
}

Outcome monotone_tail() {
  RngStream rng(kSeed, 24);
  const std::uint64_t marks[] = {100, 1000, 5000};
  for (int rep = 0; rep < 2; ++rep) {
    const Problem prob = small_covariance(rng);
    for (Task task : kTasks)
      for (Variant variant : kVariants) {
        const OfflineTrajectory traj = small_offline_run(task, variant, prob.g, rng, marks, 5000);
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& cp : traj.checkpoints) {
          const double e = procrustes_error(
              estimate_subspace(cp.state, task, variant, prob.truth.sigma_k), prob.truth.u_k);
          if (e > prev + 1e-15) {
            return {false, pair_name(task, variant) + ": error increased at t=" + std::to_string(cp.t)};
          }
          prev = e;
        }
      }
  }
  return {true, "E_Pro nonincreasing over {100, 1000, 5000} for 8 runs"};
}

// -------------------------------------------------------------------- data

Outcome data_determinism() {
  const CovarianceSpec spec = [] {
    RngStream r(kSeed, 30);
    return random_covariance(small_problem().spectrum, r);
  }();
  RngStream a(kSeed, 31), b(kSeed, 31);
  for (int i = 0; i < 200; ++i)
    if (!(sample(spec, a) == sample(spec, b))) return {false, "identical streams diverged"};
  RngStream ra(kSeed, 32), rb(kSeed, 32);
  if (!(haar_orthogonal(10, ra) == haar_orthogonal(10, rb))) return {false, "rotation draw not reproducible"};
  return {true, "200 samples and a rotation reproduced bit-for-bit"};
}

Outcome stream_independence() {
  RngStream a(kSeed, 0), b(kSeed, 1);
  constexpr int n = 20000;
  double sab = 0, saa = 0, sbb = 0, sa = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal(), y = b.normal();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double r = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  return in_range("cross-stream correlation", r, -4.0 / std::sqrt(n), 4.0 / std::sqrt(n));
}

Outcome covariance_symmetry() {
  RngStream rng(kSeed, 33);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix g = build_covariance(random_covariance(large_problem().spectrum, rng));
    if (g.asymmetry() != 0.0) return {false, "G not exactly symmetric"};
  }
  return {true, "10 covariances exactly symmetric"};
}

Outcome schedule_behaviour() {
  const StepSchedule inv = StepSchedule::inverse_time(10.0, 250.0);
  if (std::abs(inv(0) - 0.04) > 1e-15) return {false, "InverseTime{10, 250} at t=0 is not 0.04"};
  const StepSchedule all[] = {inv, StepSchedule::constant(0.1), large_problem().online_psp,
                              StepSchedule::piecewise({{100, 0.5}, {1000, 0.2}, {std::nullopt, 0.01}})};
  for (const auto& s : all) {
    double prev = s(0);
    for (std::uint64_t t = 1; t <= 20000; ++t) {
      const double a = s(t);
      if (a > prev) return {false, "schedule increased at t=" + std::to_string(t)};
      prev = a;
    }
  }
  return {true, "4 schedules nonincreasing over t <= 20000"};
}

// -------------------------------------------------------------------- eval

Outcome procrustes_invariance() {
  RngStream rng(kSeed, 40);
  Tally tally("invariance deviation");
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix u = leading_columns(haar_orthogonal(8, rng), 3);
    const Matrix u_hat = u + random_normal_matrix(8, 3, 0.3, rng);
    const double base = procrustes_error(u_hat, u);
    const Matrix q = haar_orthogonal(3, rng);
    tally.observe(std::abs(procrustes_error(u_hat * q, u) - base));
    tally.observe(std::abs(procrustes_error(u_hat * random_signs(3, rng), u) - base));
  }
  return tally.done(1e-12);
}

Outcome procrustes_bounds() {
  RngStream rng(kSeed, 41);
  Tally tally("error on rotated copies");
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix u = leading_columns(haar_orthogonal(8, rng), 3);
    const Matrix u_hat = random_normal_matrix(8, 3, 0.2 + 2.0 * rng.uniform(), rng);
    const double e = procrustes_error(u_hat, u);
    const double upper = (std::pow(u_hat.frobenius_norm(), 2) + 3.0) / 3.0;
    if (e < 0.0 || e > upper) tally.fail("bound violated");
    tally.observe(procrustes_error(u * haar_orthogonal(3, rng), u));
  }
  return tally.done(1e-12);
}

Outcome estimator_consistency() {
  RngStream rng(kSeed, 42);
  const ProblemPreset p = small_problem();
  Tally tally("E_Pro at fixed point");
  for (int rep = 0; rep < 10; ++rep) {
    const Problem prob = small_covariance(rng);
    const DiagonalMatrix signs = random_signs(p.k, rng);
    for (Task task : kTasks)
      for (Variant variant : kVariants) {
        const ModelState fp = construct_fixed_point(prob.g, p.lambda, task, signs, p.tau(task));
        tally.observe(procrustes_error(estimate_subspace(fp, task, variant, prob.truth.sigma_k), prob.truth.u_k));
      }
  }
  return tally.done(1e-9);
}

double objective_value(const Matrix& y, const Matrix& x, const DiagonalMatrix& lam, Task task) {
  return task == Task::PSP ? objective_psp(y, x, lam) : objective_psw(y, x, lam).value;
}

Matrix numeric_gradient(const Matrix& y, const Matrix& x, const DiagonalMatrix& lam, Task task) {
  Matrix g(y.rows(), y.cols());
  const double h = 1e-6;
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) {
      Matrix yp = y, ym = y;
      yp(i, j) += h;
      ym(i, j) -= h;
      g(i, j) = (objective_value(yp, x, lam, task) - objective_value(ym, x, lam, task)) / (2 * h);
    }
  return g;
}

// Removes the component normal to the constraint manifold {Y : Y·Yᵀ = Λ²},
// spanned by S·Y with S symmetric; S solves S·P + P·S = G·Yᵀ + Y·Gᵀ.
Matrix project_tangent(const Matrix& grad, const Matrix& y) {
  const Matrix p = multiply_transposed(y, y);
  Matrix rhs = multiply_transposed(grad, y);
  rhs += rhs.transpose();
  Matrix s(p.rows(), p.cols());
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) s(i, j) = rhs(i, j) / (p(i, i) + p(j, j));
  return grad - s * y;
}

struct Instance {
  Matrix x;
  DiagonalMatrix lambda;
};

Instance optimum_instance(RngStream& rng) {
  const std::size_t n = 6, t = 12;
  // Columns of X with a spread spectrum so the top singular values separate.
  Matrix x = random_normal_matrix(n, t, 1.0, rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < t; ++j) x(i, j) *= 1.0 / (1.0 + static_cast<double>(i));
  return {std::move(x), DiagonalMatrix{1.0, 0.8, 0.55}};
}

Outcome optimum_stationarity() {
  RngStream rng(kSeed, 43);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = optimum_instance(rng);
    const DiagonalMatrix signs = random_signs(3, rng);
    for (Task task : kTasks) {
      const Matrix y = closed_form_optimum(inst.x, inst.lambda, 3, task, signs);
      Matrix grad = numeric_gradient(y, inst.x, inst.lambda, task);
      if (task == Task::PSW) {
        if (objective_psw(y, inst.x, inst.lambda).constraint_violation > 1e-10) {
          return {false, "PSW optimum violates Y·Yᵀ = Λ²"};
        }
        grad = project_tangent(grad, y);
      }
      const double obj = objective_value(y, inst.x, inst.lambda, task);
      worst = std::max(worst, grad.frobenius_norm() / (1.0 + std::abs(obj)));
    }
  }
  std::ostringstream os;
  os << std::setprecision(3) << "max ‖grad‖/(1+|obj|)=" << worst << " bound=1e-6";
  return {worst < 1e-6, os.str()};
}

Outcome optimum_minimality() {
  RngStream rng(kSeed, 44);
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = optimum_instance(rng);
    const std::size_t t = inst.x.cols();
    for (Task task : kTasks) {
      const Matrix y = closed_form_optimum(inst.x, inst.lambda, 3, task, DiagonalMatrix::identity(3));
      const double best = objective_value(y, inst.x, inst.lambda, task);
      for (int c = 0; c < 1000; ++c) {
        Matrix z;
        if (task == Task::PSP) {
          z = random_normal_matrix(3, t, 1.0, rng);
          z *= y.frobenius_norm() / z.frobenius_norm();
        } else {
          z = inst.lambda * leading_columns(haar_orthogonal(t, rng), 3).transpose();
        }
        if (objective_value(z, inst.x, inst.lambda, task) < best) {
          return {false, std::string(to_string(task)) + ": random competitor beat the closed form"};
        }
      }
    }
  }
  return {true, "closed form beat 1000 competitors on 10 instances per task"};
}

// ----------------------------------------------------------------- harness

ExperimentConfig quick_online_config(Task task) {
  ExperimentConfig c = parse_config(std::string(R"({"preset":"small","task":")") +
                                    std::string(to_string(task)) +
                                    R"(","variant":"iteration_free","mode":"online","trials":3,"seed":11,)"
                                    R"("t_max":1500,"checkpoints":[500,1000]})");
  return c;
}

bool same_results(const SummaryReport& a, const SummaryReport& b) {
  if (a.trials.size() != b.trials.size() || a.checkpoints.size() != b.checkpoints.size()) return false;
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    const auto& x = a.trials[i];
    const auto& y = b.trials[i];
    if (x.trial != y.trial || x.completed != y.completed || x.diverged_at != y.diverged_at ||
        !(x.errors == y.errors)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    const auto& x = a.checkpoints[i];
    const auto& y = b.checkpoints[i];
    if (x.t != y.t || x.completed != y.completed || !(x.median_e_pro == y.median_e_pro)) return false;
  }
  return true;
}

Outcome reproducibility() {
  const ExperimentConfig c = quick_online_config(Task::PSP);
  const SummaryReport a = run_experiment(c);
  const SummaryReport b = run_experiment(c);
  return {same_results(a, b), "two runs of the same config"};
}

Outcome trial_isolation() {
  const ExperimentConfig c = quick_online_config(Task::PSW);
  const SummaryReport a = run_experiment(c);
  RunOptions reversed;
  reversed.trial_order = {2, 0, 1};
  reversed.workers = 2;
  const SummaryReport b = run_experiment(c, reversed);
  return {same_results(a, b), "sequential vs permuted 2-worker run"};
}

Outcome estimator_dispatch() {
  RngStream rng(kSeed, 50);
  const Problem prob = small_covariance(rng);
  double weakest_ratio = 1e300;
  for (Variant variant : kVariants) {
    const OfflineTrajectory traj = small_offline_run(Task::PSW, variant, prob.g, rng, {}, 5000);
    const ModelState& s = traj.final_state();
    const double right = procrustes_error(estimate_subspace(s, Task::PSW, variant, prob.truth.sigma_k), prob.truth.u_k);
    const double wrong = procrustes_error(estimate_subspace(s, Task::PSP, variant, prob.truth.sigma_k), prob.truth.u_k);
    if (!(wrong > 1e-3)) return {false, "wrong estimator did not worsen E_Pro"};
    weakest_ratio = std::min(weakest_ratio, wrong / std::max(right, 1e-300));
  }
  std::ostringstream os;
  os << std::setprecision(3) << "wrong/right estimator error ratio >= " << weakest_ratio;
  return {weakest_ratio > 100.0, os.str()};
}

struct Check {
  const char* name;
  std::function<Outcome(const VerifyOptions&)> run;
};

template <typename F>
Check plain(const char* name, F f) {
  return {name, [f](const VerifyOptions&) { return f(); }};
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      plain("linalg.sym_eig_reconstruction", sym_eig_reconstruction),
      plain("linalg.svd_ordering", svd_ordering),
      plain("linalg.qr_determinism", qr_determinism),
      plain("linalg.solve_agreement", solve_agreement),
      plain("model.symmetry_preservation", symmetry_preservation),
      plain("model.two_step_equivalence", two_step_equivalence),
      plain("model.approximation_order", approximation_order),
      plain("model.cost_contract", cost_contract),
      plain("model.lambda_ordering", lambda_ordering),
      plain("offline.fixed_point_certification", fixed_point_certification),
      {"offline.stability_dichotomy",
       [](const VerifyOptions& o) { return stability_dichotomy(o.inject_permuted_fixed_point); }},
      plain("offline.linearization_agreement", linearization_agreement),
      plain("offline.lateral_decay", lateral_decay),
      plain("offline.monotone_tail", monotone_tail),
      plain("data.determinism", data_determinism),
      plain("data.stream_independence", stream_independence),
      plain("data.covariance_symmetry", covariance_symmetry),
      plain("data.schedule", schedule_behaviour),
      plain("eval.procrustes_invariance", procrustes_invariance),
      plain("eval.procrustes_bounds", procrustes_bounds),
      plain("eval.estimator_consistency", estimator_consistency),
      plain("eval.optimum_stationarity", optimum_stationarity),
      plain("eval.optimum_minimality", optimum_minimality),
      plain("harness.reproducibility", reproducibility),
      plain("harness.trial_isolation", trial_isolation),
      plain("harness.estimator_dispatch", estimator_dispatch),
  };
  return checks;
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& c : registry()) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> verify(const VerifyOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& c : registry()) {
    if (!options.filter.empty() && std::string_view(c.name).find(options.filter) == std::string_view::npos) {
      continue;
    }
    CheckResult r;
    r.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    try {
      Outcome o = c.run(options);
      r.passed = o.passed;
      r.detail = std::move(o.detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ifsm
