#include "ifsm/offline.hpp"

#include <algorithm>
#include <complex>
#include <set>
#include <string>

#include "ifsm/errors.hpp"
#include "ifsm/eval.hpp"
#include "ifsm/linalg.hpp"

namespace ifsm {

namespace {

void require_covariance(const ModelState& state, const Matrix& g) {
  if (g.rows() != state.inputs() || g.cols() != state.inputs()) {
    throw ShapeMismatch("offline: covariance must be N×N with N = cols(W)");
  }
}

struct SecondMoments {
  Matrix yx;  // F·G
  Matrix yy;  // F·G·Fᵀ
};

SecondMoments expected_moments(const ModelState& state, const Matrix& g, Variant variant) {
  const Matrix f = neural_filter(state, variant);
  Matrix fg = f * g;
  Matrix fgf = multiply_transposed(fg, f);
  fgf.symmetrize();
  return {std::move(fg), std::move(fgf)};
}

Matrix lateral_target(const ModelState& state, Task task) {
  const DiagonalMatrix& lam = state.lambda();
  if (task == Task::PSW) return Matrix::from_diagonal(lam.squared());
  return lam * state.m() * lam;
}

std::vector<double> flatten(const Matrix& w, const Matrix& m) {
  std::vector<double> out;
  out.reserve(flow_dimension(w.rows(), w.cols()));
  out.insert(out.end(), w.entries().begin(), w.entries().end());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

ModelState unflatten(const std::vector<double>& x, const ModelState& like) {
  const std::size_t k = like.outputs();
  const std::size_t n = like.inputs();
  Matrix w(k, n, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k * n)));
  Matrix m(k, k);
  std::size_t pos = k * n;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      m(i, j) = x[pos];
      m(j, i) = x[pos];
      ++pos;
    }
  return ModelState(std::move(m), std::move(w), like.lambda(), like.tau());
}

}  // namespace

OfflineFlow offline_flow(const ModelState& state, const Matrix& g, Task task, Variant variant) {
  require_covariance(state, g);
  SecondMoments mom = expected_moments(state, g, variant);
  Matrix dw = std::move(mom.yx);
  dw -= state.w();
  Matrix dm = std::move(mom.yy);
  dm -= lateral_target(state, task);
  dm *= 1.0 / state.tau();
  return {std::move(dw), std::move(dm)};
}

ModelState offline_step(ModelState state, const Matrix& g, double alpha, Task task, Variant variant) {
  require_covariance(state, g);
  if (alpha == 0.0) return state;
  const SecondMoments mom = expected_moments(state, g, variant);
  return apply_update(std::move(state), mom.yx, mom.yy, alpha, task);
}

ModelState construct_fixed_point(const Matrix& g, const DiagonalMatrix& lambda, Task task,
                                 const DiagonalMatrix& signs, double tau,
                                 std::span<const std::size_t> assignment) {
  const std::size_t k = lambda.dim();
  if (signs.dim() != k) throw ShapeMismatch("construct_fixed_point: S must be K×K");
  for (std::size_t i = 0; i < k; ++i) {
    if (signs[i] != 1.0 && signs[i] != -1.0) {
      throw std::invalid_argument("construct_fixed_point: S entries must be ±1");
    }
  }
  const linalg::SymEig eig = linalg::sym_eig(g, 1e-10);
  const std::size_t n = g.rows();
  if (k == 0 || k > n) throw std::invalid_argument("construct_fixed_point: need 1 <= K <= N");

  const std::size_t top = std::min(k + 1, n);
  for (std::size_t i = 0; i + 1 < top; ++i) {
    if (!(eig.values[i] - eig.values[i + 1] > kSpectralGapFloor)) {
      throw DegenerateSpectrum("construct_fixed_point: eigenvalue gap below 1e-10");
    }
  }

  std::vector<std::size_t> pick(k);
  if (assignment.empty()) {
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  } else {
    if (assignment.size() != k) throw ShapeMismatch("construct_fixed_point: assignment must have K entries");
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < k; ++i) {
      if (assignment[i] >= n || !seen.insert(assignment[i]).second) {
        throw std::invalid_argument("construct_fixed_point: assignment must be distinct indices < N");
      }
      pick[i] = assignment[i];
    }
    for (std::size_t a : pick)
      for (std::size_t b : pick)
        if (a != b && !(std::abs(eig.values[a] - eig.values[b]) > kSpectralGapFloor)) {
          throw DegenerateSpectrum("construct_fixed_point: selected eigenvalues not separated");
        }
  }

  Matrix m(k, k);
  Matrix f(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    const double mu = eig.values[pick[i]];
    if (!(mu > 0.0)) throw DegenerateSpectrum("construct_fixed_point: selected eigenvalue not positive");
    m(i, i) = mu;
    double scale = lambda[i] * signs[i];
    if (task == Task::PSW) scale /= std::sqrt(mu);
    for (std::size_t j = 0; j < n; ++j) f(i, j) = scale * eig.vectors(j, pick[i]);
  }
  Matrix w = m * f;
  return ModelState(std::move(m), std::move(w), lambda, tau);
}

double fixed_point_residual(const ModelState& state, const Matrix& g, Task task, Variant variant) {
  require_covariance(state, g);
  const SecondMoments mom = expected_moments(state, g, variant);
  return (mom.yx - state.w()).frobenius_norm() + (mom.yy - lateral_target(state, task)).frobenius_norm();
}

std::size_t flow_dimension(std::size_t k, std::size_t n) { return k * n + k * (k + 1) / 2; }

Matrix flow_jacobian(const ModelState& state, const Matrix& g, Task task, Variant variant, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw std::invalid_argument("flow_jacobian: eps must lie in [1e-7, 1e-4]");
  }
  require_covariance(state, g);
  const std::vector<double> x0 = flatten(state.w(), state.m());
  const std::size_t dim = x0.size();
  Matrix jac(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<double> xp = x0;
    std::vector<double> xm = x0;
    xp[c] += eps;
    xm[c] -= eps;
    const OfflineFlow fp = offline_flow(unflatten(xp, state), g, task, variant);
    const OfflineFlow fm = offline_flow(unflatten(xm, state), g, task, variant);
    const std::vector<double> vp = flatten(fp.dw, fp.dm);
    const std::vector<double> vm = flatten(fm.dw, fm.dm);
    for (std::size_t r = 0; r < dim; ++r) jac(r, c) = (vp[r] - vm[r]) / (2.0 * eps);
  }
  return jac;
}

std::vector<double> jacobian_spectrum(const ModelState& state, const Matrix& g, Task task,
                                      Variant variant, double eps) {
  const auto eigs = linalg::eigenvalues(flow_jacobian(state, g, task, variant, eps));
  std::vector<double> re;
  re.reserve(eigs.size());
  for (const auto& z : eigs) re.push_back(z.real());
  std::sort(re.begin(), re.end(), std::greater<>());
  return re;
}

OfflineTrajectory run_offline(const ModelState& initial, const Matrix& g, const StepSchedule& schedule,
                              std::uint64_t t_max, std::span<const std::uint64_t> checkpoints,
                              Task task, Variant variant) {
  require_covariance(initial, g);
  std::vector<std::uint64_t> marks(checkpoints.begin(), checkpoints.end());
  marks.push_back(t_max);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  if (marks.back() > t_max) throw std::invalid_argument("run_offline: checkpoint beyond t_max");

  OfflineTrajectory out;
  auto next = marks.begin();
  if (*next == 0) {
    out.checkpoints.push_back({0, initial});
    ++next;
  }
  ModelState state = initial;
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    try {
      state = offline_step(std::move(state), g, schedule(t), task, variant);
    } catch (const Error& e) {
      throw TrialDiverged(t, e.what());
    }
    if (next != marks.end() && *next == t) {
      out.checkpoints.push_back({t, state});
      ++next;
    }
  }
  return out;
}

}  // namespace ifsm
