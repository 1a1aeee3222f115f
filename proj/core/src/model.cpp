#include "ifsm/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ifsm/errors.hpp"
#include "ifsm/linalg.hpp"

namespace ifsm {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require_diagonal_floor(const DiagonalMatrix& d, const char* where) {
  for (std::size_t i = 0; i < d.dim(); ++i) {
    if (!(std::abs(d[i]) >= kDiagonalFloor)) {
      throw DegenerateDiagonal(std::string(where) + ": |m_" + std::to_string(i) + std::to_string(i) +
                               "| = " + std::to_string(d[i]) + " below 1e-12");
    }
  }
}

void check_updated_diagonal(const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) >= kDiagonalFloor)) {
      throw DegenerateDiagonal("plasticity: updated m_" + std::to_string(i) + std::to_string(i) +
                               " = " + std::to_string(m(i, i)) + " below 1e-12");
    }
  }
}

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw std::invalid_argument("step size must be finite and nonnegative");
  }
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::PSP ? "psp" : "psw"; }

std::string_view to_string(Variant variant) {
  return variant == Variant::IterationFree ? "iteration_free" : "exact";
}

Task parse_task(std::string_view text) {
  const std::string t = lower(text);
  if (t == "psp") return Task::PSP;
  if (t == "psw") return Task::PSW;
  throw std::invalid_argument("unknown task '" + std::string(text) + "' (expected psp|psw)");
}

Variant parse_variant(std::string_view text) {
  const std::string t = lower(text);
  if (t == "iteration_free" || t == "iteration-free" || t == "if") return Variant::IterationFree;
  if (t == "exact" || t == "exact_inverse" || t == "exact-inverse") return Variant::ExactInverse;
  throw std::invalid_argument("unknown variant '" + std::string(text) +
                              "' (expected iteration_free|exact)");
}

// ---------------------------------------------------------------- ModelState

ModelState::ModelState(Matrix m, Matrix w, DiagonalMatrix lambda, double tau)
    : m_(std::move(m)), w_(std::move(w)), lambda_(std::move(lambda)), tau_(tau) {
  const std::size_t k = w_.rows();
  if (k == 0 || w_.cols() == 0) throw InvalidState("ModelState: W must be nonempty");
  if (m_.rows() != k || m_.cols() != k) throw ShapeMismatch("ModelState: M must be K×K with K = rows(W)");
  if (lambda_.dim() != k) throw ShapeMismatch("ModelState: Λ must have K diagonal entries");
  if (!m_.all_finite() || !w_.all_finite()) throw NonFinite("ModelState: non-finite weights");
  if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw InvalidState("ModelState: τ must be positive");
  if (m_.asymmetry() > 1e-10 * m_.frobenius_norm()) throw NotSymmetric("ModelState: M not symmetric");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(m_(i, i) >= kDiagonalFloor)) {
      throw DegenerateDiagonal("ModelState: diagonal of M must be strictly positive");
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(lambda_[i] > 0.0) || !std::isfinite(lambda_[i])) {
      throw InvalidState("ModelState: Λ entries must be positive");
    }
    if (i > 0 && !(lambda_[i] < lambda_[i - 1])) {
      throw InvalidState("ModelState: Λ entries must be strictly decreasing");
    }
  }
}

ModelState ModelState::with_scaled_identity(double m_scale, Matrix w, DiagonalMatrix lambda,
                                            double tau) {
  const std::size_t k = w.rows();
  return ModelState(m_scale * Matrix::identity(k), std::move(w), std::move(lambda), tau);
}

// ---------------------------------------------------------------- operations

DiagonalSplit split_diag(const Matrix& m) {
  if (!m.is_square()) throw ShapeMismatch("split_diag: matrix is not square");
  DiagonalSplit out{m.diagonal(), m};
  for (std::size_t i = 0; i < m.rows(); ++i) out.off_diagonal(i, i) = 0.0;
  return out;
}

Matrix approx_inverse(const Matrix& m) {
  if (!m.is_square()) throw ShapeMismatch("approx_inverse: matrix is not square");
  const std::size_t k = m.rows();
  const DiagonalMatrix d = m.diagonal();
  require_diagonal_floor(d, "approx_inverse");
  Matrix out(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      out(i, j) = i == j ? 1.0 / d[i] : -m(i, j) / (d[i] * d[j]);
    }
  }
  return out;
}

Vector forward(const ModelState& state, const Vector& x, Variant variant) {
  if (x.dim() != state.inputs()) throw ShapeMismatch("forward: input dimension mismatch");
  const Matrix& m = state.m();
  Vector drive = state.w() * x;
  if (variant == Variant::ExactInverse) return linalg::solve_symmetric(m, drive);

  const std::size_t k = state.outputs();
  const DiagonalMatrix d = m.diagonal();
  require_diagonal_floor(d, "forward");
  // ỹ = M_d⁻¹·W·x
  Vector first(k);
  for (std::size_t i = 0; i < k; ++i) first[i] = drive[i] / d[i];
  // y = ỹ − M_d⁻¹·M_o·ỹ
  Vector y(k);
  for (std::size_t i = 0; i < k; ++i) {
    double lateral = 0.0;
    const auto row = m.row(i);
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) lateral += row[j] * first[j];
    y[i] = first[i] - lateral / d[i];
  }
  return y;
}

Matrix neural_filter(const ModelState& state, Variant variant) {
  if (variant == Variant::ExactInverse) return linalg::solve_symmetric(state.m(), state.w());
  return approx_inverse(state.m()) * state.w();
}

ModelState apply_update(ModelState state, const Matrix& yx, const Matrix& yy, double alpha,
                        Task task) {
  check_alpha(alpha);
  const std::size_t k = state.outputs();
  const std::size_t n = state.inputs();
  if (yx.rows() != k || yx.cols() != n) throw ShapeMismatch("update: y·xᵀ must be K×N");
  if (yy.rows() != k || yy.cols() != k) throw ShapeMismatch("update: y·yᵀ must be K×K");
  if (alpha == 0.0) return state;

  Matrix& w = state.w_;
  for (std::size_t i = 0; i < k; ++i) {
    auto wr = w.row(i);
    const auto src = yx.row(i);
    for (std::size_t j = 0; j < n; ++j) wr[j] += alpha * (src[j] - wr[j]);
  }

  Matrix& m = state.m_;
  const DiagonalMatrix& lam = state.lambda_;
  const double rate = alpha / state.tau_;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double target =
          task == Task::PSP ? lam[i] * m(i, j) * lam[j] : (i == j ? lam[i] * lam[i] : 0.0);
      m(i, j) += rate * (yy(i, j) - target);
    }
  }
  m.symmetrize();
  if (!m.all_finite() || !w.all_finite()) throw DegenerateDiagonal("update: weights became non-finite");
  check_updated_diagonal(m);
  return state;
}

ModelState plasticity(ModelState state, const Vector& x, const Vector& y, double alpha, Task task) {
  check_alpha(alpha);
  const std::size_t k = state.outputs();
  const std::size_t n = state.inputs();
  if (x.dim() != n || y.dim() != k) throw ShapeMismatch("plasticity: x must be N-dim and y K-dim");
  if (alpha == 0.0) return state;

  Matrix& w = state.w_;
  for (std::size_t i = 0; i < k; ++i) {
    auto wr = w.row(i);
    for (std::size_t j = 0; j < n; ++j) wr[j] += alpha * (y[i] * x[j] - wr[j]);
  }

  Matrix& m = state.m_;
  const DiagonalMatrix& lam = state.lambda_;
  const double rate = alpha / state.tau_;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double target =
          task == Task::PSP ? lam[i] * m(i, j) * lam[j] : (i == j ? lam[i] * lam[i] : 0.0);
      m(i, j) += rate * (y[i] * y[j] - target);
    }
  }
  m.symmetrize();
  if (!m.all_finite() || !w.all_finite()) throw DegenerateDiagonal("plasticity: weights became non-finite");
  check_updated_diagonal(m);
  return state;
}

StepResult online_step(ModelState state, const Vector& x, double alpha, Task task, Variant variant) {
  Vector y = forward(state, x, variant);
  ModelState next = plasticity(std::move(state), x, y, alpha, task);
  return StepResult{std::move(y), std::move(next)};
}

}  // namespace ifsm
