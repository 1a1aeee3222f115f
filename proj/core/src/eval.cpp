#include "ifsm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ifsm/errors.hpp"
#include "ifsm/linalg.hpp"

namespace ifsm {

namespace {

void require_separated(const std::vector<double>& values, std::size_t k, const char* where) {
  if (k == 0 || k > values.size()) {
    throw std::invalid_argument(std::string(where) + ": k must be in [1, N]");
  }
  const std::size_t top = std::min(k + 1, values.size());
  for (std::size_t i = 0; i + 1 < top; ++i) {
    if (!(values[i] - values[i + 1] > kSpectralGapFloor)) {
      throw DegenerateSpectrum(std::string(where) + ": eigenvalues " + std::to_string(i + 1) +
                               " and " + std::to_string(i + 2) + " are not separated");
    }
  }
  if (!(values[k - 1] > 0.0)) {
    throw DegenerateSpectrum(std::string(where) + ": top-k eigenvalues must be positive");
  }
}

DiagonalMatrix sqrt_of(const std::vector<double>& values, std::size_t k) {
  DiagonalMatrix out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = std::sqrt(values[i]);
  return out;
}

Matrix leading_columns(const Matrix& v, std::size_t k) {
  Matrix out(v.rows(), k);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < k; ++j) out(i, j) = v(i, j);
  return out;
}

}  // namespace

GroundTruth ground_truth(const Matrix& g, std::size_t k) {
  linalg::SymEig eig = linalg::sym_eig(g, 1e-10);
  require_separated(eig.values, k, "ground_truth");
  return GroundTruth{leading_columns(eig.vectors, k), sqrt_of(eig.values, k), std::move(eig.values)};
}

Matrix estimate_subspace(const ModelState& state, Task task, Variant variant,
                         const DiagonalMatrix& sigma_k) {
  const Matrix f = neural_filter(state, variant);
  DiagonalMatrix scale = state.lambda().inverse();
  if (task == Task::PSW) {
    if (sigma_k.dim() != state.outputs()) {
      throw ShapeMismatch("estimate_subspace: Σ_K must have K entries for PSW");
    }
    scale = sigma_k * scale;
  }
  return (scale * f).transpose();
}

double procrustes_error(const Matrix& u_hat, const Matrix& u_true) {
  if (u_hat.rows() != u_true.rows() || u_hat.cols() != u_true.cols()) {
    throw ShapeMismatch("procrustes_error: Û is " + std::to_string(u_hat.rows()) + "x" +
                        std::to_string(u_hat.cols()) + ", U is " + std::to_string(u_true.rows()) +
                        "x" + std::to_string(u_true.cols()));
  }
  const double k = static_cast<double>(u_true.cols());
  const double hat_sq = std::pow(u_hat.frobenius_norm(), 2);
  const double cross = linalg::nuclear_norm(transposed_multiply(u_hat, u_true));
  return std::max(0.0, (hat_sq + k - 2.0 * cross) / k);
}

double objective_psp(const Matrix& y, const Matrix& x, const DiagonalMatrix& lambda) {
  if (y.cols() != x.cols()) throw ShapeMismatch("objective_psp: Y and X differ in T");
  if (lambda.dim() != y.rows()) throw ShapeMismatch("objective_psp: Λ must be K×K");
  // tr(XᵀX·YᵀY) = ‖X·Yᵀ‖²
  const double cross = std::pow(multiply_transposed(x, y).frobenius_norm(), 2);
  // tr(YᵀΛ⁻¹Y·YᵀΛ⁻¹Y) = Σ_ij P_ij² / (λ_i λ_j), P = Y·Yᵀ
  const Matrix p = multiply_transposed(y, y);
  double quartic = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) quartic += p(i, j) * p(i, j) / (lambda[i] * lambda[j]);
  return -2.0 * cross + quartic;
}

PswObjective objective_psw(const Matrix& y, const Matrix& x, const DiagonalMatrix& lambda) {
  if (y.cols() != x.cols()) throw ShapeMismatch("objective_psw: Y and X differ in T");
  if (lambda.dim() != y.rows()) throw ShapeMismatch("objective_psw: Λ must be K×K");
  // ‖XᵀX − YᵀY‖² = ‖XXᵀ‖² − 2‖XYᵀ‖² + ‖YYᵀ‖²
  const Matrix xx = multiply_transposed(x, x);
  const Matrix xy = multiply_transposed(x, y);
  Matrix yy = multiply_transposed(y, y);
  const double value = std::pow(xx.frobenius_norm(), 2) - 2.0 * std::pow(xy.frobenius_norm(), 2) +
                       std::pow(yy.frobenius_norm(), 2);
  yy -= Matrix::from_diagonal(lambda.squared());
  return PswObjective{std::max(0.0, value), yy.frobenius_norm()};
}

Matrix closed_form_optimum(const Matrix& x, const DiagonalMatrix& lambda, std::size_t k, Task task,
                           const DiagonalMatrix& signs) {
  if (lambda.dim() != k || signs.dim() != k) {
    throw ShapeMismatch("closed_form_optimum: Λ and S must be k×k");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (signs[i] != 1.0 && signs[i] != -1.0) {
      throw std::invalid_argument("closed_form_optimum: S entries must be ±1");
    }
  }
  linalg::SymEig eig = linalg::sym_eig(multiply_transposed(x, x), 1e-10);
  require_separated(eig.values, k, "closed_form_optimum");
  DiagonalMatrix scale = lambda * signs;
  if (task == Task::PSW) scale = scale * sqrt_of(eig.values, k).inverse();
  const Matrix u_k = leading_columns(eig.vectors, k);
  return scale * transposed_multiply(u_k, x);
}

}  // namespace ifsm
