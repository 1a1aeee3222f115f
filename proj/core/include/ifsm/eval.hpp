#pragma once

#include <vector>

#include "ifsm/matrix.hpp"
#include "ifsm/model.hpp"

namespace ifsm {

/// Top-K eigenvectors of a covariance and the square roots of their
/// eigenvalues.
struct GroundTruth {
  Matrix u_k;                        ///< N×K, orthonormal columns, descending eigenvalue
  DiagonalMatrix sigma_k;            ///< Σ_K = diag(sqrt(μ_1), …, sqrt(μ_K))
  std::vector<double> eigenvalues;   ///< full spectrum of G, descending
};

/// Minimum separation required between the top K+1 eigenvalues.
inline constexpr double kSpectralGapFloor = 1e-10;

/// Throws DegenerateSpectrum if the top k+1 eigenvalues are not separated by
/// more than 1e-10 or if a top-k eigenvalue is not positive.
GroundTruth ground_truth(const Matrix& g, std::size_t k);

/// Estimated principal directions (N×K) read off a network state:
///   PSP: Û_Kᵀ = Λ⁻¹·F      PSW: Û_Kᵀ = Σ_K·Λ⁻¹·F
/// where F is the neural filter of the chosen variant. `sigma_k` is only used
/// for PSW.
Matrix estimate_subspace(const ModelState& state, Task task, Variant variant,
                         const DiagonalMatrix& sigma_k);

/// Subspace alignment error min_Q ‖Û·Q − U‖²/‖U‖² over K×K orthogonal Q, in
/// closed form (‖Û‖² + K − 2·Σ sᵢ(ÛᵀU))/K. `u_true` must have orthonormal
/// columns. Throws ShapeMismatch on differing shapes.
double procrustes_error(const Matrix& u_hat, const Matrix& u_true);

/// −2·tr(XᵀX·YᵀY) + tr(YᵀΛ⁻¹Y·YᵀΛ⁻¹Y) for Y (K×T), X (N×T).
double objective_psp(const Matrix& y, const Matrix& x, const DiagonalMatrix& lambda);

struct PswObjective {
  double value;                 ///< ‖XᵀX − YᵀY‖²
  double constraint_violation;  ///< ‖YYᵀ − Λ²‖
};

PswObjective objective_psw(const Matrix& y, const Matrix& x, const DiagonalMatrix& lambda);

/// Minimizer of the Λ-weighted objectives:
///   PSP: Y = Λ·S·U_Kᵀ·X        PSW: Y = Λ·S·Σ_K⁻¹·U_Kᵀ·X
/// with U_K, Σ_K the top-k left singular vectors/values of X and S a ±1
/// diagonal. Throws DegenerateSpectrum if the top k+1 singular values are
/// not distinct.
Matrix closed_form_optimum(const Matrix& x, const DiagonalMatrix& lambda, std::size_t k, Task task,
                           const DiagonalMatrix& signs);

}  // namespace ifsm
