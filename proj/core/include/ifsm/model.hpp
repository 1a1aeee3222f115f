#pragma once

#include <string_view>

#include "ifsm/matrix.hpp"

namespace ifsm {

/// Principal subspace projection or principal subspace whitening.
enum class Task { PSP, PSW };

/// How the network output is obtained from the lateral weights: the two-step
/// Taylor surrogate, or an exact linear solve.
enum class Variant { IterationFree, ExactInverse };

std::string_view to_string(Task task);
std::string_view to_string(Variant variant);
/// Accepts "psp"/"psw" (case-insensitive); throws std::invalid_argument.
Task parse_task(std::string_view text);
/// Accepts "iteration_free"/"exact" (and "exact_inverse"); throws std::invalid_argument.
Variant parse_variant(std::string_view text);

/// Smallest admissible magnitude of a diagonal entry of M.
inline constexpr double kDiagonalFloor = 1e-12;

/// Synaptic state of the network: lateral weights M (K×K, symmetric),
/// feed-forward weights W (K×N), the fixed degeneracy-breaking diagonal Λ, and
/// the time constant τ of the lateral dynamics.
///
/// Construction validates every invariant: shapes, finiteness, symmetry of M
/// within 1e-10·‖M‖, diag(M) >= 1e-12, and λ₁ > λ₂ > … > λ_K > 0.
class ModelState {
 public:
  ModelState(Matrix m, Matrix w, DiagonalMatrix lambda, double tau);

  /// M = m_scale·I and the given W.
  static ModelState with_scaled_identity(double m_scale, Matrix w, DiagonalMatrix lambda,
                                         double tau);

  const Matrix& m() const noexcept { return m_; }
  const Matrix& w() const noexcept { return w_; }
  const DiagonalMatrix& lambda() const noexcept { return lambda_; }
  double tau() const noexcept { return tau_; }

  std::size_t outputs() const noexcept { return w_.rows(); }
  std::size_t inputs() const noexcept { return w_.cols(); }

  bool operator==(const ModelState&) const = default;

 private:
  friend ModelState plasticity(ModelState, const Vector&, const Vector&, double, Task);
  friend ModelState apply_update(ModelState, const Matrix&, const Matrix&, double, Task);

  Matrix m_;
  Matrix w_;
  DiagonalMatrix lambda_;
  double tau_;
};

struct DiagonalSplit {
  DiagonalMatrix diagonal;  ///< M_d
  Matrix off_diagonal;      ///< M_o, zero diagonal
};

/// M = M_d + M_o.
DiagonalSplit split_diag(const Matrix& m);

/// First-order Taylor surrogate of M⁻¹: M_d⁻¹ − M_d⁻¹·M_o·M_d⁻¹. Only the
/// diagonal is inverted. Throws DegenerateDiagonal if any |m_ii| < 1e-12.
Matrix approx_inverse(const Matrix& m);

/// Network output for input x.
///
/// IterationFree runs the two-step dynamics
///   ỹ = M_d⁻¹·W·x,  y = M_d⁻¹·W·x − M_d⁻¹·M_o·ỹ
/// in O(KN + K²). ExactInverse solves M·y = W·x.
Vector forward(const ModelState& state, const Vector& x, Variant variant);

/// Effective input→output map F, so that forward(state, x, variant) == F·x.
/// IterationFree: (I − M_d⁻¹M_o)·M_d⁻¹·W. ExactInverse: M⁻¹·W.
Matrix neural_filter(const ModelState& state, Variant variant);

/// Local Hebbian/anti-Hebbian update for one input/output pair:
///   W ← W + α(y·xᵀ − W)
///   M ← M + (α/τ)(y·yᵀ − ΛMΛ)   (PSP)
///   M ← M + (α/τ)(y·yᵀ − Λ²)    (PSW)
/// M is re-symmetrized afterwards. Throws DegenerateDiagonal if an updated
/// diagonal entry of M drops below 1e-12.
ModelState plasticity(ModelState state, const Vector& x, const Vector& y, double alpha, Task task);

/// Same update with the outer products replaced by given second moments:
/// `yx` stands in for y·xᵀ (K×N) and `yy` for y·yᵀ (K×K).
ModelState apply_update(ModelState state, const Matrix& yx, const Matrix& yy, double alpha,
                        Task task);

struct StepResult {
  Vector y;
  ModelState state;
};

/// One iteration of the online algorithm: output from the pre-update state,
/// then plasticity.
StepResult online_step(ModelState state, const Vector& x, double alpha, Task task, Variant variant);

}  // namespace ifsm
