#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifsm/matrix.hpp"
#include "ifsm/model.hpp"
#include "ifsm/schedule.hpp"

namespace ifsm {

/// Right-hand side of the expectation dynamics at a state:
///   dW/ds = F·G − W,   dM/ds = (F·G·Fᵀ − ΛMΛ)/τ   (PSP)
///                      dM/ds = (F·G·Fᵀ − Λ²)/τ    (PSW)
struct OfflineFlow {
  Matrix dw;
  Matrix dm;
};

OfflineFlow offline_flow(const ModelState& state, const Matrix& g, Task task, Variant variant);

/// One forward-Euler step of the expectation dynamics: the online plasticity
/// rule with y·xᵀ → F·G and y·yᵀ → F·G·Fᵀ.
ModelState offline_step(ModelState state, const Matrix& g, double alpha, Task task, Variant variant);

/// Fixed point built from the eigendecomposition of g: M = diag(μ), W = M·F
/// with F = Λ·S·U_Kᵀ (PSP) or F = Λ·S·Σ_K⁻¹·U_Kᵀ (PSW).
///
/// `assignment[i]` selects which eigenpair (0-based, descending) feeds row i;
/// empty means the principal, correctly ordered choice 0, 1, …, K−1. Throws
/// DegenerateSpectrum if the top K+1 eigenvalues (and any selected ones) are
/// not separated by more than 1e-10.
ModelState construct_fixed_point(const Matrix& g, const DiagonalMatrix& lambda, Task task,
                                 const DiagonalMatrix& signs, double tau,
                                 std::span<const std::size_t> assignment = {});

/// ‖F·G − W‖ + ‖F·G·Fᵀ − ΛMΛ‖ (PSP) or ‖F·G·Fᵀ − Λ²‖ (PSW).
double fixed_point_residual(const ModelState& state, const Matrix& g, Task task, Variant variant);

/// Coordinates used for linearization: all entries of W (row-major) followed
/// by the upper triangle of M (row-major, i <= j). Dimension KN + K(K+1)/2.
std::size_t flow_dimension(std::size_t k, std::size_t n);

/// Central finite-difference Jacobian of the flow in the coordinates above.
Matrix flow_jacobian(const ModelState& state, const Matrix& g, Task task, Variant variant,
                     double eps = 1e-5);

/// Real parts of the eigenvalues of flow_jacobian, sorted descending.
std::vector<double> jacobian_spectrum(const ModelState& state, const Matrix& g, Task task,
                                      Variant variant, double eps = 1e-5);

struct OfflineCheckpoint {
  std::uint64_t t;
  ModelState state;
};

struct OfflineTrajectory {
  std::vector<OfflineCheckpoint> checkpoints;  ///< strictly increasing t
  const ModelState& final_state() const { return checkpoints.back().state; }
};

/// Applies offline_step t_max times with α_t from the schedule, snapshotting
/// at the requested iterations (0 means the initial state) and always at
/// t_max. Model errors are rethrown as TrialDiverged carrying t.
OfflineTrajectory run_offline(const ModelState& initial, const Matrix& g, const StepSchedule& schedule,
                              std::uint64_t t_max, std::span<const std::uint64_t> checkpoints,
                              Task task, Variant variant);

}  // namespace ifsm
