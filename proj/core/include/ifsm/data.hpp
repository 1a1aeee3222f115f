#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ifsm/matrix.hpp"
#include "ifsm/model.hpp"
#include "ifsm/rng.hpp"
#include "ifsm/schedule.hpp"

namespace ifsm {

/// Population covariance G = R·G̃·Rᵀ given by an orthogonal rotation R and a
/// positive, nonincreasing diagonal spectrum G̃.
class CovarianceSpec {
 public:
  /// Throws InvalidState if RᵀR deviates from I by more than 1e-10 or the
  /// spectrum is not strictly positive and nonincreasing.
  CovarianceSpec(Matrix rotation, DiagonalMatrix spectrum);

  std::size_t n() const noexcept { return spectrum_.dim(); }
  const Matrix& rotation() const noexcept { return rotation_; }
  const DiagonalMatrix& spectrum() const noexcept { return spectrum_; }
  /// R·G̃^{1/2}; sample() returns this times a standard normal vector.
  const Matrix& sampling_factor() const noexcept { return factor_; }

 private:
  Matrix rotation_;
  DiagonalMatrix spectrum_;
  Matrix factor_;
};

/// Matrix of independent normal entries with the given standard deviation.
Matrix random_normal_matrix(std::size_t rows, std::size_t cols, double stddev, RngStream& rng);

/// Haar-distributed orthogonal n×n matrix: QR of a standard Gaussian matrix
/// with the diagonal of R made positive. Redraws on the measure-zero
/// rank-deficient event.
Matrix haar_orthogonal(std::size_t n, RngStream& rng);

/// G = R·G̃·Rᵀ, explicitly symmetrized.
Matrix build_covariance(const CovarianceSpec& spec);

/// x ~ N(0, G), drawn as R·G̃^{1/2}·z.
Vector sample(const CovarianceSpec& spec, RngStream& rng);

/// Constants of one of the experiment problem sizes.
struct ProblemPreset {
  std::string name;
  std::size_t n = 0;
  std::size_t k = 0;
  DiagonalMatrix spectrum;  ///< G̃
  DiagonalMatrix lambda;    ///< Λ
  double tau_psp = 0.5;
  double tau_psw = 1.0;
  StepSchedule online_psp = StepSchedule::constant(1.0);
  StepSchedule online_psw = StepSchedule::constant(1.0);
  StepSchedule offline = StepSchedule::constant(0.1);
  double m_init_psp = 1.0;  ///< M = m_init·I at t = 0
  double m_init_psw = 0.3;
  double w_init_variance = 0.0;  ///< W entries ~ N(0, w_init_variance)

  double tau(Task task) const { return task == Task::PSP ? tau_psp : tau_psw; }
  double m_init(Task task) const { return task == Task::PSP ? m_init_psp : m_init_psw; }
  const StepSchedule& online_schedule(Task task) const {
    return task == Task::PSP ? online_psp : online_psw;
  }
};

/// N = 10, K = 3.
ProblemPreset small_problem();
/// N = 100, K = 10.
ProblemPreset large_problem();
/// "small" or "large"; throws std::invalid_argument otherwise.
ProblemPreset preset_by_name(const std::string& name);

/// Covariance with the given spectrum and a freshly drawn Haar rotation.
CovarianceSpec random_covariance(const DiagonalMatrix& spectrum, RngStream& rng);

/// Initial state M = m_init·I, W ~ N(0, w_init_variance) drawn from rng.
ModelState initial_state(const ProblemPreset& preset, Task task, RngStream& rng);

/// One sample per line, comma-separated, 17 significant digits, no header.
void write_dataset(const std::filesystem::path& path, std::span<const Vector> samples);
/// Throws IoError if the file cannot be read and MalformedRow (with its
/// 1-based line number) for empty files, unparsable fields, or ragged rows.
std::vector<Vector> read_dataset(const std::filesystem::path& path);

/// Formats a double with 17 significant digits.
std::string format_double(double value);

}  // namespace ifsm
