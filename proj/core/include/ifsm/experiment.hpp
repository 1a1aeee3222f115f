#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ifsm/config.hpp"
#include "ifsm/data.hpp"

namespace ifsm {

/// Stream id reserved for the shared rotation when fixed_rotation is set.
/// Per-trial streams use the trial index.
inline constexpr std::uint64_t kSharedRotationStream = ~std::uint64_t{0};

struct ErrorSample {
  std::uint64_t t;
  double e_pro;
  bool operator==(const ErrorSample&) const = default;
};

struct TrialRecord {
  std::size_t trial = 0;
  bool completed = true;
  std::optional<std::uint64_t> diverged_at;  ///< set iff !completed
  std::string failure;
  double wall_seconds = 0.0;
  std::vector<ErrorSample> errors;  ///< one per eval point reached
};

struct CheckpointSummary {
  std::uint64_t t;
  double median_e_pro;  ///< NaN when no trial completed
  std::size_t completed;
};

struct SummaryReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;           ///< indexed by trial
  std::vector<CheckpointSummary> checkpoints;  ///< one per eval point

  std::size_t diverged_count() const;
  /// Median at iteration t, or std::nullopt if t is not an eval point.
  std::optional<double> median_at(std::uint64_t t) const;
};

struct RunOptions {
  std::size_t workers = 1;
  /// Order in which trials are started; empty means 0, 1, …. Results do not
  /// depend on it.
  std::vector<std::size_t> trial_order;
};

/// Runs one trial: draws its covariance and initial state from the stream
/// (seed, trial), trains online or offline, records E_Pro at the eval
/// points. Divergence is captured in the record, not thrown.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial);

/// All trials, concurrently up to `workers`, merged by trial index, with
/// per-checkpoint medians over completed trials.
SummaryReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Median of a nonempty range (mean of the two middle values for even
/// sizes); NaN for empty input.
double median(std::vector<double> values);

/// Recomputes the per-checkpoint medians from the trial records.
std::vector<CheckpointSummary> summarize(const ExperimentConfig& config,
                                         const std::vector<TrialRecord>& trials);

/// The preset implied by a config (spectrum, Λ, τ, schedules and
/// initialization taken from the config itself).
ProblemPreset preset_from_config(const ExperimentConfig& config);

}  // namespace ifsm
