#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ifsm/matrix.hpp"
#include "ifsm/model.hpp"
#include "ifsm/schedule.hpp"

namespace ifsm {

enum class Mode { Online, Offline };

std::string_view to_string(Mode mode);

/// Fully expanded description of one experiment. Produced by parse_config,
/// which fills everything a preset implies.
struct ExperimentConfig {
  Task task = Task::PSP;
  Variant variant = Variant::IterationFree;
  Mode mode = Mode::Online;
  std::string preset;  ///< small | large | custom
  std::size_t n = 0;
  std::size_t k = 0;
  DiagonalMatrix spectrum;  ///< G̃
  DiagonalMatrix lambda;    ///< Λ
  double tau = 1.0;
  StepSchedule schedule = StepSchedule::constant(1.0);
  double m_init = 1.0;           ///< M = m_init·I at t = 0
  double w_init_variance = 0.0;  ///< W entries ~ N(0, w_init_variance)
  std::uint64_t t_max = 0;
  std::vector<std::uint64_t> checkpoints;  ///< strictly increasing, within [1, t_max]
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  /// Share one rotation R across trials instead of redrawing it per trial.
  bool fixed_rotation = false;
  std::optional<std::string> output;

  /// Iterations at which errors are recorded: checkpoints ∪ {t_max}.
  std::vector<std::uint64_t> eval_points() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON config.
///
/// Required keys: task (psp|psw), variant (iteration_free|exact), mode
/// (online|offline), preset (small|large|custom), trials, seed. Optional
/// keys override preset values: n, k, spectrum, lambda, tau, schedule,
/// m_init, w_init_variance, t_max, checkpoints, fixed_rotation, output.
/// preset=custom requires n, k, spectrum, lambda, tau, schedule, t_max and
/// checkpoints.
///
/// Throws ParseError (with the offending key) for malformed JSON, unknown
/// keys and type errors, and ValidationError for violated constraints.
ExperimentConfig parse_config(std::string_view text);

/// Expanded config as JSON text; parse_config accepts it back unchanged.
std::string config_to_json(const ExperimentConfig& config, int indent = 2);

}  // namespace ifsm
