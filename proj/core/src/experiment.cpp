#include "ifsm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "ifsm/errors.hpp"
#include "ifsm/eval.hpp"
#include "ifsm/offline.hpp"

namespace ifsm {

std::size_t SummaryReport::diverged_count() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const TrialRecord& r) { return !r.completed; }));
}

std::optional<double> SummaryReport::median_at(std::uint64_t t) const {
  for (const auto& c : checkpoints)
    if (c.t == t) return c.median_e_pro;
  return std::nullopt;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ProblemPreset preset_from_config(const ExperimentConfig& config) {
  ProblemPreset p;
  p.name = config.preset;
  p.n = config.n;
  p.k = config.k;
  p.spectrum = config.spectrum;
  p.lambda = config.lambda;
  p.tau_psp = p.tau_psw = config.tau;
  p.online_psp = p.online_psw = config.schedule;
  p.offline = config.schedule;
  p.m_init_psp = p.m_init_psw = config.m_init;
  p.w_init_variance = config.w_init_variance;
  return p;
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial = trial;

  RngStream rng(config.seed, trial);
  const ProblemPreset preset = preset_from_config(config);
  CovarianceSpec spec = [&] {
    if (config.fixed_rotation) {
      RngStream shared(config.seed, kSharedRotationStream);
      return random_covariance(config.spectrum, shared);
    }
    return random_covariance(config.spectrum, rng);
  }();
  const Matrix g = build_covariance(spec);
  const GroundTruth truth = ground_truth(g, config.k);
  ModelState state = initial_state(preset, config.task, rng);

  auto error_of = [&](const ModelState& s) {
    return procrustes_error(estimate_subspace(s, config.task, config.variant, truth.sigma_k), truth.u_k);
  };

  const std::vector<std::uint64_t> points = config.eval_points();
  auto next = points.begin();
  if (*next == 0) {
    rec.errors.push_back({0, error_of(state)});
    ++next;
  }

  std::uint64_t t = 0;
  try {
    if (config.mode == Mode::Online) {
      for (t = 1; t <= config.t_max; ++t) {
        const Vector x = sample(spec, rng);
        StepResult step = online_step(std::move(state), x, config.schedule(t), config.task, config.variant);
        state = std::move(step.state);
        if (next != points.end() && *next == t) {
          rec.errors.push_back({t, error_of(state)});
          ++next;
        }
      }
    } else if (config.t_max > 0) {
      const OfflineTrajectory traj = run_offline(state, g, config.schedule, config.t_max,
                                                 config.checkpoints, config.task, config.variant);
      for (const auto& cp : traj.checkpoints) rec.errors.push_back({cp.t, error_of(cp.state)});
    }
  } catch (const TrialDiverged& e) {
    rec.completed = false;
    rec.diverged_at = e.iteration();
    rec.failure = e.what();
  } catch (const Error& e) {
    rec.completed = false;
    rec.diverged_at = t;
    rec.failure = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<CheckpointSummary> summarize(const ExperimentConfig& config,
                                         const std::vector<TrialRecord>& trials) {
  std::vector<CheckpointSummary> out;
  for (std::uint64_t t : config.eval_points()) {
    std::vector<double> values;
    for (const auto& r : trials) {
      if (!r.completed) continue;
      for (const auto& e : r.errors)
        if (e.t == t) values.push_back(e.e_pro);
    }
    out.push_back({t, median(values), values.size()});
  }
  return out;
}

SummaryReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  std::vector<std::size_t> order = options.trial_order;
  if (order.empty()) {
    order.resize(config.trials);
    for (std::size_t i = 0; i < config.trials; ++i) order[i] = i;
  } else {
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted.size() != config.trials || sorted[i] != i) {
        throw std::invalid_argument("run_experiment: trial_order must be a permutation of 0..trials-1");
      }
    }
  }

  std::vector<TrialRecord> records(config.trials);
  std::atomic<std::size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= order.size()) return;
      try {
        records[order[slot]] = run_trial(config, order[slot]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, config.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SummaryReport report{config, std::move(records), {}};
  report.checkpoints = summarize(config, report.trials);
  return report;
}

}  // namespace ifsm
