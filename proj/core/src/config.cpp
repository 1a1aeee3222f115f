#include "ifsm/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ifsm/data.hpp"
#include "ifsm/errors.hpp"
#include "json_io.hpp"

namespace ifsm {

std::string_view to_string(Mode mode) { return mode == Mode::Online ? "online" : "offline"; }

std::vector<std::uint64_t> ExperimentConfig::eval_points() const {
  std::vector<std::uint64_t> out = checkpoints;
  out.push_back(t_max);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "task",   "variant", "mode",  "preset",      "n",     "k",           "spectrum",
      "lambda", "tau",     "schedule", "m_init", "w_init_variance", "t_max", "checkpoints",
      "trials", "seed",    "fixed_rotation", "output"};
  return keys;
}

const Json& field(const Json& obj, const std::string& key) { return obj.at(key); }

std::string get_string(const Json& obj, const std::string& key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) throw ParseError(key, "expected a string");
  return v.get<std::string>();
}

double get_number(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = field(obj, key);
  if (!v.is_number()) throw ParseError(path, "expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) throw ParseError(path, "expected a nonnegative integer");
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ParseError(path, "expected a nonnegative integer");
}

std::vector<double> get_number_array(const Json& obj, const std::string& key) {
  const Json& v = field(obj, key);
  if (!v.is_array()) throw ParseError(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ParseError(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

StepSchedule parse_schedule(const Json& v) {
  const std::string path = "schedule";
  if (!v.is_object()) throw ParseError(path, "expected an object");
  if (!v.contains("kind") || !v["kind"].is_string()) throw ParseError(path + ".kind", "expected a string");
  const std::string kind = v["kind"].get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : v.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        throw ParseError(path + "." + key, "unknown key");
      }
    }
  };
  try {
    if (kind == "inverse_time") {
      allow({"kind", "numerator", "offset"});
      return StepSchedule::inverse_time(get_number(v, "numerator", path + ".numerator"),
                                        get_number(v, "offset", path + ".offset"));
    }
    if (kind == "constant") {
      allow({"kind", "alpha"});
      return StepSchedule::constant(get_number(v, "alpha", path + ".alpha"));
    }
    if (kind == "piecewise") {
      allow({"kind", "pieces"});
      const Json& pieces = field(v, "pieces");
      if (!pieces.is_array()) throw ParseError(path + ".pieces", "expected an array");
      std::vector<StepSchedule::Piece> out;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string p = path + ".pieces[" + std::to_string(i) + "]";
        const Json& piece = pieces[i];
        if (!piece.is_object()) throw ParseError(p, "expected an object");
        for (const auto& [key, _] : piece.items()) {
          if (key != "up_to" && key != "alpha") throw ParseError(p + "." + key, "unknown key");
        }
        StepSchedule::Piece sp{std::nullopt, get_number(piece, "alpha", p + ".alpha")};
        if (piece.contains("up_to") && !piece["up_to"].is_null()) {
          sp.up_to = get_count(piece["up_to"], p + ".up_to");
        }
        out.push_back(sp);
      }
      return StepSchedule::piecewise(std::move(out));
    }
  } catch (const Json::out_of_range& e) {
    throw ParseError(path, std::string("missing field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("schedule: ") + e.what());
  }
  throw ParseError(path + ".kind", "unknown schedule kind '" + kind + "'");
}

void validate_lambda(const DiagonalMatrix& lambda, std::size_t k) {
  if (lambda.dim() != k) throw ValidationError("lambda must have k entries");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(lambda[i] > 0.0)) throw ValidationError("lambda entries must be positive");
    if (i > 0 && !(lambda[i] < lambda[i - 1])) {
      throw ValidationError("lambda entries must be strictly decreasing");
    }
  }
}

void validate_spectrum(const DiagonalMatrix& spectrum, std::size_t n, std::size_t k) {
  if (spectrum.dim() != n) throw ValidationError("spectrum must have n entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(spectrum[i] > 0.0)) throw ValidationError("spectrum entries must be positive");
    if (i > 0 && spectrum[i] > spectrum[i - 1]) throw ValidationError("spectrum must be nonincreasing");
  }
  for (std::size_t i = 0; i < std::min(k + 1, n) - 1; ++i) {
    if (!(spectrum[i] - spectrum[i + 1] > 1e-10)) {
      throw ValidationError("top k+1 spectrum entries must be distinct");
    }
  }
}

}  // namespace

Json schedule_to_json(const StepSchedule& schedule) {
  Json out;
  const auto& rule = schedule.rule();
  if (const auto* inv = std::get_if<StepSchedule::InverseTime>(&rule)) {
    out["kind"] = "inverse_time";
    out["numerator"] = inv->numerator;
    out["offset"] = inv->offset;
  } else if (const auto* pw = std::get_if<StepSchedule::PiecewiseConstant>(&rule)) {
    out["kind"] = "piecewise";
    Json pieces = Json::array();
    for (const auto& p : pw->pieces) {
      Json piece;
      if (p.up_to) piece["up_to"] = *p.up_to;
      piece["alpha"] = p.alpha;
      pieces.push_back(std::move(piece));
    }
    out["pieces"] = std::move(pieces);
  } else {
    out["kind"] = "constant";
    out["alpha"] = std::get<StepSchedule::Constant>(rule).alpha;
  }
  return out;
}

Json config_to_json_value(const ExperimentConfig& c) {
  Json out;
  out["task"] = std::string(to_string(c.task));
  out["variant"] = std::string(to_string(c.variant));
  out["mode"] = std::string(to_string(c.mode));
  out["preset"] = c.preset;
  out["n"] = c.n;
  out["k"] = c.k;
  out["spectrum"] = c.spectrum.diagonal();
  out["lambda"] = c.lambda.diagonal();
  out["tau"] = c.tau;
  out["schedule"] = schedule_to_json(c.schedule);
  out["m_init"] = c.m_init;
  out["w_init_variance"] = c.w_init_variance;
  out["t_max"] = c.t_max;
  out["checkpoints"] = c.checkpoints;
  out["trials"] = c.trials;
  out["seed"] = c.seed;
  out["fixed_rotation"] = c.fixed_rotation;
  if (c.output) out["output"] = *c.output;
  return out;
}

ExperimentConfig config_from_json_value(const Json& root) {
  if (!root.is_object()) throw ParseError("", "config must be a JSON object");
  for (const auto& [key, _] : root.items()) {
    if (!known_keys().contains(key)) throw ParseError(key, "unknown key");
  }
  for (const char* key : {"task", "variant", "mode", "preset", "trials", "seed"}) {
    if (!root.contains(key)) throw ParseError(key, "missing required key");
  }

  ExperimentConfig c;
  try {
    c.task = parse_task(get_string(root, "task"));
  } catch (const std::invalid_argument& e) {
    throw ParseError("task", e.what());
  }
  try {
    c.variant = parse_variant(get_string(root, "variant"));
  } catch (const std::invalid_argument& e) {
    throw ParseError("variant", e.what());
  }
  const std::string mode = get_string(root, "mode");
  if (mode == "online") {
    c.mode = Mode::Online;
  } else if (mode == "offline") {
    c.mode = Mode::Offline;
  } else {
    throw ParseError("mode", "expected online|offline");
  }
  c.preset = get_string(root, "preset");
  if (c.preset != "small" && c.preset != "large" && c.preset != "custom") {
    throw ParseError("preset", "expected small|large|custom");
  }
  c.trials = get_count(root["trials"], "trials");
  c.seed = get_count(root["seed"], "seed");
  if (root.contains("fixed_rotation")) {
    if (!root["fixed_rotation"].is_boolean()) throw ParseError("fixed_rotation", "expected a boolean");
    c.fixed_rotation = root["fixed_rotation"].get<bool>();
  }
  if (root.contains("output")) c.output = get_string(root, "output");

  const bool custom = c.preset == "custom";
  if (custom) {
    for (const char* key : {"n", "k", "spectrum", "lambda", "tau", "schedule", "t_max", "checkpoints"}) {
      if (!root.contains(key)) {
        throw ValidationError(std::string("preset=custom requires '") + key + "'");
      }
    }
  }

  std::optional<ProblemPreset> preset;
  if (!custom) preset = preset_by_name(c.preset);

  c.n = root.contains("n") ? get_count(root["n"], "n") : preset->n;
  c.k = root.contains("k") ? get_count(root["k"], "k") : preset->k;
  if (preset && (c.n != preset->n || c.k != preset->k)) {
    throw ValidationError("n and k cannot differ from the '" + c.preset + "' preset");
  }
  if (c.n == 0 || c.k == 0 || c.k > c.n) throw ValidationError("need 1 <= k <= n");

  c.spectrum = root.contains("spectrum") ? DiagonalMatrix(get_number_array(root, "spectrum"))
                                         : preset->spectrum;
  validate_spectrum(c.spectrum, c.n, c.k);
  c.lambda = root.contains("lambda") ? DiagonalMatrix(get_number_array(root, "lambda")) : preset->lambda;
  validate_lambda(c.lambda, c.k);

  c.tau = root.contains("tau") ? get_number(root, "tau", "tau") : preset->tau(c.task);
  if (!(c.tau > 0.0)) throw ValidationError("tau must be positive");

  if (root.contains("schedule")) {
    c.schedule = parse_schedule(root["schedule"]);
  } else {
    c.schedule = c.mode == Mode::Online ? preset->online_schedule(c.task) : preset->offline;
  }

  c.m_init = root.contains("m_init") ? get_number(root, "m_init", "m_init")
                                     : (c.task == Task::PSP ? 1.0 : 0.3);
  if (!(c.m_init >= kDiagonalFloor)) throw ValidationError("m_init must be positive");
  c.w_init_variance = root.contains("w_init_variance")
                          ? get_number(root, "w_init_variance", "w_init_variance")
                          : 1.0 / static_cast<double>(c.n);
  if (!(c.w_init_variance >= 0.0)) throw ValidationError("w_init_variance must be nonnegative");

  if (root.contains("checkpoints")) {
    const Json& cp = root["checkpoints"];
    if (!cp.is_array()) throw ParseError("checkpoints", "expected an array of integers");
    for (std::size_t i = 0; i < cp.size(); ++i) {
      c.checkpoints.push_back(get_count(cp[i], "checkpoints[" + std::to_string(i) + "]"));
    }
  }
  if (root.contains("t_max")) {
    c.t_max = get_count(root["t_max"], "t_max");
  } else if (!c.checkpoints.empty()) {
    c.t_max = *std::max_element(c.checkpoints.begin(), c.checkpoints.end());
  } else if (c.mode == Mode::Online) {
    c.checkpoints = {1000, 10000, 100000};
    c.t_max = 100000;
  } else {
    c.checkpoints = {100, 1000, 5000, 50000};
    c.t_max = 50000;
  }

  if (c.trials < 1) throw ValidationError("trials must be >= 1");
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    const std::uint64_t t = c.checkpoints[i];
    if (t < 1 || t > c.t_max) {
      throw ValidationError("checkpoint " + std::to_string(t) + " outside [1, t_max=" +
                            std::to_string(c.t_max) + "]");
    }
    if (i > 0 && !(t > c.checkpoints[i - 1])) {
      throw ValidationError("checkpoints must be strictly increasing");
    }
  }
  return c;
}

}  // namespace detail

ExperimentConfig parse_config(std::string_view text) {
  detail::Json root;
  try {
    root = detail::Json::parse(text.begin(), text.end());
  } catch (const detail::Json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return detail::config_from_json_value(root);
}

std::string config_to_json(const ExperimentConfig& config, int indent) {
  return detail::config_to_json_value(config).dump(indent);
}

}  // namespace ifsm
