#include "ifsm/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ifsm/data.hpp"
#include "ifsm/errors.hpp"
#include "json_io.hpp"

namespace ifsm {

using detail::Json;

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "' (expected csv|json)");
}

void write_error_rows_csv(const SummaryReport& report, std::ostream& out) {
  out << "t,trial,e_pro\n";
  for (std::uint64_t t : report.config.eval_points()) {
    for (const TrialRecord& r : report.trials) {
      for (const ErrorSample& e : r.errors) {
        if (e.t == t) out << t << ',' << r.trial << ',' << format_double(e.e_pro) << '\n';
      }
    }
  }
}

void write_summary_csv(const SummaryReport& report, std::ostream& out) {
  out << "t,median_e_pro,completed,diverged\n";
  const std::size_t diverged = report.diverged_count();
  for (const CheckpointSummary& c : report.checkpoints) {
    out << c.t << ',' << (std::isnan(c.median_e_pro) ? std::string("nan") : format_double(c.median_e_pro))
        << ',' << c.completed << ',' << diverged << '\n';
  }
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& v, const std::string& path) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ParseError(path, "expected a number");
  return v.get<double>();
}

}  // namespace

std::string report_to_json(const SummaryReport& report, int indent) {
  Json root;
  root["config"] = detail::config_to_json_value(report.config);
  Json cps = Json::array();
  for (const CheckpointSummary& c : report.checkpoints) {
    Json j;
    j["t"] = c.t;
    j["median_e_pro"] = number_or_null(c.median_e_pro);
    j["completed"] = c.completed;
    cps.push_back(std::move(j));
  }
  root["checkpoints"] = std::move(cps);
  root["diverged_trials"] = report.diverged_count();
  Json trials = Json::array();
  for (const TrialRecord& r : report.trials) {
    Json j;
    j["trial"] = r.trial;
    j["status"] = r.completed ? "completed" : "diverged";
    j["diverged_at"] = r.diverged_at ? Json(*r.diverged_at) : Json(nullptr);
    j["failure"] = r.failure;
    j["wall_seconds"] = r.wall_seconds;
    Json errors = Json::array();
    for (const ErrorSample& e : r.errors) {
      Json s;
      s["t"] = e.t;
      s["e_pro"] = number_or_null(e.e_pro);
      errors.push_back(std::move(s));
    }
    j["errors"] = std::move(errors);
    trials.push_back(std::move(j));
  }
  root["trials"] = std::move(trials);
  return root.dump(indent);
}

SummaryReport report_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("config") || !root.contains("trials") ||
      !root.contains("checkpoints")) {
    throw ParseError("", "report must contain config, checkpoints and trials");
  }
  try {
    SummaryReport report{detail::config_from_json_value(root["config"]), {}, {}};
    for (const Json& c : root["checkpoints"]) {
      report.checkpoints.push_back({c.at("t").get<std::uint64_t>(),
                                    number_from(c.at("median_e_pro"), "checkpoints.median_e_pro"),
                                    c.at("completed").get<std::size_t>()});
    }
    for (const Json& t : root["trials"]) {
      TrialRecord r;
      r.trial = t.at("trial").get<std::size_t>();
      r.completed = t.at("status").get<std::string>() == "completed";
      if (!t.at("diverged_at").is_null()) r.diverged_at = t["diverged_at"].get<std::uint64_t>();
      r.failure = t.at("failure").get<std::string>();
      r.wall_seconds = t.at("wall_seconds").get<double>();
      for (const Json& e : t.at("errors")) {
        r.errors.push_back({e.at("t").get<std::uint64_t>(), number_from(e.at("e_pro"), "trials.errors.e_pro")});
      }
      report.trials.push_back(std::move(r));
    }
    return report;
  } catch (const Json::exception& e) {
    throw ParseError("", std::string("malformed report: ") + e.what());
  }
}

std::filesystem::path summary_path_for(const std::filesystem::path& rows_path) {
  std::filesystem::path out = rows_path;
  const std::string ext = rows_path.has_extension() ? rows_path.extension().string() : ".csv";
  out.replace_filename(rows_path.stem().string() + ".summary" + ext);
  return out;
}

void emit_report(const SummaryReport& report, ReportFormat format, const std::filesystem::path& path) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    return out;
  };
  if (format == ReportFormat::Json) {
    std::ofstream out = open(path);
    out << report_to_json(report) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
    return;
  }
  {
    std::ofstream out = open(path);
    write_error_rows_csv(report, out);
    if (!out) throw IoError("write failed for " + path.string());
  }
  const auto summary = summary_path_for(path);
  std::ofstream out = open(summary);
  write_summary_csv(report, out);
  if (!out) throw IoError("write failed for " + summary.string());
}

}  // namespace ifsm
