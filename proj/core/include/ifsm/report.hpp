#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "ifsm/experiment.hpp"

namespace ifsm {

enum class ReportFormat { Csv, Json };

/// "csv" or "json"; throws std::invalid_argument otherwise.
ReportFormat parse_report_format(std::string_view text);

/// Header `t,trial,e_pro`, one row per (eval point, trial), sorted by t then
/// trial, floats at 17 significant digits.
void write_error_rows_csv(const SummaryReport& report, std::ostream& out);
/// Header `t,median_e_pro,completed,diverged`.
void write_summary_csv(const SummaryReport& report, std::ostream& out);

/// Full report including the config echo, with fixed field order.
std::string report_to_json(const SummaryReport& report, int indent = 2);
/// Inverse of report_to_json. Throws ParseError on malformed input.
SummaryReport report_from_json(std::string_view text);

/// Where the CSV medians go for a given rows path: `runs.csv` →
/// `runs.summary.csv`.
std::filesystem::path summary_path_for(const std::filesystem::path& rows_path);

/// CSV writes the rows file plus the companion summary file; JSON writes
/// the full report. Throws IoError.
void emit_report(const SummaryReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace ifsm
