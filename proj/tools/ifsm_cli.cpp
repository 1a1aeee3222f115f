// Command-line front end: run experiments, generate datasets, run the
// verification suite, convert reports.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ifsm/config.hpp"
#include "ifsm/data.hpp"
#include "ifsm/errors.hpp"
#include "ifsm/experiment.hpp"
#include "ifsm/report.hpp"
#include "ifsm/rng.hpp"
#include "ifsm/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ifsm::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::size_t workers = 1;
};

int cmd_run(const RunArgs& args) {
  ifsm::ExperimentConfig config;
  try {
    config = ifsm::parse_config(read_file(args.config));
  } catch (const ifsm::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ifsm::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const ifsm::IoError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  const ifsm::ReportFormat format = ifsm::parse_report_format(args.format);

  ifsm::RunOptions options;
  options.workers = args.workers;
  const ifsm::SummaryReport report = ifsm::run_experiment(config, options);

  const std::string out = !args.out.empty() ? args.out : config.output.value_or("");
  if (out.empty()) {
    if (format == ifsm::ReportFormat::Json) {
      std::cout << ifsm::report_to_json(report) << '\n';
    } else {
      ifsm::write_error_rows_csv(report, std::cout);
    }
  } else {
    ifsm::emit_report(report, format, out);
  }

  for (const auto& c : report.checkpoints) {
    std::cerr << "t=" << c.t << " median_e_pro=" << ifsm::format_double(c.median_e_pro)
              << " completed=" << c.completed << '\n';
  }
  if (report.diverged_count() > 0) {
    std::cerr << report.diverged_count() << " of " << report.trials.size() << " trials diverged\n";
    return kFailure;
  }
  return kOk;
}

struct GenArgs {
  std::string preset;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_data(const GenArgs& args) {
  const ifsm::ProblemPreset preset = ifsm::preset_by_name(args.preset);
  ifsm::RngStream rng(args.seed, 0);
  const ifsm::CovarianceSpec spec = ifsm::random_covariance(preset.spectrum, rng);
  std::vector<ifsm::Vector> samples;
  samples.reserve(args.samples);
  for (std::size_t t = 0; t < args.samples; ++t) samples.push_back(ifsm::sample(spec, rng));
  ifsm::write_dataset(args.out, samples);
  return kOk;
}

int cmd_verify(const std::string& filter, bool inject, bool list) {
  if (list) {
    for (const auto& name : ifsm::verify_check_names()) std::cout << name << '\n';
    return kOk;
  }
  ifsm::VerifyOptions options;
  options.filter = filter;
  options.inject_permuted_fixed_point = inject;
  const auto results = ifsm::verify(options);
  if (results.empty()) {
    std::cerr << "no check matches '" << filter << "'\n";
    return kUsage;
  }
  std::size_t failed = 0;
  double total = 0.0;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << std::fixed << std::setprecision(2)
              << r.seconds << "s) " << r.detail << '\n';
    std::cout.unsetf(std::ios::floatfield);
    failed += r.passed ? 0 : 1;
    total += r.seconds;
  }
  std::cout << results.size() - failed << "/" << results.size() << " checks passed in " << std::fixed
            << std::setprecision(1) << total << "s\n";
  return failed == 0 ? kOk : kFailure;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out) {
  ifsm::SummaryReport report;
  try {
    report = ifsm::report_from_json(read_file(in));
  } catch (const ifsm::ParseError& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return kUsage;
  }
  const ifsm::ReportFormat fmt = ifsm::parse_report_format(format);
  if (!out.empty()) {
    ifsm::emit_report(report, fmt, out);
  } else if (fmt == ifsm::ReportFormat::Csv) {
    ifsm::write_error_rows_csv(report, std::cout);
  } else {
    std::cout << ifsm::report_to_json(report) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online principal subspace learners: experiments and checks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run_cmd->add_option("--config", run.config, "Config file")->required();
  run_cmd->add_option("--out", run.out, "Output path (default: config output, else stdout)");
  run_cmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--workers", run.workers, "Concurrent trials")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write samples drawn from a preset covariance");
  gen_cmd->add_option("--preset", gen.preset, "small or large")->required()->check(CLI::IsMember({"small", "large"}));
  gen_cmd->add_option("--samples", gen.samples, "Number of samples")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  std::string filter;
  bool inject = false;
  bool list = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the seeded invariant checks");
  verify_cmd->add_option("--filter", filter, "Only checks whose name contains this");
  verify_cmd->add_flag("--inject-permuted-fixed-point", inject,
                       "Debug: feed an order-permuted fixed point to the stability check");
  verify_cmd->add_flag("--list", list, "List check names and exit");

  std::string report_in;
  std::string report_format = "csv";
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Convert a JSON report");
  report_cmd->add_option("--in", report_in, "JSON report")->required();
  report_cmd->add_option("--format", report_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  report_cmd->add_option("--out", report_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gen_cmd) return cmd_gen_data(gen);
    if (*verify_cmd) return cmd_verify(filter, inject, list);
    if (*report_cmd) return cmd_report(report_in, report_format, report_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
