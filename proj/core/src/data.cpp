#include "ifsm/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include "ifsm/errors.hpp"
#include "ifsm/linalg.hpp"

namespace ifsm {

// ---------------------------------------------------------------- StepSchedule

StepSchedule::StepSchedule(Rule rule) : rule_(std::move(rule)) {
  auto positive = [](double a) { return std::isfinite(a) && a > 0.0; };
  if (const auto* inv = std::get_if<InverseTime>(&rule_)) {
    if (!positive(inv->numerator) || !std::isfinite(inv->offset) || !(inv->offset + 1.0 > 0.0)) {
      throw std::invalid_argument("inverse-time schedule needs numerator > 0 and offset + 1 > 0");
    }
  } else if (const auto* pw = std::get_if<PiecewiseConstant>(&rule_)) {
    if (pw->pieces.empty()) throw std::invalid_argument("piecewise schedule needs at least one piece");
    for (std::size_t i = 0; i < pw->pieces.size(); ++i) {
      const Piece& p = pw->pieces[i];
      if (!positive(p.alpha)) throw std::invalid_argument("piecewise schedule: α must be positive");
      if (!p.up_to && i + 1 != pw->pieces.size()) {
        throw std::invalid_argument("piecewise schedule: only the last piece may be open-ended");
      }
      if (i > 0 && p.up_to && !(*p.up_to > *pw->pieces[i - 1].up_to)) {
        throw std::invalid_argument("piecewise schedule: breakpoints must strictly increase");
      }
    }
  } else if (!positive(std::get<Constant>(rule_).alpha)) {
    throw std::invalid_argument("constant schedule: α must be positive");
  }
}

double StepSchedule::operator()(std::uint64_t t) const {
  if (const auto* inv = std::get_if<InverseTime>(&rule_)) {
    return inv->numerator / (inv->offset + static_cast<double>(t));
  }
  if (const auto* pw = std::get_if<PiecewiseConstant>(&rule_)) {
    for (const Piece& p : pw->pieces)
      if (!p.up_to || t <= *p.up_to) return p.alpha;
    return pw->pieces.back().alpha;
  }
  return std::get<Constant>(rule_).alpha;
}

// ---------------------------------------------------------------- CovarianceSpec

CovarianceSpec::CovarianceSpec(Matrix rotation, DiagonalMatrix spectrum)
    : rotation_(std::move(rotation)), spectrum_(std::move(spectrum)) {
  const std::size_t n = spectrum_.dim();
  if (n == 0) throw InvalidState("CovarianceSpec: empty spectrum");
  if (rotation_.rows() != n || rotation_.cols() != n) {
    throw ShapeMismatch("CovarianceSpec: rotation must be N×N with N = dim(spectrum)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(spectrum_[i] > 0.0)) throw InvalidState("CovarianceSpec: spectrum must be strictly positive");
    if (i > 0 && spectrum_[i] > spectrum_[i - 1]) {
      throw InvalidState("CovarianceSpec: spectrum must be nonincreasing");
    }
  }
  const Matrix gram = transposed_multiply(rotation_, rotation_);
  if ((gram - Matrix::identity(n)).frobenius_norm() > 1e-10) {
    throw InvalidState("CovarianceSpec: rotation is not orthogonal");
  }
  DiagonalMatrix root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(spectrum_[i]);
  factor_ = rotation_ * root;
}

// ---------------------------------------------------------------- sampling

Matrix random_normal_matrix(std::size_t rows, std::size_t cols, double stddev, RngStream& rng) {
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (double& v : out.row(i)) v = stddev * rng.normal();
  return out;
}

Matrix haar_orthogonal(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("haar_orthogonal: n must be >= 1");
  for (;;) {
    try {
      return linalg::qr(random_normal_matrix(n, n, 1.0, rng)).q;
    } catch (const RankDeficient&) {
      // measure-zero event; draw again
    }
  }
}

Matrix build_covariance(const CovarianceSpec& spec) {
  const Matrix& f = spec.sampling_factor();
  Matrix g = multiply_transposed(f, f);
  g.symmetrize();
  return g;
}

Vector sample(const CovarianceSpec& spec, RngStream& rng) {
  const std::size_t n = spec.n();
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
  return spec.sampling_factor() * z;
}

// ---------------------------------------------------------------- presets

ProblemPreset small_problem() {
  ProblemPreset p;
  p.name = "small";
  p.n = 10;
  p.k = 3;
  std::vector<double> spectrum(p.n, 0.2);
  spectrum[0] = 1.0;
  spectrum[1] = 0.75;
  spectrum[2] = 0.5;
  p.spectrum = DiagonalMatrix(std::move(spectrum));
  p.lambda = DiagonalMatrix{1.0, 0.85, 0.7};
  p.tau_psp = 0.5;
  p.tau_psw = 1.0;
  p.online_psp = StepSchedule::inverse_time(10.0, 250.0);
  p.online_psw = StepSchedule::inverse_time(10.0, 250.0);
  p.offline = StepSchedule::constant(0.1);
  p.m_init_psp = 1.0;
  p.m_init_psw = 0.3;
  p.w_init_variance = 1.0 / static_cast<double>(p.n);
  return p;
}

ProblemPreset large_problem() {
  ProblemPreset p;
  p.name = "large";
  p.n = 100;
  p.k = 10;
  const double kk = static_cast<double>(p.k);
  std::vector<double> spectrum(p.n, 0.02);
  for (std::size_t i = 0; i < p.k; ++i) {
    spectrum[i] = 1.0 - static_cast<double>(i) / (2.0 * (kk - 1.0));
  }
  p.spectrum = DiagonalMatrix(std::move(spectrum));
  std::vector<double> lambda(p.k);
  for (std::size_t i = 0; i < p.k; ++i) {
    lambda[i] = 1.0 - 3.0 * static_cast<double>(i) / (10.0 * (kk - 1.0));
  }
  p.lambda = DiagonalMatrix(std::move(lambda));
  p.tau_psp = 0.5;
  p.tau_psw = 1.0;
  p.online_psp = StepSchedule::piecewise({{10000, 1.1e-3}, {std::nullopt, 1.0e-4}});
  p.online_psw = StepSchedule::constant(1.0e-3);
  p.offline = StepSchedule::constant(0.1);
  p.m_init_psp = 1.0;
  p.m_init_psw = 0.3;
  p.w_init_variance = 1.0 / static_cast<double>(p.n);
  return p;
}

ProblemPreset preset_by_name(const std::string& name) {
  if (name == "small") return small_problem();
  if (name == "large") return large_problem();
  throw std::invalid_argument("unknown preset '" + name + "' (expected small|large)");
}

CovarianceSpec random_covariance(const DiagonalMatrix& spectrum, RngStream& rng) {
  return CovarianceSpec(haar_orthogonal(spectrum.dim(), rng), spectrum);
}

ModelState initial_state(const ProblemPreset& preset, Task task, RngStream& rng) {
  Matrix w = random_normal_matrix(preset.k, preset.n, std::sqrt(preset.w_init_variance), rng);
  return ModelState::with_scaled_identity(preset.m_init(task), std::move(w), preset.lambda,
                                          preset.tau(task));
}

// ---------------------------------------------------------------- dataset I/O

std::string format_double(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_dataset(const std::filesystem::path& path, std::span<const Vector> samples) {
  if (samples.empty()) throw std::invalid_argument("write_dataset: no samples");
  const std::size_t dim = samples.front().dim();
  for (const Vector& s : samples) {
    if (s.dim() != dim) throw ShapeMismatch("write_dataset: samples differ in dimension");
  }
  std::ofstream out(path);
  if (!out) throw IoError("write_dataset: cannot open " + path.string());
  for (const Vector& s : samples) {
    for (std::size_t i = 0; i < s.dim(); ++i) {
      if (i > 0) out << ',';
      out << format_double(s[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write_dataset: write failed for " + path.string());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<Vector> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_dataset: cannot open " + path.string());

  std::vector<Vector> samples;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) throw MalformedRow(line_no, "empty row");
    std::vector<double> values;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = row.find(',', start);
      const std::string_view field =
          trim(row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw MalformedRow(line_no, "cannot parse field '" + std::string(field) + "'");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (samples.empty()) {
      dim = values.size();
    } else if (values.size() != dim) {
      throw MalformedRow(line_no, "expected " + std::to_string(dim) + " fields, got " +
                                      std::to_string(values.size()));
    }
    samples.emplace_back(std::move(values));
  }
  if (in.bad()) throw IoError("read_dataset: read failed for " + path.string());
  if (samples.empty()) throw MalformedRow(1, "empty dataset");
  return samples;
}

}  // namespace ifsm
