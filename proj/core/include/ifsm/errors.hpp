#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ifsm {

/// Base of every error raised by the library. Catch this to handle any
/// failure uniformly; catch the derived types to react to a specific one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

/// A diagonal entry of the lateral weight matrix fell below the floor; the
/// learner is diverging.
class DegenerateDiagonal : public Error {
 public:
  using Error::Error;
};

/// Eigenvalues that need to be separated are not (gap below 1e-10).
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Wraps a model error raised during a trajectory with the step index.
class TrialDiverged : public Error {
 public:
  TrialDiverged(std::uint64_t iteration, const std::string& cause)
      : Error("trial diverged at t=" + std::to_string(iteration) + ": " + cause),
        iteration_(iteration) {}

  std::uint64_t iteration() const noexcept { return iteration_; }

 private:
  std::uint64_t iteration_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Config text could not be parsed; `path()` names the offending key.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ifsm
