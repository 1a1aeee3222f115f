#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace ifsm {

/// Learning-rate rule α_t, evaluated at iteration t (t = 1 for the first
/// presented sample).
class StepSchedule {
 public:
  /// α_t = numerator / (offset + t)
  struct InverseTime {
    double numerator;
    double offset;
    bool operator==(const InverseTime&) const = default;
  };
  /// α_t = alpha of the first piece with t <= up_to. The last piece may be
  /// open-ended (no bound); past a bounded last piece its alpha is held.
  struct Piece {
    std::optional<std::uint64_t> up_to;
    double alpha;
    bool operator==(const Piece&) const = default;
  };
  struct PiecewiseConstant {
    std::vector<Piece> pieces;
    bool operator==(const PiecewiseConstant&) const = default;
  };
  struct Constant {
    double alpha;
    bool operator==(const Constant&) const = default;
  };
  using Rule = std::variant<InverseTime, PiecewiseConstant, Constant>;

  /// Throws std::invalid_argument unless every α is positive and piece bounds
  /// strictly increase.
  explicit StepSchedule(Rule rule);

  static StepSchedule inverse_time(double numerator, double offset) {
    return StepSchedule(InverseTime{numerator, offset});
  }
  static StepSchedule constant(double alpha) { return StepSchedule(Constant{alpha}); }
  static StepSchedule piecewise(std::vector<Piece> pieces) {
    return StepSchedule(PiecewiseConstant{std::move(pieces)});
  }

  double operator()(std::uint64_t t) const;
  const Rule& rule() const noexcept { return rule_; }

  bool operator==(const StepSchedule&) const = default;

 private:
  Rule rule_;
};

}  // namespace ifsm
