#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace grenzero {

/// Right-continuous nondecreasing step path on [0, inf): equal to `origin`
/// on [0, knots[0]) and to values[i] on [knots[i], knots[i+1]), flat after
/// the last knot. Holds empirical distribution functions and the counting
/// paths t -> N(t^gamma).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> knots, std::vector<double> values,
               double origin = 0.0);

  double operator()(double x) const;

  std::span<const double> knots() const { return knots_; }
  std::span<const double> values() const { return values_; }
  double origin() const { return origin_; }
  std::size_t size() const { return knots_.size(); }
  bool empty() const { return knots_.empty(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  double origin_ = 0.0;
};

}  // namespace grenzero
