#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "grenzero/concave_majorant.hpp"
#include "grenzero/families.hpp"
#include "grenzero/step_function.hpp"

namespace grenzero {

/// Empirical distribution function of a positive sample. Ties produce a
/// single knot whose jump is multiplicity / n.
StepFunction ecdf(std::span<const double> sample);

/// Grenander estimator: the nonincreasing density given by the one-sided
/// slopes of the least concave majorant of the empirical CDF.
class GrenanderEstimate {
 public:
  GrenanderEstimate(std::size_t n, StepFunction empirical);

  std::size_t sample_size() const { return n_; }
  /// Ordered distinct observations.
  std::span<const double> values() const { return empirical_.knots(); }
  const StepFunction& empirical() const { return empirical_; }
  const Majorant& majorant() const { return majorant_; }
  double support_max() const { return empirical_.knots().back(); }

  /// side = right is the right-continuous version; side = left needs x > 0.
  double eval(double x, Side side = Side::right) const;
  /// f_n(0+), the right-continuous estimator at zero.
  double at_zero() const { return eval(0.0, Side::right); }
  /// Integral of the fitted density (sum of slope times segment length).
  double total_mass() const;

 private:
  std::size_t n_;
  StepFunction empirical_;
  Majorant majorant_;
};

GrenanderEstimate fit(std::span<const double> sample);

/// sup over (0, c_upper] of |f_n(x) / f0(x) - 1| for the right-continuous
/// estimator and a nonincreasing reference density f0. `f0(0.0)` must return
/// the limit f0(0+) (possibly +inf). On each constant piece of f_n the ratio
/// is monotone, so only piece endpoints are examined.
double sup_relative_error(const GrenanderEstimate& estimate,
                          const std::function<double(double)>& f0,
                          double c_upper);
double sup_relative_error(const GrenanderEstimate& estimate,
                          const Family& family, double c_upper);

}  // namespace grenzero
