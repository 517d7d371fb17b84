#include "grenzero/grenander.hpp"

#include <algorithm>
#include <cmath>

#include "grenzero/errors.hpp"

namespace grenzero {

StepFunction ecdf(std::span<const double> sample) {
  detail::require(!sample.empty(), "ecdf: empty sample");
  for (double x : sample) {
    detail::require(std::isfinite(x) && x > 0.0,
                    "ecdf: observations must be positive and finite");
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  std::vector<double> knots;
  std::vector<double> values;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    knots.push_back(sorted[i]);
    values.push_back(static_cast<double>(i + 1) / n);
  }
  return StepFunction(std::move(knots), std::move(values));
}

GrenanderEstimate::GrenanderEstimate(std::size_t n, StepFunction empirical)
    : n_(n), empirical_(std::move(empirical)), majorant_(lcm(empirical_)) {}

double GrenanderEstimate::eval(double x, Side side) const {
  return slope(majorant_, x, side);
}

double GrenanderEstimate::total_mass() const {
  const auto vertices = majorant_.vertices();
  const auto slopes = majorant_.slopes();
  double mass = 0.0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    mass += slopes[i] * (vertices[i + 1].x - vertices[i].x);
  }
  return mass;
}

GrenanderEstimate fit(std::span<const double> sample) {
  return GrenanderEstimate(sample.size(), ecdf(sample));
}

double sup_relative_error(const GrenanderEstimate& estimate,
                          const std::function<double(double)>& f0,
                          double c_upper) {
  detail::require(c_upper > 0.0 && std::isfinite(c_upper),
                  "sup_relative_error: c_upper must be positive");

  const auto reference = [&](double x) {
    double value = 0.0;
    try {
      value = f0(x);
    } catch (const ArgumentError&) {
      throw ArgumentError("sup_relative_error: reference density undefined on "
                          "the interval");
    }
    if (!(value > 0.0)) {
      throw ArgumentError("sup_relative_error: reference density not positive "
                          "on the interval");
    }
    return value;
  };
  const auto deviation = [](double level, double ref) {
    return std::abs(level / ref - 1.0);  // level / inf == 0
  };

  const auto vertices = estimate.majorant().vertices();
  const auto slopes = estimate.majorant().slopes();
  double worst = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double left = vertices[i].x;
    if (left >= c_upper) break;
    const double level =
        i < slopes.size() ? slopes[i] : estimate.majorant().terminal_slope();
    const double right =
        i + 1 < vertices.size() ? std::min(vertices[i + 1].x, c_upper) : c_upper;
    // f0 is continuous on (0, inf) for every shipped family, so the value at
    // a piece boundary equals the one-sided limit from inside the piece.
    worst = std::max(worst, deviation(level, reference(left)));
    worst = std::max(worst, deviation(level, reference(right)));
  }
  return worst;
}

double sup_relative_error(const GrenanderEstimate& estimate,
                          const Family& family, double c_upper) {
  return sup_relative_error(
      estimate,
      [&family](double x) {
        return x == 0.0 ? density_at_zero(family) : density(family, x);
      },
      c_upper);
}

}  // namespace grenzero
