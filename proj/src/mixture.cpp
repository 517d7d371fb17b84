#include "grenzero/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "grenzero/errors.hpp"

namespace grenzero {
namespace {

void check_unit_sample(std::span<const double> sample) {
  detail::require(!sample.empty(), "mixture: empty sample");
  for (double y : sample) {
    detail::require(y > 0.0 && y <= 1.0,
                    "mixture: observations must lie in (0, 1]");
  }
}

}  // namespace

ContaminationEstimate::ContaminationEstimate(GrenanderEstimate fit)
    : fit_(std::move(fit)),
      anchor_(fit_.support_max()),
      anchor_level_(fit_.eval(anchor_, Side::left)),
      epsilon_hat_(std::clamp(1.0 - anchor_level_, 0.0, 1.0)) {}

std::optional<double> ContaminationEstimate::density(double y) const {
  detail::require(y > 0.0 && y <= 1.0, "mixture: y must lie in (0, 1]");
  if (degenerate()) return std::nullopt;
  if (y >= anchor_) return 0.0;
  return (fit_.eval(y, Side::right) - anchor_level_) / epsilon_hat_;
}

double estimate_epsilon(std::span<const double> sample) {
  return contamination_estimate(sample).epsilon_hat();
}

ContaminationEstimate contamination_estimate(std::span<const double> sample) {
  check_unit_sample(sample);
  return ContaminationEstimate(fit(sample));
}

}  // namespace grenzero
