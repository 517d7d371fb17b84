#pragma once

#include <optional>
#include <span>

#include "grenzero/grenander.hpp"

namespace grenzero {

/// Plug-in estimate of the contamination weight for data on (0, 1] with
/// density g = (1 - eps) + eps f, f nonincreasing and f(1) = 0. The
/// Grenander estimator is read at the largest observation with its left
/// version, the last informative slope, and eps = 1 - g(anchor) is clamped
/// to [0, 1].
double estimate_epsilon(std::span<const double> sample);

class ContaminationEstimate {
 public:
  explicit ContaminationEstimate(GrenanderEstimate fit);

  double epsilon_hat() const { return epsilon_hat_; }
  /// Largest observation; the Grenander estimator is anchored here.
  double anchor() const { return anchor_; }
  double anchor_level() const { return anchor_level_; }
  const GrenanderEstimate& fit() const { return fit_; }
  /// True when epsilon_hat is 0 and no contaminating density exists.
  bool degenerate() const { return epsilon_hat_ == 0.0; }

  /// (g(y) - g^L(anchor)) / epsilon_hat for y in (0, anchor), 0 on
  /// [anchor, 1], nullopt when degenerate. y must lie in (0, 1].
  std::optional<double> density(double y) const;

 private:
  GrenanderEstimate fit_;
  double anchor_;
  double anchor_level_;
  double epsilon_hat_;
};

ContaminationEstimate contamination_estimate(std::span<const double> sample);

}  // namespace grenzero
