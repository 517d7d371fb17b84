#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grenzero/step_function.hpp"

namespace grenzero {

enum class Side { left, right };

struct Vertex {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Least concave majorant of a StepFunction: a piecewise-linear concave
/// function given by its hull vertices, starting at x = 0. Segment slopes
/// strictly decrease; beyond the last vertex the majorant continues with
/// `terminal_slope()`.
class Majorant {
 public:
  Majorant(std::vector<Vertex> vertices, double terminal_slope);

  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const double> slopes() const { return slopes_; }
  double terminal_slope() const { return terminal_slope_; }

  /// Piecewise-linear evaluation at x >= 0.
  double value(double x) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<double> slopes_;
  double terminal_slope_;
};

/// Incremental upper-hull scan for points supplied in increasing x order.
/// Each push is amortized O(1); the current hull always ends at the last
/// point pushed.
class HullBuilder {
 public:
  explicit HullBuilder(Vertex start);

  /// Requires p.x greater than every earlier abscissa.
  void push(Vertex p);
  /// Current hull vertices, including a trailing nonincreasing tail.
  std::span<const Vertex> vertices() const { return hull_; }
  /// The majorant of a path that stays flat after the last point.
  Majorant finish() const;

 private:
  std::vector<Vertex> hull_;
};

/// Upper-hull scan over {(0, step(0))} and the knot points. Linear in the
/// number of knots. Collinear triples (slopes equal to a relative 1e-12) are
/// merged, so every returned vertex is a strict kink.
Majorant lcm(const StepFunction& step);

/// One-sided derivative of the majorant. side = left requires x > 0.
double slope(const Majorant& majorant, double x, Side side);

/// inf (left) or sup (right) of the maximizers of x -> step(x) - y x over
/// [0, inf). Requires y > 0.
double argmax_affine(const StepFunction& step, double y, Side side);

enum class SwitchingRelation {
  strict,  ///< slope_L(x) < y  <=>  argmax_R(y) < x
  weak,    ///< slope_R(x) <= y <=> argmax_L(y) <= x
  naive,   ///< slope_L(x) <= y <=> argmax_R(y) <= x  (not valid in general)
};

struct SwitchingWitness {
  double x = 0.0;
  double y = 0.0;
  SwitchingRelation relation = SwitchingRelation::naive;
  bool slope_side = false;   ///< truth of the estimator-side event
  bool argmax_side = false;  ///< truth of the argmax-side event
};

struct SwitchingReport {
  std::size_t x_grid_size = 0;
  std::size_t y_grid_size = 0;
  std::size_t pairs_checked = 0;
  std::size_t strict_violations = 0;
  std::size_t weak_violations = 0;
  std::vector<SwitchingWitness> violations;      ///< strict/weak failures
  std::vector<SwitchingWitness> naive_failures;  ///< naive relation failures
};

/// Evaluates both switching identities and the naive weak/weak variant on
/// every (x, y) grid pair. Grid values must be positive.
SwitchingReport verify_switching(const StepFunction& step,
                                 std::span<const double> x_grid,
                                 std::span<const double> y_grid);

}  // namespace grenzero
