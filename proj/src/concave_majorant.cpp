#include "grenzero/concave_majorant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grenzero/errors.hpp"

namespace grenzero {
namespace {

constexpr double kCollinearTolerance = 1e-12;

double segment_slope(const Vertex& a, const Vertex& b) {
  return (b.y - a.y) / (b.x - a.x);
}

// True when `next` is a strict concave bend after `previous`.
bool strictly_decreasing(double previous, double next) {
  if (next >= previous) return false;
  const double scale = std::max(std::abs(previous), std::abs(next));
  return previous - next > kCollinearTolerance * scale;
}

}  // namespace

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values,
                           double origin)
    : knots_(std::move(knots)), values_(std::move(values)), origin_(origin) {
  detail::require(knots_.size() == values_.size(),
                  "step function: knots and values differ in length");
  detail::require(std::isfinite(origin_), "step function: origin not finite");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    detail::require(std::isfinite(knots_[i]) && std::isfinite(values_[i]),
                    "step function: non-finite knot or value");
    detail::require(knots_[i] >= 0.0, "step function: negative knot");
    if (i > 0) {
      detail::require(knots_[i] > knots_[i - 1],
                      "step function: knots must be strictly increasing");
      detail::require(values_[i] >= values_[i - 1],
                      "step function: values must be nondecreasing");
    }
  }
  if (!values_.empty()) {
    detail::require(origin_ <= values_.front(),
                    "step function: origin exceeds first value");
  }
}

double StepFunction::operator()(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  if (it == knots_.begin()) return origin_;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

Majorant::Majorant(std::vector<Vertex> vertices, double terminal_slope)
    : vertices_(std::move(vertices)), terminal_slope_(terminal_slope) {
  detail::require(!vertices_.empty(), "majorant: no vertices");
  detail::require(vertices_.front().x == 0.0, "majorant: must start at x = 0");
  slopes_.reserve(vertices_.size() - 1);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    detail::require(vertices_[i].x > vertices_[i - 1].x,
                    "majorant: vertex abscissae must increase");
    slopes_.push_back(segment_slope(vertices_[i - 1], vertices_[i]));
  }
}

double Majorant::value(double x) const {
  detail::require(x >= 0.0, "majorant: evaluation point must be >= 0");
  const auto it = std::upper_bound(
      vertices_.begin(), vertices_.end(), x,
      [](double lhs, const Vertex& v) { return lhs < v.x; });
  const auto i = static_cast<std::size_t>(it - vertices_.begin()) - 1;
  const double s = i < slopes_.size() ? slopes_[i] : terminal_slope_;
  return vertices_[i].y + s * (x - vertices_[i].x);
}

HullBuilder::HullBuilder(Vertex start) {
  detail::require(start.x == 0.0 && std::isfinite(start.y),
                  "hull: start vertex must be (0, finite)");
  hull_.push_back(start);
}

void HullBuilder::push(Vertex p) {
  detail::require(p.x > hull_.back().x && std::isfinite(p.x) &&
                      std::isfinite(p.y),
                  "hull: points must be finite with increasing x");
  while (hull_.size() >= 2) {
    const Vertex& a = hull_[hull_.size() - 2];
    const Vertex& b = hull_.back();
    if (strictly_decreasing(segment_slope(a, b), segment_slope(b, p))) break;
    hull_.pop_back();
  }
  hull_.push_back(p);
}

Majorant HullBuilder::finish() const {
  // The path is flat after its last point, so trailing zero-slope segments
  // merge into the terminal ray.
  std::vector<Vertex> hull = hull_;
  while (hull.size() >= 2 &&
         segment_slope(hull[hull.size() - 2], hull.back()) <= 0.0) {
    hull.pop_back();
  }
  return Majorant(std::move(hull), 0.0);
}

Majorant lcm(const StepFunction& step) {
  detail::require(!step.empty(), "lcm: step function has no knots");
  const auto knots = step.knots();
  const auto values = step.values();

  std::size_t first = 0;
  Vertex start{0.0, step.origin()};
  if (knots.front() == 0.0) {
    start.y = values.front();
    first = 1;
  }
  HullBuilder builder(start);
  for (std::size_t i = first; i < knots.size(); ++i) {
    builder.push({knots[i], values[i]});
  }
  return builder.finish();
}

double slope(const Majorant& majorant, double x, Side side) {
  const auto vertices = majorant.vertices();
  const auto slopes = majorant.slopes();
  const auto by_x = [](const Vertex& v, double value) { return v.x < value; };
  std::size_t segment = 0;
  if (side == Side::right) {
    detail::require(x >= 0.0, "slope: x must be >= 0");
    const auto it = std::upper_bound(
        vertices.begin(), vertices.end(), x,
        [](double value, const Vertex& v) { return value < v.x; });
    segment = static_cast<std::size_t>(it - vertices.begin()) - 1;
  } else {
    detail::require(x > 0.0, "slope: left derivative requires x > 0");
    const auto it = std::lower_bound(vertices.begin(), vertices.end(), x, by_x);
    segment = static_cast<std::size_t>(it - vertices.begin()) - 1;
  }
  return segment < slopes.size() ? slopes[segment] : majorant.terminal_slope();
}

double argmax_affine(const StepFunction& step, double y, Side side) {
  detail::require(std::isfinite(y), "argmax_affine: slope level not finite");
  if (y <= 0.0) throw ArgumentError("argmax_affine: unbounded argmax (y <= 0)");

  // step(x) - y x decreases between jumps, so maximizers lie in {0} u knots.
  const auto knots = step.knots();
  const auto values = step.values();
  const auto objective = [&](std::size_t i) {
    return i == 0 ? step(0.0) : values[i - 1] - y * knots[i - 1];
  };
  const auto magnitude = [&](std::size_t i) {
    return i == 0 ? std::abs(step(0.0))
                  : std::abs(values[i - 1]) + y * knots[i - 1];
  };
  const auto abscissa = [&](std::size_t i) {
    return i == 0 ? 0.0 : knots[i - 1];
  };

  // Candidate 0 is x = 0, candidate i > 0 is knot i - 1. Values that agree
  // to the hull's collinearity tolerance count as ties, so a slope level
  // read off the majorant yields both ends of its segment.
  double best = objective(0);
  double best_scale = magnitude(0);
  for (std::size_t i = 1; i <= knots.size(); ++i) {
    if (objective(i) > best) {
      best = objective(i);
      best_scale = magnitude(i);
    }
  }
  double left = std::numeric_limits<double>::infinity();
  double right = 0.0;
  for (std::size_t i = 0; i <= knots.size(); ++i) {
    const double gap = best - objective(i);
    if (gap <= kCollinearTolerance * std::max(magnitude(i), best_scale)) {
      left = std::min(left, abscissa(i));
      right = std::max(right, abscissa(i));
    }
  }
  return side == Side::left ? left : right;
}

SwitchingReport verify_switching(const StepFunction& step,
                                 std::span<const double> x_grid,
                                 std::span<const double> y_grid) {
  for (double x : x_grid) {
    detail::require(x > 0.0 && std::isfinite(x),
                    "verify_switching: x grid must be positive");
  }
  for (double y : y_grid) {
    detail::require(y > 0.0 && std::isfinite(y),
                    "verify_switching: y grid must be positive");
  }

  const Majorant majorant = lcm(step);
  std::vector<double> argmax_left(y_grid.size());
  std::vector<double> argmax_right(y_grid.size());
  for (std::size_t j = 0; j < y_grid.size(); ++j) {
    argmax_left[j] = argmax_affine(step, y_grid[j], Side::left);
    argmax_right[j] = argmax_affine(step, y_grid[j], Side::right);
  }

  SwitchingReport report;
  report.x_grid_size = x_grid.size();
  report.y_grid_size = y_grid.size();
  for (double x : x_grid) {
    const double left_slope = slope(majorant, x, Side::left);
    const double right_slope = slope(majorant, x, Side::right);
    for (std::size_t j = 0; j < y_grid.size(); ++j) {
      const double y = y_grid[j];
      ++report.pairs_checked;

      const bool strict_lhs = left_slope < y;
      const bool strict_rhs = argmax_right[j] < x;
      if (strict_lhs != strict_rhs) {
        ++report.strict_violations;
        report.violations.push_back(
            {x, y, SwitchingRelation::strict, strict_lhs, strict_rhs});
      }

      const bool weak_lhs = right_slope <= y;
      const bool weak_rhs = argmax_left[j] <= x;
      if (weak_lhs != weak_rhs) {
        ++report.weak_violations;
        report.violations.push_back(
            {x, y, SwitchingRelation::weak, weak_lhs, weak_rhs});
      }

      const bool naive_lhs = left_slope <= y;
      const bool naive_rhs = argmax_right[j] <= x;
      if (naive_lhs != naive_rhs) {
        report.naive_failures.push_back(
            {x, y, SwitchingRelation::naive, naive_lhs, naive_rhs});
      }
    }
  }
  return report;
}

}  // namespace grenzero
