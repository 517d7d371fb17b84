#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grenzero/concave_majorant.hpp"
#include "grenzero/random.hpp"

namespace grenzero {

// Limit objects for the Grenander estimator near the origin. N is a
// unit-rate Poisson process with arrival times T_1 < T_2 < ..., and
// Y_gamma = sup_j j / T_j^(1/gamma) is the right derivative at zero of the
// least concave majorant of t -> N(t^gamma).

/// log of exp(-m) m^k / k!, with log p(0; 0) = 0 and log p(0; k > 0) = -inf.
double log_poisson_pmf(double m, long long k);

struct YGammaCdfResult {
  double x = 0.0;
  double gamma = 1.0;
  double cdf = 0.0;
  std::size_t terms = 0;    ///< K, number of first-touch terms summed
  double tail_bound = 0.0;  ///< bound on |cdf - exact|
  bool closed_form = false;
};

/// P(Y_gamma <= x). For gamma = 1 this is 1 - 1/x on [1, inf) and 0 below.
/// For gamma < 1 it is 1 - sum_k a_k where a_k is the probability that k is
/// the first index with N((k/x)^gamma) = k. tol in (0, 1e-3].
YGammaCdfResult ygamma_cdf(double x, double gamma, double tol = 1e-10);

struct CdfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// cdf of 1/U^(1/gamma) (lower) and of 1/T_1^(1/gamma) (upper).
CdfBounds ygamma_bounds(double x, double gamma);

/// Stop after a fixed number of arrivals or at a time horizon.
struct PathStop {
  enum class Kind { count, horizon };
  Kind kind = Kind::count;
  double limit = 1.0;

  static PathStop arrivals(std::size_t n) {
    return {Kind::count, static_cast<double>(n)};
  }
  static PathStop until(double horizon) { return {Kind::horizon, horizon}; }
};

struct PoissonPath {
  std::vector<double> arrivals;
  double horizon = 0.0;  ///< last arrival (count rule) or the requested horizon
  StreamId stream;

  std::size_t count() const { return arrivals.size(); }
};

PoissonPath sample_poisson_path(RandomStream& rng, PathStop stop);

struct YGammaControl {
  std::size_t window = 1000;   ///< arrivals without a new record before stopping
  double margin = 1e-6;        ///< relative margin on the running record
  int max_doublings = 48;      ///< horizon doublings before giving up
};

/// One draw of Y_gamma by the record-window stopping rule.
double sample_ygamma(double gamma, RandomStream& rng,
                     const YGammaControl& control = {});

struct SupStatistic {
  double value = 0.0;
  double location = 0.0;
};

struct HGammaRealization {
  double gamma = 1.0;
  double c = 1.0;
  std::vector<double> jumps;   ///< s_j = T_j^(1/gamma) that fall in [0, c]
  /// Hull vertices of the path up to and including the first one beyond c.
  std::vector<Vertex> vertices;
  std::vector<double> breaks;  ///< piece starts of h_gamma on [0, c); breaks[0] = 0
  std::vector<double> levels;  ///< h_gamma on [breaks[i], breaks[i+1])
  double y_gamma = 0.0;        ///< h_gamma(0+)
  SupStatistic sup;
  double horizon = 0.0;         ///< final horizon in the s scale
  std::size_t arrivals = 0;     ///< N at the final horizon, unit-rate scale
  int doublings = 0;

  double h(double t) const;
};

HGammaRealization simulate_hgamma(double gamma, double c, RandomStream& rng,
                                  const YGammaControl& control = {});

/// sup over t in [0, c] of |t^(1-gamma) h(t) / gamma - 1| for a nonincreasing
/// step function h with the given pieces. Location 0 means the supremum is
/// the t -> 0+ limit. Ties keep the smaller location.
SupStatistic sup_statistic(std::span<const double> breaks,
                           std::span<const double> levels, double gamma,
                           double c);
SupStatistic sup_statistic(const HGammaRealization& realization, double c);

}  // namespace grenzero
