#include "grenzero/special_functions.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "grenzero/errors.hpp"

namespace grenzero {

using detail::require;

double ln_gamma(double x) {
  require(x > 0.0 && std::isfinite(x), "ln_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

double reg_lower_gamma(double s, double x) {
  require(s > 0.0 && std::isfinite(s), "reg_lower_gamma: s must be positive");
  require(x >= 0.0 && !std::isnan(x), "reg_lower_gamma: x must be >= 0");
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(s, x);
}

double reg_upper_gamma(double s, double x) {
  require(s > 0.0 && std::isfinite(s), "reg_upper_gamma: s must be positive");
  require(x >= 0.0 && !std::isnan(x), "reg_upper_gamma: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(s, x);
}

double upper_gamma(double s, double x) {
  require(s > -1.0 && std::isfinite(s), "upper_gamma: s must exceed -1");
  require(x > 0.0 && !std::isnan(x), "upper_gamma: x must be positive");
  if (std::isinf(x)) return 0.0;
  if (s > 0.0) return boost::math::tgamma(s, x);
  if (s == 0.0) return boost::math::expint(1, x);
  return (boost::math::tgamma(s + 1.0, x) - std::pow(x, s) * std::exp(-x)) / s;
}

double beta_function(double a, double b) {
  require(a > 0.0 && b > 0.0, "beta_function: arguments must be positive");
  return boost::math::beta(a, b);
}

double subbotin_normalizer(double r) {
  require(r > 0.0 && std::isfinite(r), "subbotin: r must be positive");
  return 2.0 * std::exp(ln_gamma(1.0 / r)) * std::pow(r, 1.0 / r - 1.0);
}

double subbotin_pdf(double r, double z) {
  return std::exp(-std::pow(std::abs(z), r) / r) / subbotin_normalizer(r);
}

double subbotin_sf(double r, double z) {
  require(r > 0.0 && std::isfinite(r), "subbotin: r must be positive");
  require(!std::isnan(z), "subbotin: z is NaN");
  if (std::isinf(z)) return z > 0 ? 0.0 : 1.0;
  const double u = std::pow(std::abs(z), r) / r;
  if (z >= 0.0) return 0.5 * boost::math::gamma_q(1.0 / r, u);
  return 0.5 + 0.5 * boost::math::gamma_p(1.0 / r, u);
}

double subbotin_cdf(double r, double z) {
  require(r > 0.0 && std::isfinite(r), "subbotin: r must be positive");
  require(!std::isnan(z), "subbotin: z is NaN");
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  const double u = std::pow(std::abs(z), r) / r;
  if (z >= 0.0) return 0.5 + 0.5 * boost::math::gamma_p(1.0 / r, u);
  return 0.5 * boost::math::gamma_q(1.0 / r, u);
}

double subbotin_sf_inverse(double r, double p) {
  require(r > 0.0 && std::isfinite(r), "subbotin: r must be positive");
  require(p > 0.0 && p < 1.0, "subbotin_sf_inverse: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (p < 0.5) {
    const double u = boost::math::gamma_q_inv(1.0 / r, 2.0 * p);
    return std::pow(r * u, 1.0 / r);
  }
  const double u = boost::math::gamma_p_inv(1.0 / r, 2.0 * p - 1.0);
  return -std::pow(r * u, 1.0 / r);
}

}  // namespace grenzero
