#pragma once

namespace grenzero {

/// log Gamma(x) for x > 0.
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0 (x may be +inf).
double reg_lower_gamma(double s, double x);
/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double reg_upper_gamma(double s, double x);

/// Non-regularized upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1)
/// e^(-t) dt for s > -1 and x > 0. For s in (-1, 0) it uses
/// Gamma(s, x) = (Gamma(s + 1, x) - x^s e^(-x)) / s; s = 0 is E1(x).
double upper_gamma(double s, double x);

/// Beta(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_function(double a, double b);

// Subbotin (generalized Gaussian) law with density exp(-|z|^r / r) / C_r,
// C_r = 2 Gamma(1/r) r^(1/r - 1). r = 2 is the standard normal.

double subbotin_normalizer(double r);
double subbotin_pdf(double r, double z);
double subbotin_cdf(double r, double z);
/// Survival function 1 - Phi_r(z), accurate deep in the upper tail.
double subbotin_sf(double r, double z);
/// Inverse of the survival function: the z with subbotin_sf(r, z) = p,
/// p in (0, 1).
double subbotin_sf_inverse(double r, double p);

}  // namespace grenzero
