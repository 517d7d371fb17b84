#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "grenzero/random.hpp"

namespace grenzero {

// Sampling families with nonincreasing densities. All live on (0, 1] except
// the gamma mixture, which lives on (0, inf).

/// Uniform(0, 1).
struct Uniform {};

/// f(x) = x^(-a) (1 - x) / B(1 - a, 2) on (0, 1], a in [0, 1).
struct BetaType {
  double a = 0.5;
};

/// X = U * Y with U ~ Uniform(0, 1), Y ~ Gamma(c, 1), c in (0, 1]:
/// f(x) = int_x^inf y^(c-2) e^(-y) dy / Gamma(c).
struct GammaMixture {
  double c = 0.5;
};

/// Law of 1 - Phi_r(X) with X ~ (1 - eps) Phi_r + eps Phi_r(. - mu),
/// r >= 1, eps in (0, 1), mu > 0.
struct SubbotinMixture {
  double r = 2.0;
  double eps = 0.1;
  double mu = 1.0;
};

/// G(y) = (1 - eps) y + eps y^gl, gl in (0, 1), eps in (0, 1).
struct Lehmann {
  double gl = 0.5;
  double eps = 0.1;
};

using Family = std::variant<Uniform, BetaType, GammaMixture, SubbotinMixture,
                            Lehmann>;

/// Checks parameter ranges; throws ArgumentError.
void validate(const Family& family);

/// Parses `uniform`, `beta:a=<v>`, `gammamix:c=<v>`,
/// `subbotin:r=<v>,eps=<v>,mu=<v>`, `lehmann:gl=<v>,eps=<v>`.
Family parse_family(std::string_view spec);
std::string to_string(const Family& family);

/// Right end of the support (1 or +inf).
double support_max(const Family& family);

double density(const Family& family, double x);
/// lim_{x -> 0+} density; +inf for families unbounded at zero.
double density_at_zero(const Family& family);
double cdf(const Family& family, double x);
double quantile(const Family& family, double u);
std::vector<double> sample(const Family& family, std::size_t n,
                           RandomStream& rng);

enum class GrowthClass {
  bounded,      ///< G0: f(0+) < inf
  logarithmic,  ///< G1: (log 1/x)^(-beta) f(x) -> C1
  polynomial,   ///< G2: x^alpha f(x) -> C2
  slowly_varying,  ///< F regularly varying with index 1, none of the above
};

std::string_view to_string(GrowthClass growth);

/// Behaviour of the density at zero and the normalizing sequence a_n with
/// n F(a_n) -> 1.
struct TailProfile {
  double gamma = 1.0;  ///< extreme-value exponent, n F(a_n x) -> x^gamma
  GrowthClass growth = GrowthClass::bounded;
  std::optional<double> alpha;     ///< G2 exponent
  std::optional<double> beta;      ///< G1 exponent
  std::optional<double> c1;        ///< G0 (f(0+)) or G1 constant
  std::optional<double> c2;        ///< G2 constant
  std::optional<double> c2_tilde;  ///< (C2 / (1 - alpha))^(1 / (1 - alpha))
  std::string normalizing_rule;
};

TailProfile tail_profile(const Family& family);

/// a_n for n >= 2.
double normalizing_sequence(const Family& family, double n);

/// max over the grid of |n F(a_n x) - x^gamma|.
double validate_gnedenko(const Family& family, double n,
                         std::span<const double> x_grid);

}  // namespace grenzero
