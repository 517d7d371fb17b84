#include "grenzero/families.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "grenzero/errors.hpp"
#include "grenzero/special_functions.hpp"

namespace grenzero {

using detail::require;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

// Bracketed bisection to relative width 1e-14, then one Newton step kept
// only if it stays inside the final bracket.
double invert_cdf(const std::function<double(double)>& F,
                  const std::function<double(double)>& f, double u, double hi) {
  while (F(hi) < u) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("quantile: no upper bracket");
  }
  double lo = 0.5 * hi;
  while (F(lo) >= u) {
    hi = lo;
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw ConvergenceError("quantile: no lower bracket");
    }
  }
  // F(lo) < u <= F(hi)
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  const double slope = f(x);
  if (slope > 0.0 && std::isfinite(slope)) {
    const double polished = x - (F(x) - u) / slope;
    if (polished >= lo && polished <= hi) return polished;
  }
  return x;
}

void check_unit_support(double x, std::string_view name) {
  require(x > 0.0 && x <= 1.0,
          std::string(name) + ": density argument outside support (0, 1]");
}

void check_cdf_argument(double x) {
  require(x >= 0.0 && !std::isnan(x), "cdf: argument must be >= 0");
}

// --- family-specific pieces -------------------------------------------

double beta_constant(const BetaType& b) {
  return 1.0 / beta_function(1.0 - b.a, 2.0);
}

double subbotin_exponent_term(const SubbotinMixture& s, double kappa) {
  // exp{-(|kappa - mu|^r - |kappa|^r) / r}
  const double diff =
      std::pow(std::abs(kappa - s.mu), s.r) - std::pow(std::abs(kappa), s.r);
  return std::exp(-diff / s.r);
}

}  // namespace

void validate(const Family& family) {
  std::visit(
      overloaded{
          [](const Uniform&) {},
          [](const BetaType& b) {
            require(b.a >= 0.0 && b.a < 1.0, "beta: a must lie in [0, 1)");
          },
          [](const GammaMixture& g) {
            require(g.c > 0.0 && g.c <= 1.0, "gammamix: c must lie in (0, 1]");
          },
          [](const SubbotinMixture& s) {
            require(s.r >= 1.0 && std::isfinite(s.r), "subbotin: r must be >= 1");
            require(s.eps > 0.0 && s.eps < 1.0,
                    "subbotin: eps must lie in (0, 1)");
            require(s.mu > 0.0 && std::isfinite(s.mu),
                    "subbotin: mu must be positive");
          },
          [](const Lehmann& l) {
            require(l.gl > 0.0 && l.gl < 1.0, "lehmann: gl must lie in (0, 1)");
            require(l.eps > 0.0 && l.eps < 1.0,
                    "lehmann: eps must lie in (0, 1)");
          },
      },
      family);
}

Family parse_family(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  std::map<std::string, double, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      require(eq != std::string_view::npos && eq > 0,
              "family spec: expected key=value, got '" + std::string(item) + "'");
      const std::string_view value_text = item.substr(eq + 1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(
          value_text.data(), value_text.data() + value_text.size(), value);
      require(ec == std::errc() && ptr == value_text.data() + value_text.size(),
              "family spec: bad number '" + std::string(value_text) + "'");
      params.emplace(std::string(item.substr(0, eq)), value);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }

  const auto take = [&](std::string_view key) {
    const auto it = params.find(key);
    require(it != params.end(), "family spec '" + std::string(spec) +
                                    "': missing parameter " + std::string(key));
    const double value = it->second;
    params.erase(it);
    return value;
  };

  Family family;
  if (kind == "uniform") {
    family = Uniform{};
  } else if (kind == "beta") {
    family = BetaType{take("a")};
  } else if (kind == "gammamix") {
    family = GammaMixture{take("c")};
  } else if (kind == "subbotin") {
    const double r = take("r");
    const double eps = take("eps");
    family = SubbotinMixture{r, eps, take("mu")};
  } else if (kind == "lehmann") {
    const double gl = take("gl");
    family = Lehmann{gl, take("eps")};
  } else {
    throw ArgumentError("unknown family '" + std::string(kind) + "'");
  }
  require(params.empty(), "family spec '" + std::string(spec) +
                              "': unexpected parameter " +
                              (params.empty() ? "" : params.begin()->first));
  validate(family);
  return family;
}

std::string to_string(const Family& family) {
  return std::visit(
      overloaded{
          [](const Uniform&) { return std::string("uniform"); },
          [](const BetaType& b) { return "beta:a=" + format_number(b.a); },
          [](const GammaMixture& g) {
            return "gammamix:c=" + format_number(g.c);
          },
          [](const SubbotinMixture& s) {
            return "subbotin:r=" + format_number(s.r) +
                   ",eps=" + format_number(s.eps) + ",mu=" + format_number(s.mu);
          },
          [](const Lehmann& l) {
            return "lehmann:gl=" + format_number(l.gl) +
                   ",eps=" + format_number(l.eps);
          },
      },
      family);
}

double support_max(const Family& family) {
  return std::holds_alternative<GammaMixture>(family) ? kInf : 1.0;
}

double density(const Family& family, double x) {
  validate(family);
  return std::visit(
      overloaded{
          [x](const Uniform&) {
            check_unit_support(x, "uniform");
            return 1.0;
          },
          [x](const BetaType& b) {
            check_unit_support(x, "beta");
            return beta_constant(b) * std::pow(x, -b.a) * (1.0 - x);
          },
          [x](const GammaMixture& g) {
            require(x > 0.0 && std::isfinite(x),
                    "gammamix: density argument outside support (0, inf)");
            return upper_gamma(g.c - 1.0, x) / std::exp(ln_gamma(g.c));
          },
          [x](const SubbotinMixture& s) {
            check_unit_support(x, "subbotin");
            if (x == 1.0) {
              return s.r == 1.0 ? 1.0 - s.eps + s.eps * std::exp(-s.mu)
                                : 1.0 - s.eps;
            }
            const double kappa = subbotin_sf_inverse(s.r, x);
            return 1.0 - s.eps + s.eps * subbotin_exponent_term(s, kappa);
          },
          [x](const Lehmann& l) {
            check_unit_support(x, "lehmann");
            return (1.0 - l.eps) + l.eps * l.gl * std::pow(x, l.gl - 1.0);
          },
      },
      family);
}

double density_at_zero(const Family& family) {
  validate(family);
  return std::visit(
      overloaded{
          [](const Uniform&) { return 1.0; },
          [](const BetaType& b) { return b.a == 0.0 ? beta_constant(b) : kInf; },
          [](const GammaMixture&) { return kInf; },
          [](const SubbotinMixture& s) {
            return s.r == 1.0 ? 1.0 - s.eps + s.eps * std::exp(s.mu) : kInf;
          },
          [](const Lehmann&) { return kInf; },
      },
      family);
}

double cdf(const Family& family, double x) {
  validate(family);
  check_cdf_argument(x);
  if (x == 0.0) return 0.0;
  if (x >= support_max(family)) return 1.0;
  return std::visit(
      overloaded{
          [x](const Uniform&) { return x; },
          [x](const BetaType& b) {
            return (2.0 - b.a) * std::pow(x, 1.0 - b.a) -
                   (1.0 - b.a) * std::pow(x, 2.0 - b.a);
          },
          [x](const GammaMixture& g) {
            return reg_lower_gamma(g.c, x) +
                   x * upper_gamma(g.c - 1.0, x) / std::exp(ln_gamma(g.c));
          },
          [x](const SubbotinMixture& s) {
            const double kappa = subbotin_sf_inverse(s.r, x);
            return (1.0 - s.eps) * x + s.eps * subbotin_sf(s.r, kappa - s.mu);
          },
          [x](const Lehmann& l) {
            return (1.0 - l.eps) * x + l.eps * std::pow(x, l.gl);
          },
      },
      family);
}

double quantile(const Family& family, double u) {
  validate(family);
  require(u > 0.0 && u < 1.0, "quantile: u must lie in (0, 1)");
  if (std::holds_alternative<Uniform>(family)) return u;
  const auto F = [&family](double x) { return cdf(family, x); };
  const auto f = [&family](double x) {
    return x < support_max(family) ? density(family, x) : 0.0;
  };
  return invert_cdf(F, f, u, 1.0);
}

std::vector<double> sample(const Family& family, std::size_t n,
                           RandomStream& rng) {
  validate(family);
  require(n >= 1, "sample: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::holds_alternative<Uniform>(family)) {
      out.push_back(rng.uniform());
    } else if (const auto* g = std::get_if<GammaMixture>(&family)) {
      const double scale = rng.gamma(g->c);
      out.push_back(rng.uniform() * scale);
    } else {
      out.push_back(quantile(family, rng.uniform()));
    }
  }
  return out;
}

std::string_view to_string(GrowthClass growth) {
  switch (growth) {
    case GrowthClass::bounded:
      return "G0";
    case GrowthClass::logarithmic:
      return "G1";
    case GrowthClass::polynomial:
      return "G2";
    case GrowthClass::slowly_varying:
      return "RV1";
  }
  return "?";
}

TailProfile tail_profile(const Family& family) {
  validate(family);
  const auto polynomial = [](double alpha, double c2) {
    TailProfile p;
    p.gamma = 1.0 - alpha;
    p.growth = GrowthClass::polynomial;
    p.alpha = alpha;
    p.c2 = c2;
    p.c2_tilde = std::pow(c2 / (1.0 - alpha), 1.0 / (1.0 - alpha));
    p.normalizing_rule = "1 / (C2~ n^(1/(1-alpha)))";
    return p;
  };
  return std::visit(
      overloaded{
          [](const Uniform&) {
            TailProfile p;
            p.c1 = 1.0;
            p.normalizing_rule = "1 / (f(0+) n)";
            return p;
          },
          [&](const BetaType& b) { return polynomial(b.a, beta_constant(b)); },
          [&](const GammaMixture& g) {
            if (g.c < 1.0) {
              const double alpha = 1.0 - g.c;
              return polynomial(alpha,
                                1.0 / (alpha * std::exp(ln_gamma(1.0 - alpha))));
            }
            TailProfile p;
            p.growth = GrowthClass::logarithmic;
            p.beta = 1.0;
            p.c1 = 1.0;
            p.normalizing_rule = "1 / (C1 n (log n)^beta)";
            return p;
          },
          [](const SubbotinMixture& s) {
            TailProfile p;
            if (s.r == 1.0) {
              p.c1 = 1.0 - s.eps + s.eps * std::exp(s.mu);
              p.normalizing_rule = "1 / (n (1 - eps + eps e^mu))";
            } else {
              p.growth = GrowthClass::slowly_varying;
              p.normalizing_rule =
                  "1 - Phi_r(Phi_r^-1(1 - 1/(n eps)) + mu)";
            }
            return p;
          },
          [&](const Lehmann& l) { return polynomial(1.0 - l.gl, l.eps * l.gl); },
      },
      family);
}

double normalizing_sequence(const Family& family, double n) {
  require(n >= 2.0 && std::isfinite(n), "normalizing_sequence: n must be >= 2");
  const TailProfile profile = tail_profile(family);
  switch (profile.growth) {
    case GrowthClass::bounded:
      return 1.0 / (n * *profile.c1);
    case GrowthClass::logarithmic:
      return 1.0 / (*profile.c1 * n * std::pow(std::log(n), *profile.beta));
    case GrowthClass::polynomial:
      return 1.0 / (*profile.c2_tilde * std::pow(n, 1.0 / (1.0 - *profile.alpha)));
    case GrowthClass::slowly_varying: {
      const auto& s = std::get<SubbotinMixture>(family);
      require(n * s.eps > 1.0,
              "normalizing_sequence: subbotin with r > 1 needs n eps > 1");
      const double z = subbotin_sf_inverse(s.r, 1.0 / (n * s.eps));
      return subbotin_sf(s.r, z + s.mu);
    }
  }
  throw ArgumentError("normalizing_sequence: unknown growth class");
}

double validate_gnedenko(const Family& family, double n,
                         std::span<const double> x_grid) {
  const double a_n = normalizing_sequence(family, n);
  const double gamma = tail_profile(family).gamma;
  double worst = 0.0;
  for (double x : x_grid) {
    require(x > 0.0 && std::isfinite(x), "validate_gnedenko: grid must be > 0");
    worst = std::max(worst, std::abs(n * cdf(family, a_n * x) - std::pow(x, gamma)));
  }
  return worst;
}

}  // namespace grenzero
