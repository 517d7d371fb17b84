#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "grenzero/errors.hpp"
#include "grenzero/limit_laws.hpp"
#include "oracles.hpp"

using namespace grenzero;

TEST_CASE("log Poisson pmf") {
  CHECK(log_poisson_pmf(1.0, 1) == doctest::Approx(-1.0));
  CHECK(log_poisson_pmf(0.0, 0) == 0.0);
  CHECK(std::isinf(log_poisson_pmf(0.0, 3)));
  const double direct = std::exp(-2.5) * 2.5 * 2.5 * 2.5 / 6.0;
  CHECK(std::exp(log_poisson_pmf(2.5, 3)) == doctest::Approx(direct).epsilon(1e-14));
  // Large counts stay finite.
  CHECK(std::isfinite(log_poisson_pmf(1e6, 1000000)));
  CHECK_THROWS_AS(log_poisson_pmf(-1.0, 0), ArgumentError);
  CHECK_THROWS_AS(log_poisson_pmf(1.0, -1), ArgumentError);
}

TEST_CASE("closed form at gamma = 1") {
  const YGammaCdfResult r = ygamma_cdf(2.0, 1.0);
  CHECK(r.closed_form);
  CHECK(r.terms == 0);
  CHECK(r.cdf == 0.5);
  CHECK(ygamma_cdf(0.7, 1.0).cdf == 0.0);
  CHECK(ygamma_cdf(1.0, 1.0).cdf == 0.0);
  // The dynamic-programming oracle agrees with the closed form.
  for (double x : {1.5, 2.0, 5.0}) {
    CHECK(oracle::ygamma_cdf_dp(x, 1.0) == doctest::Approx(1.0 - 1.0 / x).epsilon(1e-9));
  }
}

TEST_CASE("first recursion term at x = 1") {
  // At x = 1, t_1 = 1 and the first touch term is a_1 = p(1; 1) = e^-1, so
  // the cdf is at most 1 - e^-1.
  CHECK(std::exp(log_poisson_pmf(1.0, 1)) == doctest::Approx(std::exp(-1.0)));
  const YGammaCdfResult r = ygamma_cdf(1.0, 0.5);
  CHECK(r.cdf <= 1.0 - std::exp(-1.0) + 1e-12);
}

TEST_CASE("series agrees with the non-crossing dynamic program") {
  const double points[][2] = {{0.5, 0.3}, {1.0, 0.5}, {2.0, 0.5}, {3.0, 0.5},
                              {1.5, 0.8}, {5.0, 0.2}, {0.8, 0.9}, {10.0, 0.6},
                              {4.0, 0.95}, {0.3, 0.1}};
  for (const auto& p : points) {
    const YGammaCdfResult r = ygamma_cdf(p[0], p[1]);
    const double dp = oracle::ygamma_cdf_dp(p[0], p[1]);
    INFO("x = " << p[0] << ", gamma = " << p[1]);
    CHECK(r.cdf == doctest::Approx(dp).epsilon(1e-8).scale(1.0));
    CHECK(r.tail_bound < 1e-10);
    CHECK(r.cdf >= 0.0);
    CHECK(r.cdf <= 1.0);
  }
}

TEST_CASE("sandwich bounds, monotonicity and limits") {
  CHECK(ygamma_bounds(1.0, 0.5).lower == 0.0);
  CHECK(ygamma_bounds(1.0, 0.5).upper == doctest::Approx(std::exp(-1.0)));
  CHECK(ygamma_bounds(2.0, 1.0).lower == doctest::Approx(0.5));
  CHECK(ygamma_bounds(2.0, 1.0).upper == doctest::Approx(std::exp(-0.5)));

  for (double gamma : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    double previous = 0.0;
    for (int i = 1; i <= 80; ++i) {
      const double x = 0.05 * std::pow(1.12, i);
      const double value = ygamma_cdf(x, gamma).cdf;
      const CdfBounds b = ygamma_bounds(x, gamma);
      REQUIRE(value >= previous - 1e-12);
      REQUIRE(b.lower <= value + 1e-12);
      REQUIRE(value <= b.upper + 1e-12);
      previous = value;
    }
    // Tails are heavy for small gamma; pick points where the bounds pin
    // the cdf near 1 and near 0.
    CHECK(ygamma_cdf(std::pow(1e4, 1.0 / gamma), gamma).cdf > 0.999);
    if (gamma < 1.0) CHECK(ygamma_cdf(std::pow(20.0, -1.0 / gamma), gamma).cdf < 1e-6);
  }
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(ygamma_cdf(1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(ygamma_cdf(1.0, 1.5), ArgumentError);
  CHECK_THROWS_AS(ygamma_cdf(-1.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(ygamma_cdf(1.0, 0.5, 0.1), ArgumentError);
  CHECK_THROWS_AS(ygamma_cdf(1.0, 0.5, 0.0), ArgumentError);
  RandomStream rng;
  CHECK_THROWS_AS(simulate_hgamma(0.5, 0.0, rng), ArgumentError);
  CHECK_THROWS_AS(simulate_hgamma(1.2, 1.0, rng), ArgumentError);
}

TEST_CASE("Poisson paths") {
  RandomStream a(5, 1, 0, 0), b(5, 1, 0, 0);
  const PoissonPath p = sample_poisson_path(a, PathStop::arrivals(100));
  const PoissonPath q = sample_poisson_path(b, PathStop::arrivals(100));
  CHECK(p.arrivals == q.arrivals);
  CHECK(p.count() == 100);
  CHECK(p.horizon == p.arrivals.back());
  CHECK(std::is_sorted(p.arrivals.begin(), p.arrivals.end()));
  CHECK(std::adjacent_find(p.arrivals.begin(), p.arrivals.end()) == p.arrivals.end());

  int within = 0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed, 2, 0, 0);
    const PoissonPath path = sample_poisson_path(rng, PathStop::until(1000.0));
    REQUIRE(path.horizon == 1000.0);
    if (!path.arrivals.empty()) REQUIRE(path.arrivals.back() <= 1000.0);
    within += std::abs(path.count() / 1000.0 - 1.0) < 0.1;
  }
  CHECK(within >= 99);

  double first = 0.0;
  const int seeds = 100000;
  for (int seed = 0; seed < seeds; ++seed) {
    RandomStream rng(static_cast<std::uint64_t>(seed), 3, 0, 0);
    first += sample_poisson_path(rng, PathStop::arrivals(1)).arrivals[0];
  }
  CHECK(std::abs(first / seeds - 1.0) < 0.01);
}

TEST_CASE("sup statistic on synthetic step functions") {
  // gamma = 1 with h = 1: the ratio is identically one.
  const std::vector<double> b0{0.0}, l0{1.0};
  const SupStatistic zero = sup_statistic(b0, l0, 1.0, 3.0);
  CHECK(zero.value == 0.0);

  // Three pieces compared with a dense grid plus the one-sided limits at
  // the break points.
  const std::vector<double> breaks{0.0, 0.3, 1.5};
  const std::vector<double> levels{10.0 / 3, 5.0 / 3, 0.4};
  for (double gamma : {0.5, 0.7, 1.0}) {
    for (double c : {0.2, 1.0, 2.0}) {
      const auto ratio = [&](double t, double level) {
        return std::abs(std::pow(t, 1.0 - gamma) * level / gamma - 1.0);
      };
      const auto level_at = [&](double t) {
        std::size_t i = 0;
        while (i + 1 < breaks.size() && breaks[i + 1] <= t) ++i;
        return levels[i];
      };
      double brute = gamma < 1.0 ? 1.0 : ratio(0.0, levels[0]);
      const int grid = 1000000;
      for (int i = 1; i <= grid; ++i) {
        const double t = c * i / grid;
        brute = std::max(brute, ratio(t, level_at(t)));
      }
      for (std::size_t i = 1; i < breaks.size(); ++i) {
        if (breaks[i] <= c) brute = std::max(brute, ratio(breaks[i], levels[i - 1]));
      }
      const SupStatistic s = sup_statistic(breaks, levels, gamma, c);
      INFO("gamma = " << gamma << ", c = " << c);
      CHECK(s.value == doctest::Approx(brute).epsilon(1e-9));
      CHECK(s.location >= 0.0);
      CHECK(s.location <= c);
    }
  }
}

TEST_CASE("gamma = 1 realizations: sup is y - 1 at zero") {
  for (std::uint32_t r = 0; r < 200; ++r) {
    RandomStream rng(9, 4, 0, r);
    const HGammaRealization h = simulate_hgamma(1.0, 5.0, rng);
    REQUIRE(h.sup.location == 0.0);
    REQUIRE(h.sup.value == doctest::Approx(h.y_gamma - 1.0));
    REQUIRE(h.y_gamma >= 1.0 / h.vertices[1].x);
  }
}

TEST_CASE("gamma = 1 windows end in a segment steeper than one") {
  // Any slope at or below one is crossed by N(t) eventually.
  int deep = 0;
  for (std::uint32_t r = 0; r < 3000; ++r) {
    RandomStream rng(20240101, 77, 0, r);
    const HGammaRealization h = simulate_hgamma(1.0, 5.0, rng);
    const Vertex& a = h.vertices[h.vertices.size() - 2];
    const Vertex& b = h.vertices.back();
    REQUIRE((b.y - a.y) / (b.x - a.x) > 1.0);
    REQUIRE(h.levels.back() > 1.0);
    REQUIRE(h.sup.location == 0.0);
    deep += h.doublings >= 10;
  }
  // The horizon search has a heavy tail at gamma = 1; some paths need it.
  CHECK(deep > 0);
}

TEST_CASE("realizations reproduce their hull from the stored points") {
  for (double gamma : {0.3, 0.5, 0.8}) {
    for (std::uint32_t r = 0; r < 40; ++r) {
      RandomStream rng(10, 5, 0, r);
      const double c = 5.0;
      const HGammaRealization h = simulate_hgamma(gamma, c, rng);
      REQUIRE(h.vertices.size() >= 2);
      REQUIRE(h.vertices.back().x > c);

      std::vector<oracle::Point> pts{{0.0, 0.0}};
      for (std::size_t j = 0; j < h.jumps.size(); ++j) {
        pts.push_back({h.jumps[j], static_cast<double>(j + 1)});
      }
      pts.push_back({h.vertices.back().x, h.vertices.back().y});
      const auto idx = oracle::hull_vertices(pts);
      REQUIRE(idx.size() == h.vertices.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        REQUIRE(pts[idx[i]].x == h.vertices[i].x);
        REQUIRE(pts[idx[i]].y == h.vertices[i].y);
      }

      // h is the slope sequence, y_gamma is the first slope and dominates
      // every ratio j / s_j.
      REQUIRE(h.breaks.front() == 0.0);
      for (std::size_t i = 0; i < h.breaks.size(); ++i) {
        const Vertex& a = h.vertices[i];
        const Vertex& b = h.vertices[i + 1];
        REQUIRE(h.breaks[i] == a.x);
        REQUIRE(h.levels[i] == doctest::Approx((b.y - a.y) / (b.x - a.x)));
        if (i > 0) REQUIRE(h.levels[i] < h.levels[i - 1]);
      }
      REQUIRE(h.y_gamma == h.levels.front());
      for (std::size_t j = 0; j < h.jumps.size(); ++j) {
        REQUIRE((j + 1) / h.jumps[j] <= h.y_gamma * (1.0 + 1e-12));
      }
      REQUIRE(h.sup.value >= 1.0);
      REQUIRE(h.h(0.0) == h.y_gamma);
    }
  }
}

TEST_CASE("windowed realizations give the exact Y_gamma law") {
  // Deep horizons are simulated lazily, so this also checks the tail sampler.
  const int reps = 10000;
  for (double gamma : {0.3, 0.7, 1.0}) {
    std::vector<double> y;
    for (int r = 0; r < reps; ++r) {
      RandomStream rng(13, 8, 0, static_cast<std::uint32_t>(r));
      y.push_back(simulate_hgamma(gamma, 50.0, rng).y_gamma);
    }
    std::sort(y.begin(), y.end());
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const double x = y[static_cast<std::size_t>(q * reps)];
      const double exact = ygamma_cdf(x, gamma).cdf;
      const double empirical =
          static_cast<double>(std::upper_bound(y.begin(), y.end(), x) - y.begin()) / reps;
      INFO("gamma = " << gamma << ", x = " << x);
      CHECK(std::abs(empirical - exact) < 4.0 * std::sqrt(exact * (1.0 - exact) / reps));
    }
  }
}

TEST_CASE("record-window draws agree with the exact cdf at x = 3, gamma = 0.5") {
  const int reps = 100000;
  int below = 0;
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(12, 6, 0, static_cast<std::uint32_t>(r));
    below += sample_ygamma(0.5, rng) <= 3.0;
  }
  const double p_hat = static_cast<double>(below) / reps;
  const double exact = ygamma_cdf(3.0, 0.5).cdf;
  const double se = std::sqrt(exact * (1.0 - exact) / reps);
  INFO("p_hat = " << p_hat << ", exact = " << exact);
  CHECK(std::abs(p_hat - exact) < 3.0 * se);
}
