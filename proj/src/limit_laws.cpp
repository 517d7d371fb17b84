#include "grenzero/limit_laws.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "grenzero/concave_majorant.hpp"
#include "grenzero/errors.hpp"
#include "grenzero/special_functions.hpp"

namespace grenzero {

using detail::require;

namespace {

constexpr std::size_t kMaxTerms = 100000;

void check_gamma(double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
}

// Upper bound on P(Y <= x) for x < 1: the event forces T_j >= t_j, that is
// N(t_j) <= j - 1, for every j. Scans a geometric grid of j around the peak
// of the touch distribution.
double non_touch_bound(double x, double gamma) {
  const double scale = std::pow(x, -gamma);
  const double peak = std::pow(x, -gamma / (1.0 - gamma));
  const double j_max = std::min(2.0 * peak + 2.0, 1e7);
  double bound = 1.0;
  double previous = 0.0;
  for (double j = 1.0; j <= j_max; j = std::max(j + 1.0, std::floor(j * 1.05))) {
    if (j == previous) continue;
    previous = j;
    const double t = std::pow(j, gamma) * scale;
    bound = std::min(bound, reg_upper_gamma(j, t));
  }
  return bound;
}

}  // namespace

double log_poisson_pmf(double m, long long k) {
  require(m >= 0.0 && std::isfinite(m), "log_poisson_pmf: mean must be >= 0");
  require(k >= 0, "log_poisson_pmf: count must be >= 0");
  if (m == 0.0) {
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  const double kd = static_cast<double>(k);
  return -m + kd * std::log(m) - std::lgamma(kd + 1.0);
}

YGammaCdfResult ygamma_cdf(double x, double gamma, double tol) {
  require(x > 0.0 && std::isfinite(x), "ygamma_cdf: x must be positive");
  check_gamma(gamma);
  require(tol > 0.0 && tol <= 1e-3, "ygamma_cdf: tol must lie in (0, 1e-3]");

  YGammaCdfResult result;
  result.x = x;
  result.gamma = gamma;
  if (gamma == 1.0) {
    result.closed_form = true;
    result.cdf = x >= 1.0 ? 1.0 - 1.0 / x : 0.0;
    return result;
  }

  if (x < 1.0) {
    const double bound = non_touch_bound(x, gamma);
    if (bound < tol) {
      result.cdf = 0.0;
      result.tail_bound = bound;
      return result;
    }
  }

  const double scale = std::pow(x, -gamma);
  std::vector<double> t{0.0};
  std::vector<double> a{0.0};
  std::vector<double> log_factorial{0.0};
  long double touched = 0.0L;

  const auto log_p = [&](double m, std::size_t k) {
    return -m + static_cast<double>(k) * std::log(m) - log_factorial[k];
  };

  for (std::size_t k = 1; k <= kMaxTerms; ++k) {
    log_factorial.push_back(log_factorial.back() +
                            std::log(static_cast<double>(k)));
    const double tk = std::pow(static_cast<double>(k), gamma) * scale;
    const double pk = std::exp(log_p(tk, k));

    long double earlier = 0.0L;
    for (std::size_t i = 1; i < k; ++i) {
      if (a[i] <= 0.0) continue;
      earlier += a[i] * std::exp(log_p(tk - t[i], k - i));
    }
    const double ak =
        std::max(0.0, static_cast<double>(static_cast<long double>(pk) - earlier));
    t.push_back(tk);
    a.push_back(ak);
    touched += ak;

    // Past the mode of the touch distribution the p(t_k; k) decay
    // super-exponentially; bound the rest of the series by them.
    if (tk > static_cast<double>(k) || pk >= tol * 1e-3) continue;
    double tail = 0.0;
    double last = pk;
    bool closed = false;
    for (std::size_t j = k + 1; j <= kMaxTerms + 1000; ++j) {
      const double tj = std::pow(static_cast<double>(j), gamma) * scale;
      const double pj = std::exp(-tj + static_cast<double>(j) * std::log(tj) -
                                 std::lgamma(static_cast<double>(j) + 1.0));
      tail += pj;
      const double ratio = last > 0.0 ? pj / last : 0.0;
      last = pj;
      if (pj < tol * 1e-9 && ratio < 0.5) {
        tail += pj * ratio / (1.0 - ratio);
        closed = true;
        break;
      }
    }
    if (closed && tail < tol) {
      result.terms = k;
      result.tail_bound = tail;
      result.cdf = std::clamp(static_cast<double>(1.0L - touched), 0.0, 1.0);
      return result;
    }
  }

  std::ostringstream msg;
  msg << "ygamma_cdf: series for x=" << x << ", gamma=" << gamma
      << " not within tol=" << tol << " after " << kMaxTerms << " terms";
  throw ConvergenceError(msg.str());
}

CdfBounds ygamma_bounds(double x, double gamma) {
  require(x > 0.0 && !std::isnan(x), "ygamma_bounds: x must be positive");
  check_gamma(gamma);
  if (std::isinf(x)) return {1.0, 1.0};
  const double power = std::pow(x, -gamma);
  return {std::max(0.0, 1.0 - power), std::exp(-power)};
}

PoissonPath sample_poisson_path(RandomStream& rng, PathStop stop) {
  require(stop.limit >= 0.0 && std::isfinite(stop.limit),
          "sample_poisson_path: stop limit must be finite and >= 0");
  PoissonPath path;
  path.stream = rng.id();
  double t = 0.0;
  if (stop.kind == PathStop::Kind::count) {
    const auto n = static_cast<std::size_t>(stop.limit);
    require(static_cast<double>(n) == stop.limit,
            "sample_poisson_path: arrival count must be an integer");
    path.arrivals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      t += rng.exponential();
      path.arrivals.push_back(t);
    }
    path.horizon = t;
    return path;
  }
  for (;;) {
    t += rng.exponential();
    if (t > stop.limit) break;
    path.arrivals.push_back(t);
  }
  path.horizon = stop.limit;
  return path;
}

namespace {

// Arrival stream of t -> N(t^gamma): points (s_j, j) with s_j = T_j^(1/gamma).
class TransformedArrivals {
 public:
  TransformedArrivals(double gamma, RandomStream& rng)
      : inverse_gamma_(1.0 / gamma), rng_(rng) {}

  void next() {
    double t = time_ + rng_.exponential();
    // Guards the strict ordering of knots against a gap below one ulp.
    while (t == time_) t = time_ + rng_.exponential();
    time_ = t;
    ++count_;
    log_jump_ = std::log(t) * inverse_gamma_;
    jump_ = std::pow(t, inverse_gamma_);
  }

  std::size_t count() const { return count_; }
  double jump() const { return jump_; }
  double log_jump() const { return log_jump_; }

 private:
  double inverse_gamma_;
  RandomStream& rng_;
  double time_ = 0.0;
  std::size_t count_ = 0;
  double jump_ = 0.0;
  double log_jump_ = 0.0;
};

// Record-window rule: advance until `window` consecutive arrivals fail to
// beat the running record of j / s_j by the relative margin. `visit` sees
// every arrival. Returns the log of the record.
template <typename Visit>
double record_window(TransformedArrivals& arrivals,
                     const YGammaControl& control, Visit&& visit) {
  require(control.window > 0, "YGammaControl: window must be positive");
  require(control.margin >= 0.0, "YGammaControl: margin must be >= 0");
  const double log_margin = std::log1p(control.margin);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t quiet = 0;
  while (quiet < control.window) {
    arrivals.next();
    visit();
    const double v =
        std::log(static_cast<double>(arrivals.count())) - arrivals.log_jump();
    quiet = v >= best + log_margin ? 0 : quiet + 1;
    best = std::max(best, v);
  }
  return best;
}

// The path beyond a fixed time, kept as Poisson counts on blocks of the
// unit-rate time scale and sampled only where it can matter. The majorant is
// nondecreasing, so the upper-left corner (a, N(b)) of a block bounds all of
// its points: a block whose corner lies under the hull of the points sampled
// so far never matters again. Only the hull up to v, its first vertex past c,
// is wanted. A block right of v whose corner lies under the line through v
// and its left neighbour cannot remove v, so it stays unsampled for now.
// Every other block is split with a binomial draw, or sampled point by point
// once small.
class LazyTail {
 public:
  LazyTail(double gamma, RandomStream& rng, double start, std::int64_t count)
      : inverse_gamma_(1.0 / gamma), rng_(rng), end_(start), count_(count),
        floor_x_(to_s(start)) {}

  void extend(double to) {
    if (to <= end_) return;
    boost::random::poisson_distribution<std::int64_t, double> draw(to - end_);
    const std::int64_t k = draw(rng_);
    if (k > 0) blocks_.push_back({end_, to, count_, k});
    count_ += k;
    end_ = to;
  }

  std::int64_t count() const { return count_; }

  // Hull of `head` (vertices left of the tail) together with the tail, exact
  // up to its first vertex beyond c.
  std::vector<Vertex> hull(std::span<const Vertex> head, double c) {
    for (;;) {
      const std::vector<Vertex> h = build(head);
      resolved_.clear();
      for (const Vertex& v : h) {
        if (v.x > floor_x_) resolved_.push_back(v);
      }
      const Reference ref{h, c};
      std::vector<Block> keep, flagged;
      std::size_t best = 0;
      double best_excess = -1.0;
      for (const Block& b : blocks_) {
        const std::optional<double> e = excess(ref, b);
        if (!e) continue;
        if (*e < 0.0) {
          keep.push_back(b);
          continue;
        }
        if (*e > best_excess) {
          best_excess = *e;
          best = flagged.size();
        }
        flagged.push_back(b);
      }
      if (flagged.empty()) {
        blocks_ = std::move(keep);
        return h;
      }
      // Chasing the largest excess down to single points finds new vertices
      // early, and each one lets many blocks go at once.
      descend(ref, flagged[best], keep);
      sort_resolved();
      const bool moved = build(head) != h;
      for (std::size_t i = 0; i < flagged.size(); ++i) {
        if (i == best) continue;
        if (moved) {
          keep.push_back(flagged[i]);
        } else {
          split(flagged[i], keep);
        }
      }
      blocks_ = std::move(keep);
      sort_resolved();
    }
  }

 private:
  struct Block {
    double a, b;          // unit-rate time
    std::int64_t before;  // N(a)
    std::int64_t k;       // N(b) - N(a)
  };
  struct Reference {
    const std::vector<Vertex>& h;
    double c;
  };
  static constexpr std::int64_t kDirect = 16;

  double to_s(double t) const {
    return inverse_gamma_ == 1.0 ? t : std::pow(t, inverse_gamma_);
  }

  // How far the corner of b reaches above what it must stay under: empty
  // when it is under the hull, negative when it may wait, positive when it
  // has to be refined.
  std::optional<double> excess(const Reference& ref, const Block& b) const {
    const std::vector<Vertex>& h = ref.h;
    const double x = to_s(b.a);
    const double y = static_cast<double>(b.before + b.k);
    double above = std::numeric_limits<double>::infinity();
    if (x < h.back().x) {
      const auto it = std::upper_bound(h.begin(), h.end(), x,
                                       [](double v, const Vertex& p) { return v < p.x; });
      const Vertex& p = *(it - 1);
      const Vertex& q = *it;
      above = margin(y, p.y + (q.y - p.y) * ((x - p.x) / (q.x - p.x)));
      if (above < 0.0) return std::nullopt;
    }
    const auto past = std::find_if(h.begin(), h.end(),
                                   [&](const Vertex& v) { return v.x > ref.c; });
    if (past == h.end() || x <= past->x) return above;
    const Vertex& p = *(past - 1);
    const Vertex& q = *past;
    return margin(y, q.y + (q.y - p.y) * ((x - q.x) / (q.x - p.x)));
  }

  // y - value, shifted so that near-ties count as reaching above.
  static double margin(double y, double value) {
    return y - value + 1e-9 * std::max(1.0, std::abs(value));
  }

  void descend(const Reference& ref, Block cur, std::vector<Block>& keep) {
    while (cur.k > kDirect) {
      const auto [left, right] = halves(cur);
      const std::optional<double> el = left.k > 0 ? excess(ref, left) : std::nullopt;
      const std::optional<double> er = right.k > 0 ? excess(ref, right) : std::nullopt;
      const double vl = el.value_or(-std::numeric_limits<double>::infinity());
      const double vr = er.value_or(-std::numeric_limits<double>::infinity());
      const bool go_left = vl >= vr;
      const std::optional<double>& other = go_left ? er : el;
      if (other) keep.push_back(go_left ? right : left);
      if ((go_left ? vl : vr) < 0.0) {
        if (go_left ? el.has_value() : er.has_value()) keep.push_back(go_left ? left : right);
        return;
      }
      cur = go_left ? left : right;
    }
    sample_points(cur);
  }

  std::pair<Block, Block> halves(const Block& b) {
    const double m = 0.5 * (b.a + b.b);
    boost::random::binomial_distribution<std::int64_t, double> half(b.k, 0.5);
    const std::int64_t left = half(rng_);
    return {{b.a, m, b.before, left}, {m, b.b, b.before + left, b.k - left}};
  }

  void sample_points(const Block& b) {
    std::vector<double> ts(static_cast<std::size_t>(b.k));
    for (double& t : ts) t = b.a + rng_.uniform() * (b.b - b.a);
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      resolved_.push_back(
          {to_s(ts[i]), static_cast<double>(b.before + static_cast<std::int64_t>(i) + 1)});
    }
  }

  void split(const Block& b, std::vector<Block>& keep) {
    if (b.k <= kDirect) {
      sample_points(b);
      return;
    }
    const auto [left, right] = halves(b);
    if (left.k > 0) keep.push_back(left);
    if (right.k > 0) keep.push_back(right);
  }

  void sort_resolved() {
    std::sort(resolved_.begin(), resolved_.end(),
              [](const Vertex& p, const Vertex& q) { return p.x < q.x; });
  }

  std::vector<Vertex> build(std::span<const Vertex> head) const {
    std::vector<Vertex> points(head.begin(), head.end());
    for (const Vertex& p : resolved_) {
      // Equal abscissae can only come from rounding in to_s; keep the higher.
      if (p.x <= points.back().x) {
        points.back().y = std::max(points.back().y, p.y);
      } else {
        points.push_back(p);
      }
    }
    HullBuilder h(points.front());
    for (std::size_t i = 1; i < points.size(); ++i) h.push(points[i]);
    return {h.vertices().begin(), h.vertices().end()};
  }

  double inverse_gamma_;
  RandomStream& rng_;
  double end_;
  std::int64_t count_;
  double floor_x_;
  std::vector<Block> blocks_;
  std::vector<Vertex> resolved_;
};

// Vertices inside [0, c] plus the first one beyond c; empty when no vertex
// lies beyond c yet.
std::optional<std::vector<Vertex>> window_signature(
    std::span<const Vertex> hull, double c) {
  std::vector<Vertex> out;
  for (const Vertex& v : hull) {
    out.push_back(v);
    if (v.x > c) return out;
  }
  return std::nullopt;
}

}  // namespace

double sample_ygamma(double gamma, RandomStream& rng,
                     const YGammaControl& control) {
  check_gamma(gamma);
  TransformedArrivals arrivals(gamma, rng);
  return std::exp(record_window(arrivals, control, [] {}));
}

double HGammaRealization::h(double t) const {
  require(t >= 0.0 && t <= c, "HGammaRealization::h: t outside [0, c]");
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  return levels[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

HGammaRealization simulate_hgamma(double gamma, double c, RandomStream& rng,
                                  const YGammaControl& control) {
  check_gamma(gamma);
  require(c > 0.0 && std::isfinite(c), "simulate_hgamma: c must be positive");
  require(control.max_doublings >= 2,
          "YGammaControl: max_doublings must be at least 2");

  HGammaRealization out;
  out.gamma = gamma;
  out.c = c;

  TransformedArrivals arrivals(gamma, rng);
  HullBuilder hull({0.0, 0.0});
  const auto absorb = [&] {
    hull.push({arrivals.jump(), static_cast<double>(arrivals.count())});
    if (arrivals.jump() <= c) out.jumps.push_back(arrivals.jump());
  };
  record_window(arrivals, control, absorb);

  // Every arrival up to `start` is simulated one by one. The first arrival
  // past `start` is dropped: the process after a fixed time is a fresh
  // Poisson process, which the lazy tail generates.
  const double start = std::max(c, arrivals.jump());
  for (;;) {
    arrivals.next();
    if (arrivals.jump() > start) break;
    absorb();
  }
  LazyTail tail(gamma, rng, std::pow(start, gamma),
                static_cast<std::int64_t>(arrivals.count()) - 1);

  const auto signature_at = [&](double h) {
    tail.extend(std::pow(h, gamma));
    return window_signature(tail.hull(hull.vertices(), c), c);
  };

  // N(s^gamma)/s tends to 1 at gamma = 1 and to 0 below it. A segment that
  // is not steeper than this limit is eventually crossed by the path, so a
  // window ending in one cannot be final however stable it looks.
  const double drift = gamma == 1.0 ? 1.0 : 0.0;
  const auto admissible = [drift](const std::vector<Vertex>& sig) {
    const Vertex& a = sig[sig.size() - 2];
    const Vertex& b = sig.back();
    return (b.y - a.y) / (b.x - a.x) > drift;
  };

  double horizon = start;
  auto older = signature_at(horizon);
  auto newer = signature_at(2.0 * horizon);
  int doublings = 1;
  for (;;) {
    ++doublings;
    auto newest = signature_at(4.0 * horizon);
    if (older && newer && newest && *older == *newer && *newer == *newest &&
        admissible(*newest)) {
      out.vertices = std::move(*newest);
      break;
    }
    if (doublings >= control.max_doublings) {
      std::ostringstream msg;
      msg << "simulate_hgamma: hull on [0, " << c << "] not stable after "
          << doublings << " horizon doublings (gamma=" << gamma
          << ", horizon=" << 4.0 * horizon << ", arrivals=" << tail.count()
          << ")";
      throw ConvergenceError(msg.str());
    }
    older = std::move(newer);
    newer = std::move(newest);
    horizon *= 2.0;
  }

  for (std::size_t i = 0; out.vertices[i].x <= c && i + 1 < out.vertices.size();
       ++i) {
    if (out.vertices[i].x == c) break;
    out.breaks.push_back(out.vertices[i].x);
    out.levels.push_back((out.vertices[i + 1].y - out.vertices[i].y) /
                         (out.vertices[i + 1].x - out.vertices[i].x));
  }
  out.y_gamma = out.levels.front();
  out.horizon = 4.0 * horizon;
  out.arrivals = static_cast<std::size_t>(tail.count());
  out.doublings = doublings;
  out.sup = sup_statistic(out.breaks, out.levels, gamma, c);
  return out;
}

SupStatistic sup_statistic(std::span<const double> breaks,
                           std::span<const double> levels, double gamma,
                           double c) {
  check_gamma(gamma);
  require(c > 0.0 && std::isfinite(c), "sup_statistic: c must be positive");
  require(!breaks.empty() && breaks.size() == levels.size(),
          "sup_statistic: breaks and levels must be nonempty and equal length");
  require(breaks.front() == 0.0, "sup_statistic: first break must be 0");

  SupStatistic best{-1.0, 0.0};
  const auto consider = [&](double t, double level) {
    const double g = std::pow(t, 1.0 - gamma) * level / gamma;
    const double value = std::abs(g - 1.0);
    if (value > best.value) best = {value, t};
  };
  for (std::size_t i = 0; i < breaks.size() && breaks[i] <= c; ++i) {
    const double right =
        i + 1 < breaks.size() ? std::min(breaks[i + 1], c) : c;
    consider(breaks[i], levels[i]);
    consider(right, levels[i]);
  }
  return best;
}

SupStatistic sup_statistic(const HGammaRealization& realization, double c) {
  require(c <= realization.c,
          "sup_statistic: c exceeds the realization window");
  return sup_statistic(realization.breaks, realization.levels,
                       realization.gamma, c);
}

}  // namespace grenzero
