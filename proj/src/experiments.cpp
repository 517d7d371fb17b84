#include "grenzero/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "grenzero/concave_majorant.hpp"
#include "grenzero/errors.hpp"
#include "grenzero/grenander.hpp"
#include "grenzero/mixture.hpp"

#ifndef GRENZERO_VERSION
#define GRENZERO_VERSION "0.0.0"
#endif

namespace grenzero {

using detail::require;
namespace fs = std::filesystem;

std::string_view library_version() { return GRENZERO_VERSION; }

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

template <typename E>
[[noreturn]] void rethrow_with(const E& error, const std::string& where) {
  throw E(std::string(error.what()) + " [" + where + "]");
}

std::string coordinates(const CellStream& stream, std::size_t replicate) {
  std::ostringstream out;
  out << "seed=" << stream.seed << " cell=" << stream.cell
      << " replicate=" << replicate;
  return out.str();
}

}  // namespace

void for_each_replicate(
    std::size_t replicates, const CellStream& stream, unsigned threads,
    const std::function<void(std::size_t, RandomStream&)>& body) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::size_t error_index = replicates;
  std::exception_ptr error;

  const auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicates || failed.load()) return;
      try {
        RandomStream rng(stream.seed, stream.tag, stream.cell,
                         static_cast<std::uint32_t>(r));
        body(r, rng);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (r < error_index) {
          error_index = r;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };

  const unsigned n = worker_count(threads, replicates);
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!error) return;

  const std::string where = coordinates(stream, error_index);
  try {
    std::rethrow_exception(error);
  } catch (const ArgumentError& e) {
    rethrow_with(e, where);
  } catch (const ConvergenceError& e) {
    rethrow_with(e, where);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " [" + where + "]");
  }
}

std::vector<SupStatistic> simulate_sup_cell(double gamma, double c,
                                            std::size_t replicates,
                                            const CellStream& stream,
                                            unsigned threads,
                                            const YGammaControl& control) {
  std::vector<SupStatistic> out(replicates);
  for_each_replicate(replicates, stream, threads,
                     [&](std::size_t r, RandomStream& rng) {
                       out[r] = simulate_hgamma(gamma, c, rng, control).sup;
                     });
  return out;
}

std::vector<double> simulate_ygamma_draws(double gamma, double c,
                                          std::size_t replicates,
                                          const CellStream& stream,
                                          unsigned threads,
                                          const YGammaControl& control) {
  std::vector<double> out(replicates);
  for_each_replicate(replicates, stream, threads,
                     [&](std::size_t r, RandomStream& rng) {
                       out[r] = simulate_hgamma(gamma, c, rng, control).y_gamma;
                     });
  return out;
}

std::vector<double> mle_at_zero_draws(const Family& family, std::size_t n,
                                      std::size_t replicates,
                                      const CellStream& stream,
                                      unsigned threads) {
  require(n >= 2, "mle_at_zero_draws: n must be at least 2");
  const double scale =
      static_cast<double>(n) * normalizing_sequence(family, static_cast<double>(n));
  std::vector<double> out(replicates);
  for_each_replicate(replicates, stream, threads,
                     [&](std::size_t r, RandomStream& rng) {
                       const auto xs = sample(family, n, rng);
                       out[r] = scale * fit(xs).at_zero();
                     });
  return out;
}

double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

double ks_distance(std::span<const double> sorted,
                   const std::function<double(double)>& cdf,
                   std::size_t stride) {
  require(!sorted.empty(), "ks_distance: empty sample");
  require(stride >= 1, "ks_distance: stride must be positive");
  require(std::is_sorted(sorted.begin(), sorted.end()),
          "ks_distance: sample must be sorted");
  const std::size_t m = sorted.size();
  const double md = static_cast<double>(m);

  // Evaluated order statistics: every stride-th one, plus the last.
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < m; i += stride) index.push_back(i);
  if (index.back() != m - 1) index.push_back(m - 1);

  double distance = 0.0;
  double previous_cdf = 0.0;
  std::size_t previous = 0;
  for (std::size_t b = 0; b < index.size(); ++b) {
    const std::size_t i = index[b];
    const double f = cdf(sorted[i]);
    // Order statistics strictly between the previous evaluation and i carry
    // cdf values in [previous_cdf, f].
    const std::size_t lo = b == 0 ? 0 : previous + 1;
    if (lo < i) {
      distance = std::max(distance, f - static_cast<double>(lo) / md);
      distance = std::max(distance, static_cast<double>(i) / md - previous_cdf);
    }
    distance = std::max(distance, f - static_cast<double>(i) / md);
    distance = std::max(distance, static_cast<double>(i + 1) / md - f);
    previous_cdf = f;
    previous = i;
  }
  return distance;
}

std::optional<double> table_target(double gamma, double c) {
  static const std::array<double, 3> gammas{0.25, 0.5, 0.75};
  static const std::array<double, 5> cs{0.5, 5.0, 25.0, 100.0, 1000.0};
  static const double values[3][5] = {
      {0.361, 0.171, 0.140, 0.092, 0.06},
      {0.422, 0.249, 0.190, 0.162, 0.148},
      {0.489, 0.387, 0.349, 0.358, 0.367},
  };
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (gamma == gammas[g] && c == cs[k]) return values[g][k];
    }
  }
  return std::nullopt;
}

// ---- Experiments -------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 6> kExperiments{
    "ydist", "mle-at-zero", "sup-stat", "sup-location", "switching-demo",
    "mixture-demo"};

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += number(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::string_view header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << render(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string render(double v) { return number(v); }
  static std::string render(std::size_t v) { return std::to_string(v); }
  static std::string render(const std::string& v) { return v; }
  static std::string render(const char* v) { return v; }
  static std::string render(bool v) { return v ? "1" : "0"; }

  std::ofstream out_;
};

double proportion_stderr(double p, std::size_t m) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(m));
}

CellStream cell_stream(const ExperimentConfig& config, std::size_t cell) {
  return {config.seed, fnv1a32(config.experiment),
          static_cast<std::uint32_t>(cell)};
}

void run_ydist(const ExperimentConfig& config, ExperimentSummary& summary) {
  constexpr int kPoints = 400;
  const fs::path path = config.out_dir / "ydist.csv";
  CsvFile csv(path, "gamma,x,cdf");
  for (std::size_t g = 0; g < config.gammas.size(); ++g) {
    const double gamma = config.gammas[g];
    double worst_tail = 0.0;
    for (int k = 1; k <= kPoints; ++k) {
      const double x = config.xmax * k / kPoints;
      const auto r = ygamma_cdf(x, gamma, config.tol);
      worst_tail = std::max(worst_tail, r.tail_bound);
      csv.row(gamma, x, r.cdf);
    }
    summary.cells.push_back({"gamma=" + number(gamma) + ",max_tail_bound",
                             worst_tail, std::nullopt, 0, cell_stream(config, g),
                             std::nullopt});
  }
  summary.files.push_back(path);
}

void run_mle(const ExperimentConfig& config, ExperimentSummary& summary) {
  constexpr int kGrid = 200;
  const Family family = parse_family(config.family);
  const std::string name = to_string(family);
  const double gamma = tail_profile(family).gamma;
  const auto limit = [&](double x) {
    return ygamma_cdf(x, gamma, config.tol).cdf;
  };

  const fs::path draws_path = config.out_dir / "mle.csv";
  const fs::path cdf_path = config.out_dir / "mle_cdf.csv";
  CsvFile draws(draws_path, "family,n,replicate,scaled_value");
  CsvFile cdfs(cdf_path, "family,n,x,empirical_cdf,limit_cdf");

  std::vector<double> grid_limit(kGrid);
  for (int k = 1; k <= kGrid; ++k) grid_limit[k - 1] = limit(config.xmax * k / kGrid);

  for (std::size_t i = 0; i < config.ns.size(); ++i) {
    const std::size_t n = config.ns[i];
    const CellStream stream = cell_stream(config, i);
    auto values = mle_at_zero_draws(family, n, config.replicates, stream,
                                    config.threads);
    for (std::size_t r = 0; r < values.size(); ++r) {
      draws.row(name, n, r, values[r]);
    }
    std::sort(values.begin(), values.end());
    for (int k = 1; k <= kGrid; ++k) {
      const double x = config.xmax * k / kGrid;
      cdfs.row(name, n, x, empirical_cdf(values, x), grid_limit[k - 1]);
    }
    const std::size_t stride = std::max<std::size_t>(1, values.size() / 4000);
    summary.cells.push_back({"n=" + std::to_string(n) + ",ks_distance",
                             ks_distance(values, limit, stride), std::nullopt,
                             config.replicates, stream, std::nullopt});
  }
  summary.files.push_back(draws_path);
  summary.files.push_back(cdf_path);
}

void run_sup(const ExperimentConfig& config, ExperimentSummary& summary,
             bool locations) {
  const fs::path path =
      config.out_dir / (locations ? "suploc.csv" : "supstat.csv");
  CsvFile csv(path, locations ? "gamma,c,replicate,location,rescaled_location"
                              : "gamma,c,replicate,value,location");
  const std::size_t m = config.replicates;
  for (std::size_t g = 0; g < config.gammas.size(); ++g) {
    for (std::size_t k = 0; k < config.cs.size(); ++k) {
      const double gamma = config.gammas[g];
      const double c = config.cs[k];
      const CellStream stream = cell_stream(config, g * config.cs.size() + k);
      const auto stats =
          simulate_sup_cell(gamma, c, m, stream, config.threads, config.control);
      std::size_t at_zero = 0;
      double rescaled_sum = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (stats[r].location == 0.0) ++at_zero;
        rescaled_sum += stats[r].location / c;
        if (locations) {
          csv.row(gamma, c, r, stats[r].location, stats[r].location / c);
        } else {
          csv.row(gamma, c, r, stats[r].value, stats[r].location);
        }
      }
      const double p = static_cast<double>(at_zero) / static_cast<double>(m);
      const std::string key = "gamma=" + number(gamma) + ",c=" + number(c);
      summary.cells.push_back({key + ",p_location_zero", p,
                               proportion_stderr(p, m), m, stream,
                               table_target(gamma, c)});
      if (locations) {
        summary.cells.push_back({key + ",mean_rescaled_location",
                                 rescaled_sum / static_cast<double>(m),
                                 std::nullopt, m, stream, std::nullopt});
      }
    }
  }
  summary.files.push_back(path);
}

// x grid: knots, midpoints, and points left of the first and right of the
// last knot. y grid: majorant slopes, their midpoints, and points outside
// the slope range.
std::pair<std::vector<double>, std::vector<double>> switching_grids(
    const StepFunction& step) {
  const auto knots = step.knots();
  std::vector<double> xs{knots.front() / 2.0};
  for (std::size_t i = 0; i < knots.size(); ++i) {
    xs.push_back(knots[i]);
    if (i + 1 < knots.size()) xs.push_back((knots[i] + knots[i + 1]) / 2.0);
  }
  xs.push_back(knots.back() * 1.5);

  const Majorant m = lcm(step);
  const auto slopes = m.slopes();
  std::vector<double> ys;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    ys.push_back(slopes[i]);
    if (i + 1 < slopes.size()) ys.push_back((slopes[i] + slopes[i + 1]) / 2.0);
  }
  ys.push_back(slopes.back() / 2.0);
  ys.push_back(slopes.front() * 1.5);
  return {xs, ys};
}

std::string_view relation_name(SwitchingRelation r) {
  switch (r) {
    case SwitchingRelation::strict:
      return "strict";
    case SwitchingRelation::weak:
      return "weak";
    case SwitchingRelation::naive:
      return "naive";
  }
  return "unknown";
}

void run_switching(const ExperimentConfig& config, ExperimentSummary& summary) {
  const fs::path path = config.out_dir / "switching.csv";
  CsvFile csv(path, "sample,relation,x,y,slope_event,argmax_event");
  const auto emit = [&](std::size_t id, const SwitchingReport& report) {
    for (const auto* list : {&report.violations, &report.naive_failures}) {
      for (const auto& w : *list) {
        csv.row(id, std::string(relation_name(w.relation)), w.x, w.y,
                w.slope_side, w.argmax_side);
      }
    }
  };

  const std::array<double, 3> example{1.0, 2.0, 4.0};
  const StepFunction example_step = ecdf(example);
  auto [ex_x, ex_y] = switching_grids(example_step);
  ex_y.push_back(0.1);
  std::sort(ex_y.begin(), ex_y.end());
  const auto example_report = verify_switching(example_step, ex_x, ex_y);
  emit(0, example_report);

  const std::size_t m = config.replicates;
  std::vector<SwitchingReport> reports(m);
  const CellStream stream = cell_stream(config, 1);
  for_each_replicate(m, stream, config.threads,
                     [&](std::size_t r, RandomStream& rng) {
                       const std::size_t size = 1 + rng() % 50;
                       const bool ties = rng() % 2 == 0;
                       std::vector<double> xs(size);
                       for (double& x : xs) {
                         x = rng.exponential();
                         if (ties) x = std::ceil(x * 4.0) / 4.0;
                       }
                       const StepFunction step = ecdf(xs);
                       const auto [gx, gy] = switching_grids(step);
                       reports[r] = verify_switching(step, gx, gy);
                     });

  std::size_t strict = 0, weak = 0, naive = 0, pairs = 0;
  for (std::size_t r = 0; r < m; ++r) {
    emit(r + 1, reports[r]);
    strict += reports[r].strict_violations;
    weak += reports[r].weak_violations;
    naive += reports[r].naive_failures.size();
    pairs += reports[r].pairs_checked;
  }
  const CellStream example_stream = cell_stream(config, 0);
  const auto cell = [&](std::string key, double v, std::size_t reps,
                        const CellStream& s) {
    summary.cells.push_back({std::move(key), v, std::nullopt, reps, s,
                             std::nullopt});
  };
  cell("example,strict_violations",
       static_cast<double>(example_report.strict_violations), 1, example_stream);
  cell("example,weak_violations",
       static_cast<double>(example_report.weak_violations), 1, example_stream);
  cell("example,naive_failures",
       static_cast<double>(example_report.naive_failures.size()), 1,
       example_stream);
  cell("random,strict_violations", static_cast<double>(strict), m, stream);
  cell("random,weak_violations", static_cast<double>(weak), m, stream);
  cell("random,naive_failures", static_cast<double>(naive), m, stream);
  cell("random,pairs_checked", static_cast<double>(pairs), m, stream);
  summary.files.push_back(path);
}

std::vector<double> read_column(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read input file " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string field = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == field.size(), path.string() + ":" +
                                      std::to_string(line_no) +
                                      ": not a number: " + field);
    values.push_back(v);
  }
  return values;
}

void run_mixture(const ExperimentConfig& config, ExperimentSummary& summary) {
  constexpr int kGrid = 200;
  std::vector<double> data;
  const CellStream stream = cell_stream(config, 0);
  if (config.input) {
    data = read_column(*config.input);
  } else {
    RandomStream rng(stream.seed, stream.tag, stream.cell, 0);
    data = sample(parse_family(config.family), config.ns.front(), rng);
  }
  const ContaminationEstimate est = contamination_estimate(data);

  const fs::path path = config.out_dir / "mixture.csv";
  CsvFile csv(path, "y,g_hat,contamination_density");
  for (int k = 1; k <= kGrid; ++k) {
    const double y = static_cast<double>(k) / kGrid;
    const auto d = est.density(y);
    csv.row(y, est.fit().eval(y, Side::right), d ? number(*d) : std::string());
  }
  summary.cells.push_back({"epsilon_hat", est.epsilon_hat(), std::nullopt,
                           data.size(), stream, std::nullopt});
  summary.cells.push_back({"anchor", est.anchor(), std::nullopt, data.size(),
                           stream, std::nullopt});
  summary.cells.push_back({"degenerate", est.degenerate() ? 1.0 : 0.0,
                           std::nullopt, data.size(), stream, std::nullopt});
  summary.files.push_back(path);
}

void write_summary(const ExperimentSummary& summary, const fs::path& path) {
  nlohmann::ordered_json doc;
  doc["experiment"] = summary.experiment;
  doc["version"] = std::string(library_version());
  doc["seed"] = summary.seed;
  doc["threads"] = summary.threads;
  doc["wall_clock_seconds"] = summary.wall_clock_seconds;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary.params) params[k] = v;
  doc["params"] = params;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : summary.cells) {
    nlohmann::ordered_json cell;
    cell["key"] = c.key;
    cell["estimate"] = c.estimate;
    cell["stderr"] = c.stderr_estimate ? nlohmann::ordered_json(*c.stderr_estimate)
                                       : nlohmann::ordered_json(nullptr);
    cell["replicates"] = c.replicates;
    cell["stream"] = {{"seed", c.stream.seed},
                      {"tag", c.stream.tag},
                      {"cell", c.stream.cell}};
    if (c.paper_target) cell["paper_target"] = *c.paper_target;
    cells.push_back(std::move(cell));
  }
  doc["cells"] = cells;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : summary.files) files.push_back(f.filename().string());
  doc["files"] = files;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

std::span<const std::string_view> experiment_names() { return kExperiments; }

ExperimentConfig resolve_config(ExperimentConfig config) {
  const auto& e = config.experiment;
  require(std::find(kExperiments.begin(), kExperiments.end(), e) !=
              kExperiments.end(),
          "unknown experiment '" + e + "'");

  const auto default_to = [](auto& field, auto value) {
    if (field.empty()) field = value;
  };
  if (e == "ydist") {
    default_to(config.gammas, std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0});
  } else if (e == "mle-at-zero") {
    default_to(config.ns, std::vector<std::size_t>{50, 200, 500});
    default_to(config.family, std::string("beta:a=0.5"));
    if (config.replicates == 0) config.replicates = 10000;
  } else if (e == "sup-stat") {
    default_to(config.gammas, std::vector<double>{0.25, 0.5, 0.75});
    default_to(config.cs, std::vector<double>{0.5, 5, 25, 100, 1000});
    if (config.replicates == 0) config.replicates = 10000;
  } else if (e == "sup-location") {
    default_to(config.gammas, std::vector<double>{0.25, 0.5, 0.75, 1.0});
    default_to(config.cs, std::vector<double>{5});
    if (config.replicates == 0) config.replicates = 10000;
  } else if (e == "switching-demo") {
    if (config.replicates == 0) config.replicates = 1000;
  } else if (e == "mixture-demo") {
    default_to(config.ns, std::vector<std::size_t>{10000});
    default_to(config.family, std::string("lehmann:gl=0.5,eps=0.3"));
  }
  if (config.replicates == 0) config.replicates = 1;

  for (double g : config.gammas) {
    require(g > 0.0 && g <= 1.0, "--gamma values must lie in (0, 1]");
  }
  for (double c : config.cs) {
    require(c > 0.0 && std::isfinite(c), "--c values must be positive");
  }
  for (std::size_t n : config.ns) {
    require(n >= 2, "--n values must be at least 2");
  }
  require(config.replicates <= std::numeric_limits<std::uint32_t>::max(),
          "--reps exceeds the stream index range");
  require(config.xmax > 0.0 && std::isfinite(config.xmax),
          "--xmax must be positive");
  require(config.tol > 0.0 && config.tol <= 1e-3, "--tol must lie in (0, 1e-3]");
  require(config.control.window > 0, "--window must be positive");
  if (!config.family.empty()) validate(parse_family(config.family));
  return config;
}

ExperimentSummary run_experiment(const ExperimentConfig& raw) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = resolve_config(raw);
  fs::create_directories(config.out_dir);

  ExperimentSummary summary;
  summary.experiment = config.experiment;
  summary.seed = config.seed;
  summary.threads = worker_count(config.threads, config.replicates);
  summary.params = {
      {"gamma", join(config.gammas)},
      {"c", join(config.cs)},
      {"n", join(config.ns)},
      {"reps", std::to_string(config.replicates)},
      {"family", config.family},
      {"xmax", number(config.xmax)},
      {"tol", number(config.tol)},
      {"window", std::to_string(config.control.window)},
      {"input", config.input ? config.input->string() : std::string()},
  };

  const auto& e = config.experiment;
  if (e == "ydist") {
    run_ydist(config, summary);
  } else if (e == "mle-at-zero") {
    run_mle(config, summary);
  } else if (e == "sup-stat") {
    run_sup(config, summary, false);
  } else if (e == "sup-location") {
    run_sup(config, summary, true);
  } else if (e == "switching-demo") {
    run_switching(config, summary);
  } else {
    run_mixture(config, summary);
  }

  summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const fs::path summary_path = config.out_dir / "summary.json";
  summary.files.push_back(summary_path);
  write_summary(summary, summary_path);
  return summary;
}

}  // namespace grenzero
