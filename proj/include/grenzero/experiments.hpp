#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grenzero/families.hpp"
#include "grenzero/limit_laws.hpp"

namespace grenzero {

std::string_view library_version();

// ---- Replicate drivers -------------------------------------------------
//
// Every driver evaluates replicate r of a cell on the stream
// (seed, tag, cell, r), writes results in replicate order and is therefore
// bit-identical for any thread count. threads = 0 means all hardware
// threads. A failing replicate is rethrown with its coordinates attached,
// keeping the exception type.

struct CellStream {
  std::uint64_t seed = 0;
  std::uint32_t tag = 0;
  std::uint32_t cell = 0;
};

/// Runs body(r, rng) for r in [0, replicates).
void for_each_replicate(std::size_t replicates, const CellStream& stream,
                        unsigned threads,
                        const std::function<void(std::size_t, RandomStream&)>& body);

std::vector<SupStatistic> simulate_sup_cell(double gamma, double c,
                                            std::size_t replicates,
                                            const CellStream& stream,
                                            unsigned threads,
                                            const YGammaControl& control = {});

/// y_gamma of simulate_hgamma realizations on the window [0, c].
std::vector<double> simulate_ygamma_draws(double gamma, double c,
                                          std::size_t replicates,
                                          const CellStream& stream,
                                          unsigned threads,
                                          const YGammaControl& control = {});

/// n a_n f_n(0+) for samples of size n; converges in law to Y_gamma.
std::vector<double> mle_at_zero_draws(const Family& family, std::size_t n,
                                      std::size_t replicates,
                                      const CellStream& stream,
                                      unsigned threads);

// ---- Statistics --------------------------------------------------------

/// Kolmogorov distance between the empirical cdf of `sorted` and a
/// continuous cdf. With stride k > 1 the cdf is evaluated only at every
/// k-th order statistic and monotonicity gives an upper bound that is
/// within one block's cdf increment of the exact value.
double ks_distance(std::span<const double> sorted,
                   const std::function<double(double)>& cdf,
                   std::size_t stride = 1);

/// Empirical cdf of `sorted` at x.
double empirical_cdf(std::span<const double> sorted, double x);

/// Reference proportion of sup statistics located at zero, when one exists.
std::optional<double> table_target(double gamma, double c);

// ---- Experiments -------------------------------------------------------

struct ExperimentConfig {
  std::string experiment;
  std::vector<double> gammas;
  std::vector<double> cs;
  std::vector<std::size_t> ns;
  std::size_t replicates = 0;  ///< 0 means the experiment default
  std::uint64_t seed = 20240101;
  std::string family;
  std::filesystem::path out_dir = ".";
  unsigned threads = 0;
  double xmax = 20.0;
  std::optional<std::filesystem::path> input;
  double tol = 1e-10;
  YGammaControl control;
};

struct SummaryCell {
  std::string key;
  double estimate = 0.0;
  std::optional<double> stderr_estimate;
  std::size_t replicates = 0;
  CellStream stream;
  std::optional<double> paper_target;
};

struct ExperimentSummary {
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<SummaryCell> cells;
  std::vector<std::filesystem::path> files;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

std::span<const std::string_view> experiment_names();

/// Fills unset lists and counts with the experiment defaults and checks
/// every parameter; throws ArgumentError.
ExperimentConfig resolve_config(ExperimentConfig config);

/// Runs the experiment, writes its CSV files and summary.json into
/// config.out_dir and returns the summary.
ExperimentSummary run_experiment(const ExperimentConfig& config);

}  // namespace grenzero
