#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "adaptgap/direct_sum.hpp"
#include "adaptgap/estimators.hpp"
#include "adaptgap/hard_instances.hpp"
#include "adaptgap/rng.hpp"

namespace adaptgap {

/// Stream of trial `trial` under `master_seed`. Depends only on the pair, so
/// adding trials never perturbs earlier ones.
inline RngStream trial_stream(std::uint64_t master_seed, std::size_t trial) {
  return RngStream(master_seed, trial);
}

/// Runs fn(trial_index) for every trial on `workers` threads and returns the
/// results in trial order. The first exception (by trial index) is rethrown.
template <class Fn>
auto run_trials(std::size_t trials, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        slots[t].emplace(fn(t));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct TrialOutcome {
  double error = 0.0;  // estimate minus truth
  double card = 0.0;
};

struct ErrorStats {
  double rms = 0.0;
  /// Delta-method standard error of rms from the squared-error sample variance.
  double standard_error = 0.0;
  double mean_abs_error = 0.0;
  double mean_card = 0.0;
  std::size_t trials = 0;
};

/// Reduction in trial order. Needs at least two outcomes.
ErrorStats summarize(std::span<const TrialOutcome> outcomes);

using InstanceSampler = std::function<MixedMatrix(const RngStream&)>;
using Estimator = std::function<EstimateReport(const MixedMatrix&, const RngStream&)>;

/// Per trial t: f = sampler(s.derive(0)), estimate = estimator(f, s.derive(1))
/// with s = trial_stream(seed, t).derive(salt); error against scalar_mean(f).
ErrorStats rms_error(const InstanceSampler& sampler, const Estimator& estimator,
                     std::size_t trials, std::uint64_t seed, unsigned workers = 1,
                     std::uint64_t salt = 0);

enum class EstimatorKind { kA2, kA3, kDsAdaptive, kDsNonadaptive };

std::string estimator_name(EstimatorKind kind);

/// A^(2) with n samples on a pre-declared non-adaptive tape.
Estimator a2_estimator(std::uint64_t n);
/// A^(3) on an adaptive tape with budget 6 m n. m defaults per N1.
Estimator a3_estimator(std::uint64_t n, std::optional<std::size_t> m = std::nullopt);

struct PlanParams {
  std::optional<std::size_t> m;
  // Direct-sum parameters; budgets of a DS plan are the k0 values.
  double alpha = 1.5;
  std::optional<double> delta;
  double level_c0 = kDefaultLevelC0;
  Extended p1 = Extended(1.0);
};

struct TrialPlan {
  HardFamily family;
  EstimatorKind estimator;
  std::vector<std::uint64_t> budgets;
  std::size_t trials;
  std::uint64_t master_seed;
  PlanParams params;

  /// Throws InvalidParameters unless budgets are strictly increasing and
  /// positive and trials >= 2.
  void validate() const;
};

/// One line of the standard CSV table.
struct ResultRow {
  std::string family;
  std::string estimator;
  Extended p;
  Extended u;
  std::size_t n1;
  std::size_t n2;
  std::uint64_t n;
  ErrorStats stats;
  std::uint64_t seed;
};

std::vector<ResultRow> run_plan(const TrialPlan& plan, unsigned workers = 1);

/// Composite direct-sum run at one k0 on active-row Bernoulli levels 0..k1.
ResultRow ds_rms_error(const DirectSumSpec& base, DsMode mode, const DsOptions& options,
                       std::size_t trials, std::uint64_t seed, unsigned workers = 1);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// (log2 n, log2 error)
  std::vector<std::pair<double, double>> points;
};

/// Least squares on (log2 n, log2 error). Throws InsufficientPoints below
/// four points, NonpositiveError for n or error <= 0.
RateFit rate_fit(std::span<const std::pair<double, double>> points);

struct GapOptions {
  std::optional<std::size_t> m;
  /// Lower-bound regime constant; 0 disables the guard.
  double guard_c0 = kRegimeC0;
  unsigned workers = 1;
};

struct GapRow {
  std::uint64_t n;
  std::size_t n1;
  std::size_t n2;
  std::size_t m;
  ErrorStats a3;
  /// A^(2) granted the realized card of the A^(3) run on the same input.
  ErrorStats a2_matched;
  /// A^(2) at the nominal budget n.
  ErrorStats a2_nominal;
  double ratio;  // a2_matched.rms / a3.rms
};

struct GapResult {
  std::vector<GapRow> rows;
  std::optional<RateFit> ratio_fit;
  std::optional<RateFit> a2_matched_fit;
  std::optional<RateFit> a2_nominal_fit;
  std::optional<RateFit> a3_fit;
};

/// Adaption-gap experiment at p = 1, u = INF on active-row Bernoulli inputs
/// with N1 = N2 = ceil(c3 sqrt(n)). Throws RegimeViolation if n < N1 or the
/// guard n < guard_c0 N1 N2 fails.
GapResult gap_experiment(std::span<const std::uint64_t> budgets, double c3, std::size_t trials,
                         std::uint64_t seed, const GapOptions& options = {});

enum class RateRegime {
  kPGeU,           // p >= u
  kPLtULe2,        // p < u <= 2
  kTwoLePLtU,      // 2 <= p < u
  kPLt2LtU,        // p < 2 < u, n >= N1
  kPLt2LtUSmallN,  // p < 2 < u, n < N1
};

std::string regime_name(RateRegime regime);
RateRegime parse_regime(std::string_view text);

struct GridPoint {
  std::size_t n1;
  std::size_t n2;
  std::uint64_t n;
};

struct RegimeSetup {
  RateRegime regime;
  HardVariant family;
  Extended p;
  Extended u;
  std::vector<GridPoint> grid;
  std::vector<EstimatorKind> estimators;
};

/// Family, exponents and grid used for each regime; every grid point
/// satisfies n < N1 N2 / 21.
RegimeSetup default_regime_setup(RateRegime regime);

/// Upper-bound rate expression for the regime (constants dropped).
double predicted_error(RateRegime regime, EstimatorKind estimator, const Extended& p,
                       const Extended& u, const GridPoint& point);

struct RateSummary {
  EstimatorKind estimator;
  RateFit rms_fit;
  RateFit mae_fit;
  /// Log-slope of predicted_error over the grid.
  double predicted_slope;
};

struct RateReport {
  RegimeSetup setup;
  std::vector<ResultRow> rows;
  std::vector<RateSummary> summaries;
};

/// Throws RegimeViolation if a grid point fails n < guard_c0 N1 N2, or has
/// n < N1 for an A^(3) measurement.
RateReport rate_experiment(const RegimeSetup& setup, std::size_t trials, std::uint64_t seed,
                           unsigned workers = 1, double guard_c0 = kRegimeC0);

enum class TableFormat { kCsv, kTsv };

/// Fixed columns: family, estimator, p, u, N1, N2, n, trials, rms, stderr,
/// mean_card, seed, mae.
void write_table(std::ostream& out, std::span<const ResultRow> rows, TableFormat format);

/// Round-trip decimal text of a double (%.17g).
std::string format_double(double x);

}  // namespace adaptgap
