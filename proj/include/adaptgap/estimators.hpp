#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adaptgap/extended.hpp"
#include "adaptgap/info_oracle.hpp"
#include "adaptgap/rng.hpp"

namespace adaptgap {

struct EstimateReport {
  double value = 0.0;
  /// Total information used (tape card after the run).
  std::uint64_t cards = 0;
  /// (stage 1, stage 2) card split, adaptive runs only.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> stage_cards;
  /// Stage-2 samples per row, adaptive runs only.
  std::optional<std::vector<std::uint64_t>> allocation;

  friend bool operator==(const EstimateReport&, const EstimateReport&) = default;
};

/// Median: middle order statistic for odd length, mean of the two middle
/// ones for even length. Throws EmptyInput.
double median(std::span<const double> values);

/// Randomized norm estimate ((1/n) sum |f(xi_l)|^v)^{1/v} with xi_l i.i.d.
/// uniform over {0, ..., population_size - 1}. Advances rng.
double norm_est_a1(const std::function<double(std::size_t)>& sample_access,
                   std::size_t population_size, const Extended& v, std::size_t n,
                   RngStream& rng);

/// n i.i.d. uniform entry positions, in the order mc_mean_a2 consumes them.
/// Pass a copy of the stream handed to mc_mean_a2 to pre-declare a
/// non-adaptive tape.
std::vector<EntryIndex> draw_indices(const ProblemSpec& spec, std::size_t n, RngStream rng);

/// Plain Monte Carlo mean: average of n uniform-with-replacement entries.
EstimateReport mc_mean_a2(QueryTape& tape, std::size_t n, const RngStream& rng);

/// Stage-2 sample sizes for the adaptive estimator. Row i gets ceil(n/N1)
/// unless its a_tilde^p exceeds the average, in which case it gets the
/// proportional share ceil(a_tilde_i^p n / sum_l a_tilde_l^p).
/// Throws InvalidExponent unless 1 <= p < 2, InvalidParameters unless n >= N1 >= 1.
std::vector<std::uint64_t> allocate_samples(std::span<const double> a_tilde, const Extended& p,
                                            std::uint64_t n);

/// max(1, ceil(log2(N1 + 1))).
std::size_t default_repetitions(std::size_t n1);

/// Repetition count from the convergence proof, m >= c_1 log(N1 + 1) with
/// c_1 = 16 / log e. "log" is read as log2 in both places; whether the ratio
/// was meant with a natural log is ambiguous, so treat this as indicative.
std::size_t proof_scale_repetitions(std::size_t n1);

/// Two-stage adaptive mean estimator.
///
/// Stage 1 runs m norm probes per row with ceil(n/N1) samples each at v = 2
/// (the same column draws for every row within one probe) and takes the
/// median per row. Stage 2 allocates row sample sizes with allocate_samples
/// and averages the per-row sample means. card <= 6 m n.
///
/// Throws PreconditionViolated if the tape is not adaptive, n < N1, p >= 2,
/// or m == 0. Stage streams are rng.derive(1) and rng.derive(2).
EstimateReport adaptive_mean_a3(QueryTape& tape, std::size_t n, std::size_t m, const Extended& p,
                                const RngStream& rng);

}  // namespace adaptgap
