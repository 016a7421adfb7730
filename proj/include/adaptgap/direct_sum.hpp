#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "adaptgap/estimators.hpp"
#include "adaptgap/extended.hpp"
#include "adaptgap/mixed_norm.hpp"
#include "adaptgap/rng.hpp"

namespace adaptgap {

/// Weighted l_{p1}-sum of the spaces L_p^{N_k}(L_u^{N_k}), N_k = 2^k,
/// truncated at level k_max for representation. The integration functional
/// is sum_k 2^{-alpha k} I^{N_k,N_k} f_k.
struct DirectSumSpec {
  double alpha;
  Extended p;
  Extended u;
  Extended p1;
  unsigned k_max;

  /// Throws InvalidParameters unless alpha > 1 and k_max <= kMaxLevel.
  DirectSumSpec(double alpha, Extended p, Extended u, Extended p1, unsigned k_max);

  static constexpr unsigned kMaxLevel = 12;

  static std::size_t level_size(unsigned k) { return std::size_t{1} << k; }
  ProblemSpec level_spec(unsigned k) const;
};

/// Element with optional per-level components; absent levels are zero.
class DirectSumElement {
 public:
  explicit DirectSumElement(DirectSumSpec spec);

  /// Throws InvalidParameters if k > k_max or f's shape is not 2^k x 2^k
  /// with the spec's exponents.
  void set_level(unsigned k, MixedMatrix f);
  const MixedMatrix* level(unsigned k) const;

  const DirectSumSpec& spec() const { return spec_; }

 private:
  DirectSumSpec spec_;
  std::vector<std::optional<MixedMatrix>> levels_;
};

double ds_norm(const DirectSumElement& x);

/// Exact functional value from a full readout of every present level.
double ds_integral(const DirectSumElement& x);

struct LevelAllocation {
  unsigned k0;
  unsigned k1;
  /// (k, n_k) for 0 <= k <= k1.
  std::vector<std::pair<unsigned, std::uint64_t>> budgets;
  /// Integer constant c(3) with total() <= c3 * 2^{2 k0}.
  std::uint64_t c3;

  std::uint64_t total() const;
  std::uint64_t bound() const { return c3 << (2 * k0); }
};

/// Level schedule: n_k = 4^k below k0, ceil(c0 2^{2 k0 - delta (k - k0)}) - 1
/// for k0 <= k <= k1 = floor(beta k0), beta = (alpha + 1) / alpha.
/// Throws InvalidParameters unless alpha > 1, 0 < delta < alpha - 1,
/// 0 < c0 < 1 and k0 >= 1.
LevelAllocation level_allocation(unsigned k0, double alpha, double delta, double c0);

inline double default_delta(double alpha) { return (alpha - 1.0) / 2.0; }
inline constexpr double kDefaultLevelC0 = 0.75;

enum class DsMode { kAdaptive, kNonadaptive };

struct DsOptions {
  unsigned k0 = 4;
  std::optional<double> delta;  // default (alpha - 1) / 2
  double c0 = kDefaultLevelC0;
  /// Repetitions for the adaptive estimator; nullopt picks the per-level default.
  std::optional<std::size_t> m;
};

/// Composite estimator: levels below k0 are read in full, levels k0..k1 are
/// estimated with adaptive_mean_a3 (kAdaptive) or mc_mean_a2 (kNonadaptive)
/// at budget n_k, higher levels are dropped. Level k uses rng.derive(k).
///
/// Throws PreconditionViolated in adaptive mode unless p < 2 < u and
/// n_k >= N_k at every estimated level.
EstimateReport ds_estimate(const DirectSumElement& x, DsMode mode, const DsOptions& options,
                           const RngStream& rng);

/// Random element with an independent active-row Bernoulli draw at every
/// level 0..k_max, scaled by (k_max + 1)^{-1/p1} so that ds_norm(x) = 1.
DirectSumElement sample_ds_mu4(const DirectSumSpec& spec, const RngStream& rng);

}  // namespace adaptgap
