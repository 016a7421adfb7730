#pragma once

#include <string>
#include <string_view>

#include "adaptgap/mixed_norm.hpp"
#include "adaptgap/rng.hpp"

namespace adaptgap {

/// Adversarial input distributions from the lower-bound constructions. Every
/// draw lies in the unit ball of L_p^{N1}(L_u^{N2}).
enum class HardVariant {
  kSingleSpike,          // mu1: one entry +-N1^{1/p} N2^{1/u}
  kFullBernoulli,        // mu2: every entry +-1
  kRowSpikes,            // mu3: one +-N2^{1/u} spike per row
  kActiveRowBernoulli,   // mu4: one row of +-N1^{1/p}, rest zero
};

/// Flips every sign drawn by a sampler. Positions are drawn from a separate
/// stream, so a flipped draw is the exact negative of the unflipped one.
enum class Polarity { kPositive, kNegated };

MixedMatrix sample_mu1(const ProblemSpec& spec, const RngStream& rng,
                       Polarity polarity = Polarity::kPositive);
MixedMatrix sample_mu2(const ProblemSpec& spec, const RngStream& rng,
                       Polarity polarity = Polarity::kPositive);
MixedMatrix sample_mu3(const ProblemSpec& spec, const RngStream& rng,
                       Polarity polarity = Polarity::kPositive);
/// Throws InvalidExponent if p is INF.
MixedMatrix sample_mu4(const ProblemSpec& spec, const RngStream& rng,
                       Polarity polarity = Polarity::kPositive);

struct HardFamily {
  HardVariant variant;
  ProblemSpec spec;

  MixedMatrix sample(const RngStream& rng, Polarity polarity = Polarity::kPositive) const;
};

/// Short name used in CSV output and on the command line: mu1..mu4.
std::string variant_name(HardVariant v);
/// Accepts mu1..mu4 or the long names (single-spike, full-bernoulli, ...).
HardVariant parse_variant(std::string_view text);

/// Lower-bound regime constant c_0 = 1/21 of the hard-measure construction.
inline constexpr double kRegimeC0 = 1.0 / 21.0;

/// True when n < c0 * N1 * N2 (or always, when c0 <= 0 disables the guard).
bool in_lower_bound_regime(std::size_t n, const ProblemSpec& spec, double c0 = kRegimeC0);

}  // namespace adaptgap
