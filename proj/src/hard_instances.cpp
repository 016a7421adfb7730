#include "adaptgap/hard_instances.hpp"

#include <cmath>

#include "adaptgap/error.hpp"

namespace adaptgap {

namespace {

constexpr std::uint64_t kPositionStream = 0;
constexpr std::uint64_t kSignStream = 1;

// N^{1/e}, exactly 1 for e = INF.
double root_scale(std::size_t n, const Extended& e) {
  return std::pow(static_cast<double>(n), e.reciprocal());
}

class SignSource {
 public:
  SignSource(const RngStream& rng, Polarity polarity)
      : stream_(rng.derive(kSignStream)), flip_(polarity == Polarity::kNegated ? -1.0 : 1.0) {}
  double next() { return flip_ * stream_.sign(); }

 private:
  RngStream stream_;
  double flip_;
};

}  // namespace

MixedMatrix sample_mu1(const ProblemSpec& spec, const RngStream& rng, Polarity polarity) {
  RngStream positions = rng.derive(kPositionStream);
  SignSource signs(rng, polarity);
  const std::size_t flat = positions.uniform_index(spec.entries());
  auto f = MixedMatrix::zeros(spec);
  f.set(flat / spec.n2, flat % spec.n2, signs.next() * root_scale(spec.n1, spec.p) * root_scale(spec.n2, spec.u));
  return f;
}

MixedMatrix sample_mu2(const ProblemSpec& spec, const RngStream& rng, Polarity polarity) {
  SignSource signs(rng, polarity);
  std::vector<double> entries(spec.entries());
  for (double& x : entries) x = signs.next();
  return MixedMatrix(spec, std::move(entries));
}

MixedMatrix sample_mu3(const ProblemSpec& spec, const RngStream& rng, Polarity polarity) {
  RngStream positions = rng.derive(kPositionStream);
  SignSource signs(rng, polarity);
  const double height = root_scale(spec.n2, spec.u);
  auto f = MixedMatrix::zeros(spec);
  for (std::size_t i = 0; i < spec.n1; ++i) {
    f.set(i, positions.uniform_index(spec.n2), signs.next() * height);
  }
  return f;
}

MixedMatrix sample_mu4(const ProblemSpec& spec, const RngStream& rng, Polarity polarity) {
  if (spec.p.is_inf()) throw InvalidExponent("active-row Bernoulli family needs finite p");
  RngStream positions = rng.derive(kPositionStream);
  SignSource signs(rng, polarity);
  const double height = root_scale(spec.n1, spec.p);
  const std::size_t active = positions.uniform_index(spec.n1);
  auto f = MixedMatrix::zeros(spec);
  for (std::size_t j = 0; j < spec.n2; ++j) f.set(active, j, signs.next() * height);
  return f;
}

MixedMatrix HardFamily::sample(const RngStream& rng, Polarity polarity) const {
  switch (variant) {
    case HardVariant::kSingleSpike:
      return sample_mu1(spec, rng, polarity);
    case HardVariant::kFullBernoulli:
      return sample_mu2(spec, rng, polarity);
    case HardVariant::kRowSpikes:
      return sample_mu3(spec, rng, polarity);
    case HardVariant::kActiveRowBernoulli:
      return sample_mu4(spec, rng, polarity);
  }
  throw InvalidParameters("unknown hard family");
}

std::string variant_name(HardVariant v) {
  switch (v) {
    case HardVariant::kSingleSpike:
      return "mu1";
    case HardVariant::kFullBernoulli:
      return "mu2";
    case HardVariant::kRowSpikes:
      return "mu3";
    case HardVariant::kActiveRowBernoulli:
      return "mu4";
  }
  return "?";
}

HardVariant parse_variant(std::string_view text) {
  if (text == "mu1" || text == "single-spike") return HardVariant::kSingleSpike;
  if (text == "mu2" || text == "full-bernoulli") return HardVariant::kFullBernoulli;
  if (text == "mu3" || text == "row-spikes") return HardVariant::kRowSpikes;
  if (text == "mu4" || text == "active-row-bernoulli") return HardVariant::kActiveRowBernoulli;
  throw InvalidParameters("unknown family '" + std::string(text) + "'");
}

bool in_lower_bound_regime(std::size_t n, const ProblemSpec& spec, double c0) {
  if (c0 <= 0.0) return true;
  return static_cast<double>(n) < c0 * static_cast<double>(spec.n1) * static_cast<double>(spec.n2);
}

}  // namespace adaptgap
