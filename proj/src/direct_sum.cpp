#include "adaptgap/direct_sum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptgap/error.hpp"
#include "adaptgap/hard_instances.hpp"
#include "adaptgap/info_oracle.hpp"

namespace adaptgap {

DirectSumSpec::DirectSumSpec(double alpha_, Extended p_, Extended u_, Extended p1_,
                             unsigned k_max_)
    : alpha(alpha_), p(p_), u(u_), p1(p1_), k_max(k_max_) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw InvalidParameters("direct sum needs a finite weight exponent alpha > 1");
  }
  if (k_max > kMaxLevel) {
    throw InvalidParameters("k_max above " + std::to_string(kMaxLevel) + " is not supported");
  }
}

ProblemSpec DirectSumSpec::level_spec(unsigned k) const {
  return ProblemSpec(level_size(k), level_size(k), p, u);
}

DirectSumElement::DirectSumElement(DirectSumSpec spec)
    : spec_(spec), levels_(spec.k_max + 1) {}

void DirectSumElement::set_level(unsigned k, MixedMatrix f) {
  if (k > spec_.k_max) throw InvalidParameters("level above k_max");
  const ProblemSpec expected = spec_.level_spec(k);
  const ProblemSpec& got = f.spec();
  if (got.n1 != expected.n1 || got.n2 != expected.n2 || !(got.p == expected.p) ||
      !(got.u == expected.u)) {
    throw InvalidParameters("level " + std::to_string(k) + " has the wrong shape or exponents");
  }
  levels_[k] = std::move(f);
}

const MixedMatrix* DirectSumElement::level(unsigned k) const {
  if (k >= levels_.size() || !levels_[k]) return nullptr;
  return &*levels_[k];
}

double ds_norm(const DirectSumElement& x) {
  const auto& spec = x.spec();
  std::vector<double> norms;
  for (unsigned k = 0; k <= spec.k_max; ++k) {
    if (const auto* f = x.level(k)) norms.push_back(mixed_norm(*f));
  }
  if (norms.empty()) return 0.0;
  const double scale = *std::max_element(norms.begin(), norms.end());
  if (spec.p1.is_inf() || scale == 0.0) return scale;
  const double e = spec.p1.value();
  CompensatedSum sum;
  for (double r : norms) sum.add(abs_pow(r / scale, e));
  return scale * std::pow(sum.value(), 1.0 / e);
}

double ds_integral(const DirectSumElement& x) {
  CompensatedSum sum;
  for (unsigned k = 0; k <= x.spec().k_max; ++k) {
    if (const auto* f = x.level(k)) sum.add(std::exp2(-x.spec().alpha * k) * scalar_mean(*f));
  }
  return sum.value();
}

std::uint64_t LevelAllocation::total() const {
  std::uint64_t sum = 0;
  for (const auto& [k, n] : budgets) sum += n;
  return sum;
}

LevelAllocation level_allocation(unsigned k0, double alpha, double delta, double c0) {
  if (!(alpha > 1.0)) throw InvalidParameters("level allocation needs alpha > 1");
  if (!(delta > 0.0 && delta < alpha - 1.0)) {
    throw InvalidParameters("level allocation needs 0 < delta < alpha - 1");
  }
  if (!(c0 > 0.0 && c0 < 1.0)) throw InvalidParameters("level allocation needs 0 < c0 < 1");
  if (k0 == 0) throw InvalidParameters("level allocation needs k0 >= 1");

  const double beta = (alpha + 1.0) / alpha;
  LevelAllocation out;
  out.k0 = k0;
  out.k1 = static_cast<unsigned>(std::floor(beta * k0));
  for (unsigned k = 0; k <= out.k1; ++k) {
    std::uint64_t n_k = 0;
    if (k < k0) {
      n_k = std::uint64_t{1} << (2 * k);
    } else {
      const double exponent = 2.0 * k0 - delta * (static_cast<double>(k) - k0);
      n_k = static_cast<std::uint64_t>(std::ceil(c0 * std::exp2(exponent))) - 1;
    }
    out.budgets.emplace_back(k, n_k);
  }
  // sum_{k<k0} 4^k < 4^{k0}/3 and the tail is a geometric series in 2^{-delta}.
  const double c3 = 1.0 / 3.0 + c0 / (1.0 - std::exp2(-delta));
  out.c3 = static_cast<std::uint64_t>(std::ceil(c3));
  return out;
}

namespace {

double full_readout(const MixedMatrix& f, std::uint64_t& cards) {
  std::vector<EntryIndex> all;
  all.reserve(f.spec().entries());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) all.push_back({i, j});
  }
  auto tape = QueryTape::open_nonadaptive(f, all);
  CompensatedSum sum;
  for (const auto& idx : all) sum.add(tape.query(idx));
  cards += tape.card();
  return sum.value() / static_cast<double>(f.spec().entries());
}

}  // namespace

EstimateReport ds_estimate(const DirectSumElement& x, DsMode mode, const DsOptions& options,
                           const RngStream& rng) {
  const DirectSumSpec& spec = x.spec();
  const double delta = options.delta.value_or(default_delta(spec.alpha));
  const LevelAllocation schedule = level_allocation(options.k0, spec.alpha, delta, options.c0);
  if (schedule.k1 > DirectSumSpec::kMaxLevel) {
    throw InvalidParameters("schedule reaches level " + std::to_string(schedule.k1) +
                            ", above the supported maximum");
  }

  if (mode == DsMode::kAdaptive) {
    const Extended two(2.0);
    if (!(spec.p < two && two < spec.u)) {
      throw PreconditionViolated("adaptive composite needs p < 2 < u");
    }
    for (const auto& [k, n_k] : schedule.budgets) {
      if (k >= options.k0 && n_k < DirectSumSpec::level_size(k)) {
        throw PreconditionViolated("level " + std::to_string(k) + " budget " +
                                   std::to_string(n_k) + " is below N_k = " +
                                   std::to_string(DirectSumSpec::level_size(k)));
      }
    }
  }

  EstimateReport report;
  CompensatedSum total;
  for (const auto& [k, n_k] : schedule.budgets) {
    const ProblemSpec level_spec = spec.level_spec(k);
    std::optional<MixedMatrix> zero;
    const MixedMatrix* f = x.level(k);
    if (f == nullptr) {
      zero.emplace(MixedMatrix::zeros(level_spec));
      f = &*zero;
    }
    const double weight = std::exp2(-spec.alpha * k);
    if (k < options.k0) {
      total.add(weight * full_readout(*f, report.cards));
      continue;
    }
    if (n_k == 0) continue;
    const RngStream level_rng = rng.derive(k);
    EstimateReport level;
    if (mode == DsMode::kAdaptive) {
      const std::size_t m = options.m.value_or(default_repetitions(level_spec.n1));
      auto tape = QueryTape::open_adaptive(*f, 6 * m * n_k);
      level = adaptive_mean_a3(tape, n_k, m, spec.p, level_rng);
    } else {
      auto tape = QueryTape::open_nonadaptive(*f, draw_indices(level_spec, n_k, level_rng));
      level = mc_mean_a2(tape, n_k, level_rng);
    }
    total.add(weight * level.value);
    report.cards += level.cards;
  }
  report.value = total.value();
  return report;
}

DirectSumElement sample_ds_mu4(const DirectSumSpec& spec, const RngStream& rng) {
  DirectSumElement x(spec);
  const double scale = std::pow(spec.k_max + 1.0, -spec.p1.reciprocal());
  for (unsigned k = 0; k <= spec.k_max; ++k) {
    auto f = sample_mu4(spec.level_spec(k), rng.derive(k));
    std::vector<double> entries(f.entries().begin(), f.entries().end());
    for (double& e : entries) e *= scale;
    x.set_level(k, MixedMatrix(f.spec(), std::move(entries)));
  }
  return x;
}

}  // namespace adaptgap
