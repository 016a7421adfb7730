#include "adaptgap/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "adaptgap/error.hpp"
#include "adaptgap/mixed_norm.hpp"

namespace adaptgap {

namespace {

// Sign of x*y - z*t, evaluated without rounding the products (fma recovers
// each product's rounding error).
int product_compare(double x, double y, double z, double t) {
  const double p1 = x * y, p2 = z * t;
  const double e1 = std::fma(x, y, -p1), e2 = std::fma(z, t, -p2);
  const double d = (p1 - p2) + (e1 - e2);
  return (d > 0.0) - (d < 0.0);
}

// Smallest integer q with q * sum >= w * n, i.e. ceil(w n / sum) computed
// exactly for the given doubles; plain division misrounds integer quotients.
std::uint64_t exact_ceil_share(double w, double n, double sum) {
  auto q = static_cast<std::uint64_t>(std::ceil(w * n / sum));
  while (q > 1 && product_compare(static_cast<double>(q - 1), sum, w, n) >= 0) --q;
  while (product_compare(static_cast<double>(q), sum, w, n) < 0) ++q;
  return q;
}

}  // namespace

double median(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("median of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  if (m % 2 == 1) return sorted[m / 2];
  return (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;
}

double norm_est_a1(const std::function<double(std::size_t)>& sample_access,
                   std::size_t population_size, const Extended& v, std::size_t n,
                   RngStream& rng) {
  if (v.is_inf()) throw InvalidExponent("norm estimation needs a finite exponent v");
  if (n == 0) throw InvalidParameters("norm estimation needs n >= 1");
  if (population_size == 0) throw InvalidParameters("empty population");
  const double exponent = v.value();
  CompensatedSum sum;
  for (std::size_t l = 0; l < n; ++l) {
    sum.add(abs_pow(sample_access(rng.uniform_index(population_size)), exponent));
  }
  const double mean = sum.value() / static_cast<double>(n);
  if (mean == 0.0) return 0.0;
  return std::pow(mean, 1.0 / exponent);
}

std::vector<EntryIndex> draw_indices(const ProblemSpec& spec, std::size_t n, RngStream rng) {
  std::vector<EntryIndex> indices;
  indices.reserve(n);
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t flat = rng.uniform_index(spec.entries());
    indices.push_back({flat / spec.n2, flat % spec.n2});
  }
  return indices;
}

EstimateReport mc_mean_a2(QueryTape& tape, std::size_t n, const RngStream& rng) {
  if (n == 0) throw InvalidParameters("mc_mean_a2 needs n >= 1");
  const auto indices = draw_indices(tape.spec(), n, rng);
  const std::uint64_t before = tape.card();
  CompensatedSum sum;
  for (const auto& idx : indices) sum.add(tape.query(idx));
  EstimateReport report;
  report.value = sum.value() / static_cast<double>(n);
  report.cards = tape.card() - before;
  return report;
}

std::vector<std::uint64_t> allocate_samples(std::span<const double> a_tilde, const Extended& p,
                                            std::uint64_t n) {
  if (p.is_inf() || p.value() >= 2.0) {
    throw InvalidExponent("allocate_samples needs 1 <= p < 2");
  }
  const std::size_t n1 = a_tilde.size();
  if (n1 == 0 || n < n1) throw InvalidParameters("allocate_samples needs n >= N1 >= 1");
  const double exponent = p.value();
  std::vector<double> powers(n1);
  CompensatedSum total;
  for (std::size_t i = 0; i < n1; ++i) {
    powers[i] = abs_pow(a_tilde[i], exponent);
    total.add(powers[i]);
  }
  const double sum = total.value();
  const std::uint64_t base = (n + n1 - 1) / n1;
  std::vector<std::uint64_t> allocation(n1, base);
  for (std::size_t i = 0; i < n1; ++i) {
    // a_i^p <= (1/N1) sum, compared as N1 * a_i^p <= sum.
    if (static_cast<double>(n1) * powers[i] <= sum) continue;
    allocation[i] = exact_ceil_share(powers[i], static_cast<double>(n), sum);
  }
  return allocation;
}

std::size_t default_repetitions(std::size_t n1) {
  const double m = std::ceil(std::log2(static_cast<double>(n1) + 1.0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::size_t proof_scale_repetitions(std::size_t n1) {
  const double c1 = 16.0 / std::log2(std::exp(1.0));
  return static_cast<std::size_t>(std::ceil(c1 * std::log2(static_cast<double>(n1) + 1.0)));
}

EstimateReport adaptive_mean_a3(QueryTape& tape, std::size_t n, std::size_t m, const Extended& p,
                                const RngStream& rng) {
  if (tape.mode() != TapeMode::kAdaptive) {
    throw PreconditionViolated("adaptive_mean_a3 needs an adaptive tape");
  }
  const ProblemSpec& spec = tape.spec();
  if (n < spec.n1) throw PreconditionViolated("adaptive_mean_a3 needs n >= N1");
  if (p.is_inf() || p.value() >= 2.0) throw PreconditionViolated("adaptive_mean_a3 needs p < 2");
  if (m == 0) throw PreconditionViolated("adaptive_mean_a3 needs m >= 1");

  const std::uint64_t start = tape.card();
  const std::size_t probe_size = (n + spec.n1 - 1) / spec.n1;
  const Extended two(2.0);

  // Stage 1: median of m L_2 row-norm probes.
  const RngStream stage1 = rng.derive(1);
  std::vector<std::vector<double>> probes(spec.n1, std::vector<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    const RngStream probe = stage1.derive(k);
    for (std::size_t i = 0; i < spec.n1; ++i) {
      RngStream columns = probe;
      probes[i][k] = norm_est_a1([&](std::size_t j) { return tape.query(i, j); }, spec.n2, two,
                                 probe_size, columns);
    }
  }
  std::vector<double> a_tilde(spec.n1);
  for (std::size_t i = 0; i < spec.n1; ++i) a_tilde[i] = median(probes[i]);
  const std::uint64_t stage1_cards = tape.card() - start;

  // Stage 2: row means from the allocated sample sizes.
  auto allocation = allocate_samples(a_tilde, p, n);
  RngStream stage2 = rng.derive(2);
  CompensatedSum total;
  for (std::size_t i = 0; i < spec.n1; ++i) {
    CompensatedSum row_sum;
    for (std::uint64_t l = 0; l < allocation[i]; ++l) {
      row_sum.add(tape.query(i, stage2.uniform_index(spec.n2)));
    }
    total.add(row_sum.value() / static_cast<double>(allocation[i]));
  }

  EstimateReport report;
  report.value = total.value() / static_cast<double>(spec.n1);
  report.cards = tape.card() - start;
  report.stage_cards = std::make_pair(stage1_cards, report.cards - stage1_cards);
  report.allocation = std::move(allocation);
  return report;
}

}  // namespace adaptgap
