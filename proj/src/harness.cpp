#include "adaptgap/harness.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <ostream>

#include "adaptgap/error.hpp"
#include "adaptgap/info_oracle.hpp"
#include "adaptgap/mixed_norm.hpp"

namespace adaptgap {

ErrorStats summarize(std::span<const TrialOutcome> outcomes) {
  if (outcomes.size() < 2) throw InvalidParameters("error statistics need at least two trials");
  const auto count = static_cast<double>(outcomes.size());
  CompensatedSum squares, abs_errors, cards;
  for (const auto& o : outcomes) {
    squares.add(o.error * o.error);
    abs_errors.add(std::abs(o.error));
    cards.add(o.card);
  }
  ErrorStats stats;
  stats.trials = outcomes.size();
  const double mean_square = squares.value() / count;
  stats.rms = std::sqrt(mean_square);
  stats.mean_abs_error = abs_errors.value() / count;
  stats.mean_card = cards.value() / count;
  if (stats.rms > 0.0) {
    CompensatedSum deviation;
    for (const auto& o : outcomes) {
      const double d = o.error * o.error - mean_square;
      deviation.add(d * d);
    }
    const double variance = deviation.value() / (count - 1.0);
    stats.standard_error = std::sqrt(variance / count) / (2.0 * stats.rms);
  }
  return stats;
}

ErrorStats rms_error(const InstanceSampler& sampler, const Estimator& estimator,
                     std::size_t trials, std::uint64_t seed, unsigned workers,
                     std::uint64_t salt) {
  if (trials < 2) throw InvalidParameters("rms_error needs trials >= 2");
  const auto outcomes = run_trials(trials, workers, [&](std::size_t t) {
    const RngStream s = trial_stream(seed, t).derive(salt);
    const MixedMatrix f = sampler(s.derive(0));
    const EstimateReport r = estimator(f, s.derive(1));
    return TrialOutcome{r.value - scalar_mean(f), static_cast<double>(r.cards)};
  });
  return summarize(outcomes);
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kA2:
      return "A2";
    case EstimatorKind::kA3:
      return "A3";
    case EstimatorKind::kDsAdaptive:
      return "DS_ADAPTIVE";
    case EstimatorKind::kDsNonadaptive:
      return "DS_NONADAPTIVE";
  }
  return "?";
}

Estimator a2_estimator(std::uint64_t n) {
  return [n](const MixedMatrix& f, const RngStream& rng) {
    auto tape = QueryTape::open_nonadaptive(f, draw_indices(f.spec(), n, rng));
    return mc_mean_a2(tape, n, rng);
  };
}

Estimator a3_estimator(std::uint64_t n, std::optional<std::size_t> m) {
  return [n, m](const MixedMatrix& f, const RngStream& rng) {
    const std::size_t reps = m.value_or(default_repetitions(f.rows()));
    auto tape = QueryTape::open_adaptive(f, 6 * reps * n);
    return adaptive_mean_a3(tape, n, reps, f.spec().p, rng);
  };
}

void TrialPlan::validate() const {
  if (trials < 2) throw InvalidParameters("a trial plan needs trials >= 2");
  if (budgets.empty()) throw InvalidParameters("a trial plan needs at least one budget");
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    if (budgets[b] == 0) throw InvalidParameters("budgets must be positive");
    if (b > 0 && budgets[b] <= budgets[b - 1]) {
      throw InvalidParameters("budgets must be strictly increasing");
    }
  }
}

ResultRow ds_rms_error(const DirectSumSpec& base, DsMode mode, const DsOptions& options,
                       std::size_t trials, std::uint64_t seed, unsigned workers) {
  const double delta = options.delta.value_or(default_delta(base.alpha));
  const LevelAllocation schedule = level_allocation(options.k0, base.alpha, delta, options.c0);
  const DirectSumSpec spec(base.alpha, base.p, base.u, base.p1, schedule.k1);
  const auto outcomes = run_trials(trials, workers, [&](std::size_t t) {
    const RngStream s = trial_stream(seed, t).derive(options.k0);
    const DirectSumElement x = sample_ds_mu4(spec, s.derive(0));
    const EstimateReport r = ds_estimate(x, mode, options, s.derive(1));
    return TrialOutcome{r.value - ds_integral(x), static_cast<double>(r.cards)};
  });
  const std::size_t top = DirectSumSpec::level_size(schedule.k1);
  return ResultRow{"ds-mu4",
                   estimator_name(mode == DsMode::kAdaptive ? EstimatorKind::kDsAdaptive
                                                            : EstimatorKind::kDsNonadaptive),
                   base.p,
                   base.u,
                   top,
                   top,
                   schedule.total(),
                   summarize(outcomes),
                   seed};
}

std::vector<ResultRow> run_plan(const TrialPlan& plan, unsigned workers) {
  plan.validate();
  std::vector<ResultRow> rows;
  const ProblemSpec& spec = plan.family.spec;
  for (const std::uint64_t budget : plan.budgets) {
    switch (plan.estimator) {
      case EstimatorKind::kA2:
      case EstimatorKind::kA3: {
        const HardFamily family = plan.family;
        const Estimator est = plan.estimator == EstimatorKind::kA2
                                  ? a2_estimator(budget)
                                  : a3_estimator(budget, plan.params.m);
        const ErrorStats stats =
            rms_error([&family](const RngStream& r) { return family.sample(r); }, est,
                      plan.trials, plan.master_seed, workers, budget);
        rows.push_back({variant_name(plan.family.variant), estimator_name(plan.estimator), spec.p,
                        spec.u, spec.n1, spec.n2, budget, stats, plan.master_seed});
        break;
      }
      case EstimatorKind::kDsAdaptive:
      case EstimatorKind::kDsNonadaptive: {
        const DirectSumSpec base(plan.params.alpha, spec.p, spec.u, plan.params.p1, 0);
        DsOptions options;
        options.k0 = static_cast<unsigned>(budget);
        options.delta = plan.params.delta;
        options.c0 = plan.params.level_c0;
        options.m = plan.params.m;
        const DsMode mode = plan.estimator == EstimatorKind::kDsAdaptive ? DsMode::kAdaptive
                                                                         : DsMode::kNonadaptive;
        rows.push_back(ds_rms_error(base, mode, options, plan.trials, plan.master_seed, workers));
        break;
      }
    }
  }
  return rows;
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4) throw InsufficientPoints("rate fit needs at least four points");
  RateFit fit;
  for (const auto& [n, err] : points) {
    if (!(n > 0.0) || !(err > 0.0)) throw NonpositiveError("rate fit needs positive n and error");
    fit.points.emplace_back(std::log2(n), std::log2(err));
  }
  const auto count = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw InsufficientPoints("rate fit needs at least two distinct n");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::min(1.0, (sxy * sxy) / (sxx * syy));
  return fit;
}

namespace {

std::optional<RateFit> fit_if_possible(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) return std::nullopt;
  for (const auto& [n, e] : points) {
    if (!(e > 0.0)) return std::nullopt;
  }
  return rate_fit(points);
}

}  // namespace

GapResult gap_experiment(std::span<const std::uint64_t> budgets, double c3, std::size_t trials,
                         std::uint64_t seed, const GapOptions& options) {
  if (!(c3 > 0.0)) throw InvalidParameters("gap experiment needs c3 > 0");
  if (trials < 2) throw InvalidParameters("gap experiment needs trials >= 2");
  const Extended p(1.0);
  const Extended u = Extended::inf();

  std::vector<ProblemSpec> specs;
  for (const std::uint64_t n : budgets) {
    const auto side = static_cast<std::size_t>(std::ceil(c3 * std::sqrt(static_cast<double>(n))));
    ProblemSpec spec(side, side, p, u);
    if (n < spec.n1) {
      throw RegimeViolation("n = " + std::to_string(n) + " is below N1 = " +
                            std::to_string(spec.n1));
    }
    if (!in_lower_bound_regime(n, spec, options.guard_c0)) {
      throw RegimeViolation("n = " + std::to_string(n) + " violates n < c0 N1 N2 with N1 = N2 = " +
                            std::to_string(side) + ", c0 = " + format_double(options.guard_c0));
    }
    specs.push_back(spec);
  }

  GapResult result;
  std::vector<std::pair<double, double>> ratio_pts, a2m_pts, a2n_pts, a3_pts;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    const std::uint64_t n = budgets[b];
    const ProblemSpec& spec = specs[b];
    const std::size_t m = options.m.value_or(default_repetitions(spec.n1));
    struct Triple {
      TrialOutcome a3, a2_matched, a2_nominal;
    };
    const auto outcomes = run_trials(trials, options.workers, [&](std::size_t t) {
      const RngStream s = trial_stream(seed, t).derive(n);
      const MixedMatrix f = sample_mu4(spec, s.derive(0));
      const double truth = scalar_mean(f);
      auto adaptive_tape = QueryTape::open_adaptive(f, 6 * m * n);
      const EstimateReport r3 = adaptive_mean_a3(adaptive_tape, n, m, p, s.derive(1));
      const EstimateReport r2m = a2_estimator(r3.cards)(f, s.derive(2));
      const EstimateReport r2n = a2_estimator(n)(f, s.derive(3));
      return Triple{{r3.value - truth, static_cast<double>(r3.cards)},
                    {r2m.value - truth, static_cast<double>(r2m.cards)},
                    {r2n.value - truth, static_cast<double>(r2n.cards)}};
    });
    std::vector<TrialOutcome> a3, a2m, a2n;
    for (const auto& o : outcomes) {
      a3.push_back(o.a3);
      a2m.push_back(o.a2_matched);
      a2n.push_back(o.a2_nominal);
    }
    GapRow row{n, spec.n1, spec.n2, m, summarize(a3), summarize(a2m), summarize(a2n), 0.0};
    row.ratio = row.a3.rms > 0.0 ? row.a2_matched.rms / row.a3.rms
                                 : std::numeric_limits<double>::infinity();
    const auto nd = static_cast<double>(n);
    ratio_pts.emplace_back(nd, row.ratio);
    a2m_pts.emplace_back(nd, row.a2_matched.rms);
    a2n_pts.emplace_back(nd, row.a2_nominal.rms);
    a3_pts.emplace_back(nd, row.a3.rms);
    result.rows.push_back(row);
  }
  if (std::all_of(ratio_pts.begin(), ratio_pts.end(),
                  [](const auto& pt) { return std::isfinite(pt.second); })) {
    result.ratio_fit = fit_if_possible(ratio_pts);
  }
  result.a2_matched_fit = fit_if_possible(a2m_pts);
  result.a2_nominal_fit = fit_if_possible(a2n_pts);
  result.a3_fit = fit_if_possible(a3_pts);
  return result;
}

std::string regime_name(RateRegime regime) {
  switch (regime) {
    case RateRegime::kPGeU:
      return "p-ge-u";
    case RateRegime::kPLtULe2:
      return "p-lt-u-le-2";
    case RateRegime::kTwoLePLtU:
      return "two-le-p-lt-u";
    case RateRegime::kPLt2LtU:
      return "p-lt-2-lt-u";
    case RateRegime::kPLt2LtUSmallN:
      return "p-lt-2-lt-u-small-n";
  }
  return "?";
}

RateRegime parse_regime(std::string_view text) {
  for (auto r : {RateRegime::kPGeU, RateRegime::kPLtULe2, RateRegime::kTwoLePLtU,
                 RateRegime::kPLt2LtU, RateRegime::kPLt2LtUSmallN}) {
    if (text == regime_name(r)) return r;
  }
  throw InvalidParameters("unknown regime '" + std::string(text) + "'");
}

namespace {

// Smallest second dimension M with n < c0 * fixed * M, as in the reduction
// to sub-problems: M = floor(n / (c0 * fixed) * 2) + 1.
std::size_t reduced_dimension(std::uint64_t n, std::size_t fixed) {
  return static_cast<std::size_t>(std::floor(2.0 * static_cast<double>(n) /
                                             (kRegimeC0 * static_cast<double>(fixed)))) +
         1;
}

std::vector<std::uint64_t> powers_of_two(int lo, int hi, int step = 1) {
  std::vector<std::uint64_t> out;
  for (int e = lo; e <= hi; e += step) out.push_back(std::uint64_t{1} << e);
  return out;
}

}  // namespace

RegimeSetup default_regime_setup(RateRegime regime) {
  switch (regime) {
    case RateRegime::kPGeU: {
      RegimeSetup s{regime, HardVariant::kRowSpikes, Extended(2.0), Extended(1.0), {},
                    {EstimatorKind::kA2}};
      for (auto n : powers_of_two(4, 11)) s.grid.push_back({4096, 16, n});
      return s;
    }
    case RateRegime::kPLtULe2: {
      RegimeSetup s{regime, HardVariant::kSingleSpike, Extended(1.0), Extended(2.0), {},
                    {EstimatorKind::kA2}};
      for (auto n : powers_of_two(6, 12)) s.grid.push_back({16, reduced_dimension(n, 16), n});
      return s;
    }
    case RateRegime::kTwoLePLtU: {
      RegimeSetup s{regime, HardVariant::kFullBernoulli, Extended(2.0), Extended(4.0), {},
                    {EstimatorKind::kA2}};
      for (auto n : powers_of_two(5, 11)) s.grid.push_back({256, 256, n});
      return s;
    }
    case RateRegime::kPLt2LtU: {
      RegimeSetup s{regime, HardVariant::kActiveRowBernoulli, Extended(1.0), Extended::inf(), {},
                    {EstimatorKind::kA2, EstimatorKind::kA3}};
      for (auto n : powers_of_two(8, 14, 2)) {
        const auto side = static_cast<std::size_t>(std::ceil(5.0 * std::sqrt(static_cast<double>(n))));
        s.grid.push_back({side, side, n});
      }
      return s;
    }
    case RateRegime::kPLt2LtUSmallN: {
      RegimeSetup s{regime, HardVariant::kSingleSpike, Extended(1.0), Extended::inf(), {},
                    {EstimatorKind::kA2}};
      for (auto n : powers_of_two(4, 10)) s.grid.push_back({reduced_dimension(n, 16), 16, n});
      return s;
    }
  }
  throw InvalidParameters("unknown regime");
}

double predicted_error(RateRegime regime, EstimatorKind estimator, const Extended& p,
                       const Extended& u, const GridPoint& point) {
  const double n = static_cast<double>(point.n);
  const double n1 = static_cast<double>(point.n1);
  const double n2 = static_cast<double>(point.n2);
  const double ip = p.reciprocal(), iu = u.reciprocal();
  const double ipb = p.capped_at_two().reciprocal(), iub = u.capped_at_two().reciprocal();
  switch (regime) {
    case RateRegime::kPGeU:
      return std::min(std::pow(n2, iub - ipb) * std::pow(n, -1.0 + ipb), std::pow(n, -1.0 + iub));
    case RateRegime::kPLtULe2:
      return std::min(std::pow(n1, ip - iu) * std::pow(n, -1.0 + iu), std::pow(n, -1.0 + ip));
    case RateRegime::kTwoLePLtU:
      return std::pow(n, -0.5);
    case RateRegime::kPLt2LtU:
      if (estimator == EstimatorKind::kA3) {
        return std::pow(n1, ip - iu) * std::pow(n, -1.0 + iu) + std::pow(n, -0.5);
      }
      return std::pow(n1, ip - 0.5) * std::pow(n, -0.5);
    case RateRegime::kPLt2LtUSmallN:
      return std::pow(n, -1.0 + ip);
  }
  return 0.0;
}

RateReport rate_experiment(const RegimeSetup& setup, std::size_t trials, std::uint64_t seed,
                           unsigned workers, double guard_c0) {
  for (const auto& pt : setup.grid) {
    const ProblemSpec spec(pt.n1, pt.n2, setup.p, setup.u);
    if (!in_lower_bound_regime(pt.n, spec, guard_c0)) {
      throw RegimeViolation("grid point n = " + std::to_string(pt.n) + ", N1 = " +
                            std::to_string(pt.n1) + ", N2 = " + std::to_string(pt.n2) +
                            " violates n < c0 N1 N2");
    }
    for (auto est : setup.estimators) {
      if (est == EstimatorKind::kA3 && pt.n < pt.n1) {
        throw RegimeViolation("A3 grid point needs n >= N1");
      }
    }
  }
  RateReport report{setup, {}, {}};
  for (auto est : setup.estimators) {
    std::vector<std::pair<double, double>> rms_pts, mae_pts, theory_pts;
    for (const auto& pt : setup.grid) {
      const HardFamily family{setup.family, ProblemSpec(pt.n1, pt.n2, setup.p, setup.u)};
      const Estimator estimator = est == EstimatorKind::kA3 ? a3_estimator(pt.n) : a2_estimator(pt.n);
      const ErrorStats stats =
          rms_error([&family](const RngStream& r) { return family.sample(r); }, estimator, trials,
                    seed, workers, pt.n);
      report.rows.push_back({variant_name(setup.family), estimator_name(est), setup.p, setup.u,
                             pt.n1, pt.n2, pt.n, stats, seed});
      const auto nd = static_cast<double>(pt.n);
      rms_pts.emplace_back(nd, stats.rms);
      mae_pts.emplace_back(nd, stats.mean_abs_error);
      theory_pts.emplace_back(nd, predicted_error(setup.regime, est, setup.p, setup.u, pt));
    }
    report.summaries.push_back(
        {est, rate_fit(rms_pts), rate_fit(mae_pts), rate_fit(theory_pts).slope});
  }
  return report;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_table(std::ostream& out, std::span<const ResultRow> rows, TableFormat format) {
  const char sep = format == TableFormat::kTsv ? '\t' : ',';
  const char* columns[] = {"family", "estimator", "p",     "u",         "N1",   "N2", "n",
                           "trials", "rms",       "stderr", "mean_card", "seed", "mae"};
  for (std::size_t c = 0; c < std::size(columns); ++c) {
    if (c > 0) out << sep;
    out << columns[c];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.family << sep << r.estimator << sep << r.p.to_string() << sep << r.u.to_string()
        << sep << r.n1 << sep << r.n2 << sep << r.n << sep << r.stats.trials << sep
        << format_double(r.stats.rms) << sep << format_double(r.stats.standard_error) << sep
        << format_double(r.stats.mean_card) << sep << r.seed << sep
        << format_double(r.stats.mean_abs_error) << '\n';
  }
}

}  // namespace adaptgap
