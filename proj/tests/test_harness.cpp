#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adaptgap/error.hpp"
#include "adaptgap/harness.hpp"

using namespace adaptgap;

TEST_CASE("run_trials keeps trial order and rethrows the first failure") {
  for (unsigned workers : {1u, 3u}) {
    const auto out = run_trials(50, workers, [](std::size_t t) { return t * t; });
    for (std::size_t t = 0; t < 50; ++t) CHECK(out[t] == t * t);
    CHECK_THROWS_WITH(run_trials(20, workers,
                                 [](std::size_t t) -> int {
                                   if (t == 7 || t == 13) throw InvalidParameters(std::to_string(t));
                                   return 0;
                                 }),
                      "7");
  }
}

TEST_CASE("rms_error calibration cases") {
  const ProblemSpec spec(64, 64, Extended(2.0), Extended(2.0));
  const InstanceSampler bernoulli = [spec](const RngStream& r) { return sample_mu2(spec, r); };
  const Estimator exact = [](const MixedMatrix& f, const RngStream&) {
    EstimateReport r;
    r.value = scalar_mean(f);
    r.cards = f.spec().entries();
    return r;
  };
  CHECK(rms_error(bernoulli, exact, 20, 1).rms == 0.0);

  const InstanceSampler zero = [spec](const RngStream&) { return MixedMatrix::zeros(spec); };
  CHECK(rms_error(zero, a2_estimator(100), 20, 1).rms == 0.0);
  const ProblemSpec gap_spec(64, 64, Extended(1.0), Extended::inf());
  const InstanceSampler gap_zero = [gap_spec](const RngStream&) {
    return MixedMatrix::zeros(gap_spec);
  };
  CHECK(rms_error(gap_zero, a3_estimator(100), 20, 1).rms == 0.0);

  const auto stats = rms_error(bernoulli, a2_estimator(1024), 500, 2024);
  CHECK(stats.rms == doctest::Approx(1.0 / 32.0).epsilon(0.15));
  CHECK(stats.mean_card == 1024.0);
  CHECK(stats.trials == 500);
}

TEST_CASE("standard error shrinks like trials^-1/2") {
  const ProblemSpec spec(32, 32, Extended(2.0), Extended(2.0));
  const InstanceSampler sampler = [spec](const RngStream& r) { return sample_mu2(spec, r); };
  const auto small = rms_error(sampler, a2_estimator(64), 400, 3);
  const auto large = rms_error(sampler, a2_estimator(64), 1600, 3);
  CHECK(small.standard_error / large.standard_error == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("summarize") {
  const std::vector<TrialOutcome> v{{3.0, 1.0}, {-4.0, 3.0}};
  const auto s = summarize(v);
  CHECK(s.rms == doctest::Approx(std::sqrt(12.5)));
  CHECK(s.mean_abs_error == 3.5);
  CHECK(s.mean_card == 2.0);
  CHECK_THROWS(summarize(std::vector<TrialOutcome>{{1.0, 1.0}}));
}

TEST_CASE("rate_fit") {
  std::vector<std::pair<double, double>> exact;
  for (int k = 4; k <= 10; ++k) exact.emplace_back(std::exp2(k), std::exp2(-k / 2.0));
  const auto fit = rate_fit(exact);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points.size() == exact.size());

  const std::vector<std::pair<double, double>> three(exact.begin(), exact.begin() + 3);
  CHECK_THROWS_AS(rate_fit(three), InsufficientPoints);
  auto bad = exact;
  bad[2].second = 0.0;
  CHECK_THROWS_AS(rate_fit(bad), NonpositiveError);

  RngStream rng(6, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<double, double>> noisy;
    for (int k = 4; k <= 12; ++k) {
      const double jitter = 1.0 + 0.1 * (rng.uniform01() - 0.5);
      noisy.emplace_back(std::exp2(k), std::pow(std::exp2(k), -0.25) * jitter);
    }
    CHECK(std::fabs(rate_fit(noisy).slope + 0.25) <= 0.05);
  }
}

TEST_CASE("run_plan is independent of the worker count") {
  TrialPlan plan{HardFamily{HardVariant::kActiveRowBernoulli,
                            ProblemSpec(16, 16, Extended(1.0), Extended::inf())},
                 EstimatorKind::kA3, {16, 32, 64}, 40, 99, {}};
  std::ostringstream one, three;
  const auto r1 = run_plan(plan, 1);
  const auto r3 = run_plan(plan, 3);
  write_table(one, r1, TableFormat::kCsv);
  write_table(three, r3, TableFormat::kCsv);
  CHECK(one.str() == three.str());
  for (const auto& row : r1) CHECK(row.stats.mean_card <= 6.0 * 5 * row.n);

  plan.budgets = {32, 16};
  CHECK_THROWS_AS(plan.validate(), InvalidParameters);
}

TEST_CASE("gap_experiment guards") {
  const std::vector<std::uint64_t> budgets{256};
  CHECK_THROWS_AS(gap_experiment(budgets, 0.1, 10, 1), RegimeViolation);
  CHECK_THROWS_AS(gap_experiment(budgets, 1.0, 10, 1), RegimeViolation);
  GapOptions off;
  off.guard_c0 = 0.0;
  const auto r = gap_experiment(budgets, 1.0, 10, 1, off);
  CHECK(r.rows.size() == 1);
  CHECK(r.rows[0].n1 == 16);
  CHECK_FALSE(r.ratio_fit.has_value());
  CHECK(gap_experiment(budgets, 5.0, 10, 1).rows[0].n1 == 80);
}

TEST_CASE("default regime setups respect the guard") {
  for (auto regime : {RateRegime::kPGeU, RateRegime::kPLtULe2, RateRegime::kTwoLePLtU,
                      RateRegime::kPLt2LtU, RateRegime::kPLt2LtUSmallN}) {
    CHECK(parse_regime(regime_name(regime)) == regime);
    const auto setup = default_regime_setup(regime);
    CHECK(setup.grid.size() >= 4);
    for (const auto& g : setup.grid) {
      CHECK(in_lower_bound_regime(g.n, ProblemSpec(g.n1, g.n2, setup.p, setup.u)));
    }
  }
}

TEST_CASE("rate_experiment regime checks") {
  SUBCASE("p >= u: error consistent with 4 n^-1/2") {
    const auto report = rate_experiment(default_regime_setup(RateRegime::kPGeU), 300, 5);
    for (const auto& row : report.rows) {
      const double predicted = 4.0 / std::sqrt(double(row.n));
      CHECK(row.stats.rms <= 2.0 * predicted);
      CHECK(row.stats.rms >= 0.5 * predicted);
    }
  }
  SUBCASE("p < 2 < u with n < N1: flat") {
    const auto report = rate_experiment(default_regime_setup(RateRegime::kPLt2LtUSmallN), 300, 5);
    CHECK(std::fabs(report.summaries.at(0).rms_fit.slope) <= 0.1);
    CHECK(std::fabs(report.summaries.at(0).predicted_slope) <= 1e-9);
  }
  SUBCASE("2 <= p < u: Monte Carlo rate") {
    const auto report = rate_experiment(default_regime_setup(RateRegime::kTwoLePLtU), 300, 5);
    CHECK(report.summaries.at(0).rms_fit.slope == doctest::Approx(-0.5).epsilon(0.14));
  }
}

TEST_CASE("write_table layout") {
  ResultRow row{"mu2", "A2", Extended(2.0), Extended::inf(), 4, 4, 16, {0.5, 0.1, 0.4, 16, 30}, 7};
  std::ostringstream csv, tsv;
  write_table(csv, std::span(&row, 1), TableFormat::kCsv);
  write_table(tsv, std::span(&row, 1), TableFormat::kTsv);
  CHECK(csv.str() ==
        "family,estimator,p,u,N1,N2,n,trials,rms,stderr,mean_card,seed,mae\n"
        "mu2,A2,2,inf,4,4,16,30,0.5,0.10000000000000001,16,7,0.40000000000000002\n");
  CHECK(tsv.str().find('\t') != std::string::npos);
}
