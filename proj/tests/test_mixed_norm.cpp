#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "adaptgap/error.hpp"
#include "adaptgap/mixed_norm.hpp"
#include "adaptgap/rng.hpp"
#include "oracles.hpp"

using namespace adaptgap;

namespace {

const std::vector<Extended> kExponents{Extended(1.0), Extended(1.5), Extended(2.0),
                                       Extended(4.0), Extended::inf()};

double as_number(const Extended& e) {
  return e.is_inf() ? std::numeric_limits<double>::infinity() : e.value();
}

MixedMatrix random_matrix(const ProblemSpec& spec, RngStream& rng) {
  std::vector<double> a(spec.entries());
  for (double& x : a) x = 4.0 * rng.uniform01() - 2.0;
  return MixedMatrix(spec, std::move(a));
}

}  // namespace

TEST_CASE("Extended parsing and ordering") {
  CHECK(Extended::parse("inf").is_inf());
  CHECK(Extended::parse("INF").is_inf());
  CHECK(Extended::parse("infinity").is_inf());
  CHECK(Extended::parse("1.5").value() == 1.5);
  CHECK(Extended(1.0) < Extended(2.0));
  CHECK(Extended(4.0) < Extended::inf());
  CHECK_FALSE(Extended::inf() < Extended::inf());
  CHECK(Extended::inf().reciprocal() == 0.0);
  CHECK(Extended(4.0).capped_at_two() == Extended(2.0));
  CHECK(Extended::inf().capped_at_two() == Extended(2.0));
  CHECK(Extended(1.5).capped_at_two() == Extended(1.5));
  CHECK_THROWS_AS(Extended(0.5), InvalidExponent);
  CHECK_THROWS_AS(Extended(std::nan("")), InvalidExponent);
  CHECK_THROWS_AS(Extended::parse("abc"), InvalidExponent);
  CHECK_THROWS_AS(ProblemSpec(0, 3, Extended(1.0), Extended(1.0)), InvalidParameters);
}

TEST_CASE("row_norm examples") {
  const std::vector<double> constant{-2.5, -2.5, -2.5};
  for (const auto& u : kExponents) CHECK(row_norm(constant, u) == doctest::Approx(2.5));
  CHECK(row_norm(std::vector<double>{2, 0, 0, 0}, Extended(2.0)) == doctest::Approx(1.0));
  CHECK(row_norm(std::vector<double>{1, -3}, Extended::inf()) == 3.0);
  CHECK_THROWS_AS(row_norm(std::vector<double>{}, Extended(2.0)), EmptyInput);
}

TEST_CASE("mixed_norm examples") {
  for (const auto& p : kExponents) {
    for (const auto& u : kExponents) {
      const ProblemSpec spec(3, 5, p, u);
      CHECK(mixed_norm(MixedMatrix::constant(spec, -0.75)) == doctest::Approx(0.75));

      auto spike = MixedMatrix::zeros(spec);
      spike.set(1, 3, std::pow(3.0, p.reciprocal()) * std::pow(5.0, u.reciprocal()));
      CHECK(mixed_norm(spike) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  const ProblemSpec spec(2, 2, Extended(1.0), Extended::inf());
  CHECK(mixed_norm(MixedMatrix::from_rows(spec, {{1, 2}, {3, 4}})) == doctest::Approx(3.0));
}

TEST_CASE("scalar_mean and row_means examples") {
  const ProblemSpec spec(2, 2, Extended(1.0), Extended::inf());
  CHECK(scalar_mean(MixedMatrix::constant(spec, 1.25)) == 1.25);
  CHECK(scalar_mean(MixedMatrix::constant(spec, 1.0)) == 1.0);
  auto spike = MixedMatrix::zeros(spec);
  spike.set(0, 0, 2.0);
  CHECK(scalar_mean(spike) == 0.5);
  CHECK(row_means(MixedMatrix::constant(spec, 7.0)) == std::vector<double>{7.0, 7.0});
  CHECK(row_means(MixedMatrix::from_rows(spec, {{1, 3}, {0, 0}})) == std::vector<double>{2.0, 0.0});
}

TEST_CASE("construction validates shape and finiteness") {
  const ProblemSpec spec(2, 2, Extended(1.0), Extended(1.0));
  CHECK_THROWS_AS(MixedMatrix(spec, {1, 2, 3}), InvalidParameters);
  CHECK_THROWS_AS(MixedMatrix(spec, {1, 2, 3, std::numeric_limits<double>::infinity()}),
                  InvalidParameters);
  CHECK_THROWS_AS(MixedMatrix::from_rows(spec, {{1, 2}, {3}}), InvalidParameters);
}

TEST_CASE("norm properties on random matrices") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Extended p = kExponents[rng.uniform_index(kExponents.size())];
    const Extended u = kExponents[rng.uniform_index(kExponents.size())];
    const ProblemSpec spec(1 + rng.uniform_index(6), 1 + rng.uniform_index(6), p, u);
    const MixedMatrix f = random_matrix(spec, rng);
    const MixedMatrix g = random_matrix(spec, rng);
    const double nf = mixed_norm(f), ng = mixed_norm(g);
    CAPTURE(trial);

    CHECK(nf > 0.0);
    CHECK(mixed_norm(MixedMatrix::zeros(spec)) == 0.0);

    const double c = -3.7 * rng.uniform01() + 0.3;
    std::vector<double> scaled(f.entries().begin(), f.entries().end());
    std::vector<double> sum(scaled.size());
    for (std::size_t k = 0; k < scaled.size(); ++k) {
      sum[k] = scaled[k] + g.entries()[k];
      scaled[k] *= c;
    }
    CHECK(mixed_norm(MixedMatrix(spec, scaled)) ==
          doctest::Approx(std::fabs(c) * nf).epsilon(1e-12));
    CHECK(mixed_norm(MixedMatrix(spec, sum)) <= nf + ng + 1e-12);
    CHECK(std::fabs(scalar_mean(f)) <= nf + 1e-15);

    const auto means = row_means(f);
    double avg = 0.0;
    for (double m : means) avg += m;
    avg /= static_cast<double>(means.size());
    CHECK(avg == doctest::Approx(scalar_mean(f)).epsilon(1e-14));

    const long double ref =
        oracle::nested_norm({f.entries().begin(), f.entries().end()}, spec.n1, spec.n2,
                            as_number(p), as_number(u));
    CHECK(nf == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  }
}

TEST_CASE("extreme magnitudes do not overflow or underflow") {
  const ProblemSpec spec(2, 3, Extended(4.0), Extended(1.5));
  CHECK(mixed_norm(MixedMatrix::constant(spec, 1e300)) == doctest::Approx(1e300));
  CHECK(mixed_norm(MixedMatrix::constant(spec, 1e-300)) == doctest::Approx(1e-300));
}

TEST_CASE("compensated summation recovers cancelled terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  CHECK(abs_pow(0.0, 1.5) == 0.0);
  CHECK(abs_pow(-4.0, 0.5) == doctest::Approx(2.0));
  for (double x : {3.0, 5.0, 7.0, 0.1}) CHECK(abs_pow(x, 1.0) == x);
}
