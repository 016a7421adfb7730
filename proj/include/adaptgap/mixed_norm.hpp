#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "adaptgap/extended.hpp"

namespace adaptgap {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// |x|^e with |x| = 0 mapped to 0. std::pow rather than exp(e ln|x|), which
/// is an ulp off even at e = 1 and breaks integer-exact quantities downstream.
double abs_pow(double x, double e);

/// Dense N1 x N2 real matrix viewed as an element of L_p^{N1}(L_u^{N2}).
/// Row-major; indices are 0-based.
class MixedMatrix {
 public:
  /// Throws InvalidParameters on shape mismatch or a non-finite entry.
  MixedMatrix(ProblemSpec spec, std::vector<double> entries);

  static MixedMatrix zeros(const ProblemSpec& spec);
  static MixedMatrix constant(const ProblemSpec& spec, double c);
  static MixedMatrix from_rows(const ProblemSpec& spec,
                               std::initializer_list<std::initializer_list<double>> rows);

  const ProblemSpec& spec() const { return spec_; }
  std::size_t rows() const { return spec_.n1; }
  std::size_t cols() const { return spec_.n2; }

  double operator()(std::size_t i, std::size_t j) const { return entries_[i * spec_.n2 + j]; }
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * spec_.n2, spec_.n2};
  }
  std::span<const double> entries() const { return entries_; }

 private:
  ProblemSpec spec_;
  std::vector<double> entries_;
};

/// ((1/N) sum |x_j|^u)^{1/u}, or max |x_j| for u = INF. Row must be nonempty.
double row_norm(std::span<const double> row, const Extended& u);

/// L_p average over rows of the L_u row norms.
double mixed_norm(const MixedMatrix& f);

/// Arithmetic mean of all entries (the functional I^{N1,N2}).
double scalar_mean(const MixedMatrix& f);

/// Per-row means (the operator S^{N1,N2}).
std::vector<double> row_means(const MixedMatrix& f);

}  // namespace adaptgap
