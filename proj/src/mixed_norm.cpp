#include "adaptgap/mixed_norm.hpp"

#include <algorithm>
#include <cmath>

#include "adaptgap/error.hpp"

namespace adaptgap {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double abs_pow(double x, double e) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  return std::pow(a, e);
}

MixedMatrix::MixedMatrix(ProblemSpec spec, std::vector<double> entries)
    : spec_(spec), entries_(std::move(entries)) {
  if (entries_.size() != spec_.entries()) {
    throw InvalidParameters("matrix entry count does not match n1 * n2");
  }
  for (double x : entries_) {
    if (!std::isfinite(x)) throw InvalidParameters("matrix entries must be finite");
  }
}

MixedMatrix MixedMatrix::zeros(const ProblemSpec& spec) { return constant(spec, 0.0); }

MixedMatrix MixedMatrix::constant(const ProblemSpec& spec, double c) {
  return MixedMatrix(spec, std::vector<double>(spec.entries(), c));
}

MixedMatrix MixedMatrix::from_rows(const ProblemSpec& spec,
                                   std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> entries;
  entries.reserve(spec.entries());
  if (rows.size() != spec.n1) throw InvalidParameters("row count does not match n1");
  for (const auto& r : rows) {
    if (r.size() != spec.n2) throw InvalidParameters("row length does not match n2");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return MixedMatrix(spec, std::move(entries));
}

void MixedMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= spec_.n1 || j >= spec_.n2) throw IndexOutOfRange("matrix index out of range");
  if (!std::isfinite(value)) throw InvalidParameters("matrix entries must be finite");
  entries_[i * spec_.n2 + j] = value;
}

namespace {

// Averaged L_e norm of |values|, scaled by the max to avoid overflow in |x|^e.
double averaged_norm(std::span<const double> values, const Extended& e) {
  double scale = 0.0;
  for (double x : values) scale = std::max(scale, std::abs(x));
  if (e.is_inf() || scale == 0.0) return scale;
  const double exponent = e.value();
  CompensatedSum sum;
  for (double x : values) sum.add(abs_pow(x / scale, exponent));
  const double mean = sum.value() / static_cast<double>(values.size());
  return scale * std::pow(mean, 1.0 / exponent);
}

}  // namespace

double row_norm(std::span<const double> row, const Extended& u) {
  if (row.empty()) throw EmptyInput("row_norm of an empty row");
  return averaged_norm(row, u);
}

double mixed_norm(const MixedMatrix& f) {
  std::vector<double> norms(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) norms[i] = row_norm(f.row(i), f.spec().u);
  return averaged_norm(norms, f.spec().p);
}

double scalar_mean(const MixedMatrix& f) {
  CompensatedSum sum;
  for (double x : f.entries()) sum.add(x);
  return sum.value() / static_cast<double>(f.spec().entries());
}

std::vector<double> row_means(const MixedMatrix& f) {
  std::vector<double> means(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    CompensatedSum sum;
    for (double x : f.row(i)) sum.add(x);
    means[i] = sum.value() / static_cast<double>(f.cols());
  }
  return means;
}

}  // namespace adaptgap
