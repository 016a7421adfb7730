#include "adaptgap/info_oracle.hpp"

#include <string>

#include "adaptgap/error.hpp"

namespace adaptgap {

QueryTape::QueryTape(const MixedMatrix& f, TapeMode mode, std::optional<std::uint64_t> budget,
                     std::vector<EntryIndex> declared)
    : target_(&f), mode_(mode), budget_(budget), declared_(std::move(declared)) {}

QueryTape QueryTape::open_adaptive(const MixedMatrix& f, std::optional<std::uint64_t> budget) {
  return QueryTape(f, TapeMode::kAdaptive, budget, {});
}

QueryTape QueryTape::open_nonadaptive(const MixedMatrix& f, std::vector<EntryIndex> queries) {
  for (const auto& q : queries) {
    if (q.i >= f.rows() || q.j >= f.cols()) {
      throw IndexOutOfRange("declared query (" + std::to_string(q.i) + ", " +
                            std::to_string(q.j) + ") outside matrix");
    }
  }
  const auto budget = static_cast<std::uint64_t>(queries.size());
  return QueryTape(f, TapeMode::kNonadaptive, budget, std::move(queries));
}

std::optional<std::uint64_t> QueryTape::remaining() const {
  if (!budget_) return std::nullopt;
  return *budget_ - issued_;
}

double QueryTape::query(std::size_t i, std::size_t j) {
  if (i >= target_->rows() || j >= target_->cols()) {
    throw IndexOutOfRange("query (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside matrix");
  }
  if (budget_ && issued_ >= *budget_) {
    throw BudgetExceeded("query budget of " + std::to_string(*budget_) + " exhausted");
  }
  if (mode_ == TapeMode::kNonadaptive) {
    const EntryIndex& expected = declared_[cursor_];
    if (expected.i != i || expected.j != j) {
      throw DisciplineViolation("non-adaptive query " + std::to_string(cursor_) +
                                " does not match the declared sequence");
    }
    ++cursor_;
  }
  ++issued_;
  return (*target_)(i, j);
}

}  // namespace adaptgap
