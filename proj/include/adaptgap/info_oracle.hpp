#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "adaptgap/mixed_norm.hpp"

namespace adaptgap {

/// 0-based entry position (row i, column j).
struct EntryIndex {
  std::size_t i;
  std::size_t j;
  friend bool operator==(const EntryIndex&, const EntryIndex&) = default;
};

enum class TapeMode { kAdaptive, kNonadaptive };

/// Counted access to the entries of a matrix by point evaluation.
///
/// Every answered query costs one unit of card, repeats included. A query
/// that fails (budget, discipline or range) is not answered and not charged.
/// In non-adaptive mode the whole query sequence is declared up front and
/// must be replayed in order.
///
/// Single-owner: the tape holds a pointer to a matrix that must outlive it.
class QueryTape {
 public:
  static QueryTape open_adaptive(const MixedMatrix& f,
                                 std::optional<std::uint64_t> budget = std::nullopt);
  /// Throws IndexOutOfRange if any declared pair is outside the matrix.
  static QueryTape open_nonadaptive(const MixedMatrix& f, std::vector<EntryIndex> queries);

  double query(std::size_t i, std::size_t j);
  double query(EntryIndex idx) { return query(idx.i, idx.j); }

  std::uint64_t card() const { return issued_; }
  TapeMode mode() const { return mode_; }
  std::optional<std::uint64_t> budget() const { return budget_; }
  /// Budget minus card, or nullopt if unbounded.
  std::optional<std::uint64_t> remaining() const;
  const ProblemSpec& spec() const { return target_->spec(); }

 private:
  QueryTape(const MixedMatrix& f, TapeMode mode, std::optional<std::uint64_t> budget,
            std::vector<EntryIndex> declared);

  const MixedMatrix* target_;
  TapeMode mode_;
  std::optional<std::uint64_t> budget_;
  std::uint64_t issued_ = 0;
  std::vector<EntryIndex> declared_;
  std::size_t cursor_ = 0;
};

}  // namespace adaptgap
