#pragma once

// Count histograms over truncated codes, the mean-count floor used before
// taking logarithms, and log-probability lookups built on an integer log table.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ace::stats {

inline constexpr int kMaxHistBits = 12;

/// Natural logarithms of the integers 1..max_n.
class LogTable {
 public:
  explicit LogTable(std::uint64_t max_n);

  std::uint64_t max_n() const noexcept { return values_.size() - 1; }
  /// log k for 1 <= k <= max_n. Throws InvalidArgument outside that range.
  double operator()(std::uint64_t k) const;

 private:
  std::vector<double> values_;  // values_[0] unused
};

inline LogTable log_table(std::uint64_t max_n) { return LogTable(max_n); }

/// Counts over 2^bits single codes.
///
/// `floor` is zero for raw counts and holds the lower bound that was applied
/// when the histogram came out of regularize().
struct Histogram1D {
  int bits = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t floor = 0;

  explicit Histogram1D(int bits);
  std::size_t bins() const noexcept { return counts.size(); }
  void add(std::uint32_t v);
  bool operator==(const Histogram1D&) const = default;
};

/// Counts over 2^bits x 2^bits code pairs, row = first code.
struct Histogram2D {
  int bits = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t floor = 0;

  explicit Histogram2D(int bits);
  std::size_t side() const noexcept { return std::size_t{1} << bits; }
  std::size_t bins() const noexcept { return counts.size(); }
  std::uint64_t at(std::uint32_t a, std::uint32_t b) const { return counts[a * side() + b]; }
  void add(std::uint32_t a, std::uint32_t b);
  bool operator==(const Histogram2D&) const = default;
};

struct CodePair {
  std::uint32_t a;
  std::uint32_t b;
};

/// Adds one count per event. Throws InvalidArgument on out-of-range codes
/// (the histogram is left untouched in that case).
Histogram2D accumulate(Histogram2D hist, std::span<const CodePair> events);

/// Bin-wise sum of two raw histograms of equal width.
Histogram2D merge(const Histogram2D& lhs, const Histogram2D& rhs);

/// Drops `b` low-order bits of both codes: each output bin is the sum of a
/// 2^b x 2^b block.
Histogram2D rebin(const Histogram2D& hist, int b);

/// Ceiling of the mean bin count. Throws InvalidArgument if all bins are empty.
std::uint64_t mean_count_ceiling(std::span<const std::uint64_t> counts);

/// Raises every bin below `floor` to `floor`.
std::vector<std::uint64_t> apply_floor(std::span<const std::uint64_t> counts, std::uint64_t floor);

/// Raises every bin to at least the ceiling of the mean count of the raw
/// histogram. A histogram that is already regularized keeps its recorded
/// floor, so the operation is idempotent.
Histogram2D regularize(const Histogram2D& hist);
Histogram1D regularize(const Histogram1D& hist);

/// log(P12 / (P1 P2)) at (a, b) with the joint and both marginals taken from
/// the same regularized table.
double pair_log_source(const Histogram2D& regularized, std::uint32_t a, std::uint32_t b);

/// log P(v) from a regularized 1-D histogram.
double leaf_log_prob(const Histogram1D& regularized, std::uint32_t v);

/// Dense table of pair_log_source over all bins, computed once per histogram
/// through a shared LogTable.
class PairSourceTable {
 public:
  explicit PairSourceTable(const Histogram2D& regularized);
  int bits() const noexcept { return bits_; }
  double operator()(std::uint32_t a, std::uint32_t b) const { return values_[(std::size_t{a} << bits_) + b]; }

 private:
  int bits_;
  std::vector<double> values_;
};

/// Dense table of leaf_log_prob over all bins.
class LeafLogTable {
 public:
  explicit LeafLogTable(const Histogram1D& regularized);
  int bits() const noexcept { return bits_; }
  double operator()(std::uint32_t v) const { return values_[v]; }

 private:
  int bits_;
  std::vector<double> values_;
};

}  // namespace ace::stats
