#include "ace/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ace/error.hpp"

namespace ace::stats {

namespace {

void check_bits(int bits) {
  if (bits < 0 || bits > kMaxHistBits) {
    throw InvalidArgument("histogram bit width " + std::to_string(bits) + " outside [0, " +
                          std::to_string(kMaxHistBits) + "]");
  }
}

std::uint64_t sum(std::span<const std::uint64_t> counts) {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

}  // namespace

LogTable::LogTable(std::uint64_t max_n) : values_(max_n + 1, 0.0) {
  if (max_n < 1) throw InvalidArgument("log table needs max_n >= 1");
  for (std::uint64_t k = 2; k <= max_n; ++k) values_[k] = std::log(static_cast<double>(k));
}

double LogTable::operator()(std::uint64_t k) const {
  if (k < 1 || k >= values_.size()) {
    throw InvalidArgument("log table lookup " + std::to_string(k) + " outside [1, " +
                          std::to_string(max_n()) + "]");
  }
  return values_[k];
}

Histogram1D::Histogram1D(int b) : bits(b) {
  check_bits(b);
  counts.assign(std::size_t{1} << b, 0);
}

void Histogram1D::add(std::uint32_t v) {
  if (v >= bins()) throw InvalidArgument("code " + std::to_string(v) + " out of histogram range");
  ++counts[v];
  ++total;
}

Histogram2D::Histogram2D(int b) : bits(b) {
  check_bits(b);
  counts.assign(std::size_t{1} << (2 * b), 0);
}

void Histogram2D::add(std::uint32_t a, std::uint32_t b) {
  if (a >= side() || b >= side()) {
    throw InvalidArgument("code pair (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") out of histogram range");
  }
  ++counts[a * side() + b];
  ++total;
}

Histogram2D accumulate(Histogram2D hist, std::span<const CodePair> events) {
  for (const auto& e : events) {
    if (e.a >= hist.side() || e.b >= hist.side()) {
      throw InvalidArgument("code pair (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                            ") out of histogram range");
    }
  }
  for (const auto& e : events) hist.add(e.a, e.b);
  return hist;
}

Histogram2D merge(const Histogram2D& lhs, const Histogram2D& rhs) {
  if (lhs.bits != rhs.bits) throw InvalidArgument("cannot merge histograms of different widths");
  Histogram2D out(lhs.bits);
  for (std::size_t i = 0; i < out.bins(); ++i) out.counts[i] = lhs.counts[i] + rhs.counts[i];
  out.total = lhs.total + rhs.total;
  return out;
}

Histogram2D rebin(const Histogram2D& hist, int b) {
  if (b < 0 || b > hist.bits) {
    throw InvalidArgument("cannot truncate " + std::to_string(b) + " bits from a " +
                          std::to_string(hist.bits) + "-bit histogram");
  }
  Histogram2D out(hist.bits - b);
  const std::size_t side = hist.side();
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t c = 0; c < side; ++c) {
      out.counts[(a >> b) * out.side() + (c >> b)] += hist.counts[a * side + c];
    }
  }
  out.total = hist.total;
  return out;
}

std::uint64_t mean_count_ceiling(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = sum(counts);
  if (counts.empty() || total == 0) {
    throw InvalidArgument("cannot regularize an empty histogram");
  }
  const std::uint64_t n = counts.size();
  return (total + n - 1) / n;
}

std::vector<std::uint64_t> apply_floor(std::span<const std::uint64_t> counts, std::uint64_t floor) {
  std::vector<std::uint64_t> out(counts.begin(), counts.end());
  for (auto& c : out) c = std::max(c, floor);
  return out;
}

namespace {

template <typename Hist>
Hist regularize_impl(const Hist& hist) {
  const std::uint64_t floor = hist.floor != 0 ? hist.floor : mean_count_ceiling(hist.counts);
  Hist out = hist;
  out.counts = apply_floor(hist.counts, floor);
  out.total = sum(out.counts);
  out.floor = floor;
  return out;
}

}  // namespace

Histogram2D regularize(const Histogram2D& hist) { return regularize_impl(hist); }
Histogram1D regularize(const Histogram1D& hist) { return regularize_impl(hist); }

double pair_log_source(const Histogram2D& h, std::uint32_t a, std::uint32_t b) {
  const std::size_t side = h.side();
  if (a >= side || b >= side) throw InvalidArgument("code pair out of histogram range");
  std::uint64_t row = 0;
  std::uint64_t col = 0;
  for (std::size_t k = 0; k < side; ++k) {
    row += h.counts[a * side + k];
    col += h.counts[k * side + b];
  }
  const std::uint64_t joint = h.at(a, b);
  if (joint == 0) throw DomainError("pair_log_source needs a regularized histogram");
  return std::log(static_cast<double>(joint)) + std::log(static_cast<double>(h.total)) -
         std::log(static_cast<double>(row)) - std::log(static_cast<double>(col));
}

double leaf_log_prob(const Histogram1D& h, std::uint32_t v) {
  if (v >= h.bins()) throw InvalidArgument("code out of histogram range");
  if (h.counts[v] == 0) throw DomainError("leaf_log_prob needs a regularized histogram");
  return std::log(static_cast<double>(h.counts[v])) - std::log(static_cast<double>(h.total));
}

PairSourceTable::PairSourceTable(const Histogram2D& h) : bits_(h.bits), values_(h.bins()) {
  const std::size_t side = h.side();
  std::vector<std::uint64_t> rows(side, 0), cols(side, 0);
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      const std::uint64_t c = h.counts[a * side + b];
      if (c == 0) throw DomainError("pair source table needs a regularized histogram");
      rows[a] += c;
      cols[b] += c;
    }
  }
  const LogTable logs(h.total);
  const double log_total = logs(h.total);
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      values_[a * side + b] = logs(h.counts[a * side + b]) + log_total - logs(rows[a]) - logs(cols[b]);
    }
  }
}

LeafLogTable::LeafLogTable(const Histogram1D& h) : bits_(h.bits), values_(h.bins()) {
  const LogTable logs(h.total);
  for (std::size_t v = 0; v < h.bins(); ++v) {
    if (h.counts[v] == 0) throw DomainError("leaf log table needs a regularized histogram");
    values_[v] = logs(h.counts[v]) - logs(h.total);
  }
}

}  // namespace ace::stats
