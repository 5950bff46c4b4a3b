#include <doctest.h>

#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

#include "ace/error.hpp"
#include "ace/rng.hpp"
#include "ace/stats.hpp"

using namespace ace;
using namespace ace::stats;

namespace {

Histogram2D from_rows(int bits, std::vector<std::uint64_t> counts) {
  Histogram2D h(bits);
  h.counts = std::move(counts);
  h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
  return h;
}

std::vector<CodePair> random_events(std::size_t n, int bits, Rng& rng) {
  std::vector<CodePair> ev(n);
  const std::uint64_t side = std::uint64_t{1} << bits;
  for (auto& e : ev) e = {static_cast<std::uint32_t>(rng.below(side)), static_cast<std::uint32_t>(rng.below(side))};
  return ev;
}

}  // namespace

TEST_CASE("accumulate") {
  Histogram2D h(1);
  CHECK(accumulate(h, {}) == h);
  const std::vector<CodePair> ev = {{0, 0}, {0, 0}, {1, 0}};
  const auto a = accumulate(h, ev);
  CHECK(a.at(0, 0) == 2);
  CHECK(a.at(1, 0) == 1);
  CHECK(a.total == 3);
  const std::vector<CodePair> rev(ev.rbegin(), ev.rend());
  CHECK(accumulate(h, rev) == a);

  const std::vector<CodePair> bad = {{0, 0}, {2, 0}};
  CHECK_THROWS_AS(accumulate(h, bad), InvalidArgument);
  CHECK_THROWS_AS(Histogram2D(-1), InvalidArgument);
  CHECK_THROWS_AS(Histogram2D(kMaxHistBits + 1), InvalidArgument);
}

TEST_CASE("concurrent partial histograms merge to the sequential result") {
  Rng rng(42);
  const auto ev = random_events(20000, 4, rng);
  const auto sequential = accumulate(Histogram2D(4), ev);

  constexpr int kParts = 4;
  std::vector<Histogram2D> parts(kParts, Histogram2D(4));
  std::vector<std::thread> threads;
  const std::size_t chunk = ev.size() / kParts;
  for (int i = 0; i < kParts; ++i) {
    threads.emplace_back([&, i] {
      const std::size_t lo = static_cast<std::size_t>(i) * chunk;
      const std::size_t hi = i + 1 == kParts ? ev.size() : lo + chunk;
      parts[static_cast<std::size_t>(i)] =
          accumulate(Histogram2D(4), std::span<const CodePair>(ev).subspan(lo, hi - lo));
    });
  }
  for (auto& t : threads) t.join();
  Histogram2D merged(4);
  for (const auto& p : parts) merged = merge(merged, p);
  CHECK(merged == sequential);
  CHECK_THROWS_AS(merge(Histogram2D(3), Histogram2D(4)), InvalidArgument);
}

TEST_CASE("rebin") {
  const auto h = from_rows(2, {1, 2, 0, 0, 3, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5});
  CHECK(rebin(h, 0) == h);
  const auto r = rebin(h, 1);
  CHECK(r.bits == 1);
  CHECK(r.counts == std::vector<std::uint64_t>{10, 0, 0, 5});
  CHECK(r.total == h.total);
  CHECK(rebin(h, 2).counts == std::vector<std::uint64_t>{15});
  CHECK_THROWS_AS(rebin(h, 3), InvalidArgument);

  Rng rng(6);
  const auto big = accumulate(Histogram2D(6), random_events(5000, 6, rng));
  for (int b = 0; b <= 6; ++b) CHECK(rebin(big, b).total == big.total);
}

TEST_CASE("regularize") {
  const auto r = regularize(from_rows(1, {0, 1, 2, 9}));
  CHECK(r.counts == std::vector<std::uint64_t>{3, 3, 3, 9});
  CHECK(r.total == 18);
  CHECK(r.floor == 3);

  const auto flat = from_rows(1, {4, 4, 4, 4});
  CHECK(regularize(flat).counts == flat.counts);
  const auto ones = from_rows(1, {1, 1, 1, 1});
  CHECK(regularize(ones).counts == ones.counts);

  CHECK_THROWS_AS(regularize(Histogram2D(2)), InvalidArgument);
  CHECK_THROWS_AS(regularize(Histogram1D(2)), InvalidArgument);

  Histogram1D leaf(1);
  leaf.add(0), leaf.add(0), leaf.add(0), leaf.add(1);
  const auto rl = regularize(leaf);
  CHECK(rl.counts == std::vector<std::uint64_t>{3, 2});
  CHECK(rl.total == 5);
}

TEST_CASE("regularize is idempotent") {
  const auto once = regularize(from_rows(1, {0, 1, 2, 9}));
  CHECK(regularize(once) == once);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = accumulate(Histogram2D(3), random_events(1 + rng.below(300), 3, rng));
    const auto r = regularize(h);
    CHECK(regularize(r) == r);
    std::uint64_t rows = 0, cols = 0;
    for (std::uint32_t a = 0; a < 8; ++a)
      for (std::uint32_t b = 0; b < 8; ++b) {
        rows += r.at(a, b);
        cols += r.at(b, a);
        CHECK(r.at(a, b) >= std::max<std::uint64_t>(h.at(a, b), 1));
      }
    CHECK(rows == r.total);
    CHECK(cols == r.total);
  }
}

TEST_CASE("log_table") {
  const LogTable t(10);
  CHECK(t(1) == 0.0);
  CHECK(t(2) == doctest::Approx(std::log(2.0)));
  for (std::uint64_t k = 2; k <= 10; ++k) CHECK(t(k) > t(k - 1));
  CHECK_THROWS_AS(t(0), InvalidArgument);
  CHECK_THROWS_AS(t(11), InvalidArgument);
  CHECK_THROWS_AS(LogTable(0), InvalidArgument);
}

TEST_CASE("pair_log_source") {
  const auto h = from_rows(1, {2, 1, 1, 2});
  CHECK(pair_log_source(h, 0, 0) == doctest::Approx(std::log(4.0 / 3.0)));
  CHECK(pair_log_source(h, 0, 1) == doctest::Approx(pair_log_source(h, 1, 0)));

  // rows (1, 2), columns (1, 3): h = r c exactly
  const auto indep = from_rows(1, {1, 3, 2, 6});
  for (std::uint32_t a = 0; a < 2; ++a)
    for (std::uint32_t b = 0; b < 2; ++b) CHECK(std::abs(pair_log_source(indep, a, b)) < 1e-12);

  Rng rng(19);
  const auto reg = regularize(accumulate(Histogram2D(3), random_events(400, 3, rng)));
  const PairSourceTable table(reg);
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) CHECK(table(a, b) == doctest::Approx(pair_log_source(reg, a, b)));
}

TEST_CASE("pair sources average to a non-negative mutual information") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint64_t> c(16);
    for (auto& v : c) v = 1 + rng.below(20);
    const auto h = from_rows(2, c);
    double mi = 0.0;
    for (std::uint32_t a = 0; a < 4; ++a)
      for (std::uint32_t b = 0; b < 4; ++b)
        mi += static_cast<double>(h.at(a, b)) / static_cast<double>(h.total) * pair_log_source(h, a, b);
    CHECK(mi >= -1e-12);
  }
}

TEST_CASE("leaf_log_prob") {
  Histogram1D u(3);
  for (std::uint32_t v = 0; v < 8; ++v) u.add(v);
  for (std::uint32_t v = 0; v < 8; ++v) CHECK(leaf_log_prob(u, v) == doctest::Approx(-3 * std::log(2.0)));

  Histogram1D h(1);
  h.add(0), h.add(0), h.add(0), h.add(1);
  const auto r = regularize(h);
  CHECK(leaf_log_prob(r, 0) == doctest::Approx(std::log(3.0 / 5.0)));
  CHECK(leaf_log_prob(r, 1) <= 0.0);
  const LeafLogTable t(r);
  CHECK(t(0) == doctest::Approx(std::log(3.0 / 5.0)));
  CHECK(t(1) == doctest::Approx(std::log(2.0 / 5.0)));
}
