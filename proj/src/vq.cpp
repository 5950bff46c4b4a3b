#include "ace/vq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ace/error.hpp"
#include "ace/rng.hpp"

namespace ace::vq {

void NeighborhoodKernel::validate() const {
  if (!(eps1 >= 0.0 && eps0 > eps1 && eps0 < 1.0)) {
    throw InvalidArgument("neighbourhood kernel needs 0 <= eps1 < eps0 < 1");
  }
}

double NeighborhoodKernel::weight(std::ptrdiff_t d) const {
  if (d == 0) return eps0;
  if (d == 1 || d == -1) return eps1;
  return 0.0;
}

void TrainSchedule::validate() const {
  if (target_bits < 1 || target_bits > 16) throw InvalidArgument("target_bits must be in [1, 16]");
  if (updates_per_size_factor < 0) throw InvalidArgument("updates_per_size_factor must be >= 0");
}

std::size_t encode_nn(const Codebook& cb, Vec2 x) {
  if (cb.vectors.empty()) throw InvalidArgument("cannot encode with an empty codebook");
  std::size_t best = 0;
  double best_d = squared_distance(cb.vectors[0], x);
  for (std::size_t i = 1; i < cb.vectors.size(); ++i) {
    const double d = squared_distance(cb.vectors[i], x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double distortion(const Codebook& cb, std::span<const Vec2> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const Vec2& v : data) total += squared_distance(v, cb.vectors[encode_nn(cb, v)]);
  return total / static_cast<double>(data.size());
}

LbgResult lbg_train(std::span<const Vec2> data, Codebook cb0, int iters) {
  if (data.empty()) throw InvalidArgument("lbg_train needs data");
  if (cb0.vectors.empty()) throw InvalidArgument("lbg_train needs a nonempty initial codebook");
  LbgResult result{std::move(cb0), {}};
  auto& cb = result.codebook;
  const std::size_t n = cb.size();
  for (int it = 0; it < iters; ++it) {
    std::vector<Vec2> sums(n);
    std::vector<std::size_t> hits(n, 0);
    for (const Vec2& v : data) {
      const std::size_t y = encode_nn(cb, v);
      sums[y].x += v.x;
      sums[y].y += v.y;
      ++hits[y];
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (hits[y] == 0) continue;
      const double h = static_cast<double>(hits[y]);
      cb.vectors[y] = {sums[y].x / h, sums[y].y / h};
    }
    result.trace.push_back(distortion(cb, data));
  }
  return result;
}

std::size_t topo_update(Codebook& cb, Vec2 x, const NeighborhoodKernel& k) {
  const std::size_t winner = encode_nn(cb, x);
  const std::size_t lo = winner == 0 ? 0 : winner - 1;
  const std::size_t hi = std::min(winner + 1, cb.size() - 1);
  for (std::size_t i = lo; i <= hi; ++i) {
    const double w = k.weight(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(winner));
    Vec2& v = cb.vectors[i];
    v.x += w * (x.x - v.x);
    v.y += w * (x.y - v.y);
  }
  return winner;
}

Codebook interpolate_double(const Codebook& cb) {
  const std::size_t n = cb.size();
  Codebook out;
  out.vectors.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out.vectors[2 * i] = cb.vectors[i];
    if (i + 1 < n) {
      out.vectors[2 * i + 1] = {0.5 * (cb.vectors[i].x + cb.vectors[i + 1].x),
                                0.5 * (cb.vectors[i].y + cb.vectors[i + 1].y)};
    } else {
      out.vectors[2 * i + 1] = cb.vectors[i];
    }
  }
  return out;
}

Codebook train_topographic(std::span<const Vec2> data, const TrainSchedule& sched, const NeighborhoodKernel& k) {
  sched.validate();
  k.validate();
  if (data.size() < 2) throw InvalidArgument("topographic training needs at least 2 vectors");

  Rng rng(sched.seed);
  const std::uint64_t first = rng.below(data.size());
  std::uint64_t second = rng.below(data.size() - 1);
  if (second >= first) ++second;
  Codebook cb{{data[first], data[second]}};

  const std::size_t target = std::size_t{1} << sched.target_bits;
  while (true) {
    const std::size_t updates = static_cast<std::size_t>(sched.updates_per_size_factor) * cb.size();
    for (std::size_t u = 0; u < updates; ++u) topo_update(cb, data[rng.below(data.size())], k);
    if (cb.size() >= target) break;
    cb = interpolate_double(cb);
  }
  return cb;
}

Lut::Lut(const Codebook& cb, int child_bits) : child_bits_(child_bits) {
  if (child_bits < 1 || child_bits > 10) throw InvalidArgument("LUT child bits must be in [1, 10]");
  if (cb.vectors.empty()) throw InvalidArgument("cannot build a LUT from an empty codebook");
  if (cb.size() > std::numeric_limits<std::uint16_t>::max() + std::size_t{1}) {
    throw InvalidArgument("codebook too large for 16-bit codes");
  }
  const std::size_t side = std::size_t{1} << child_bits;
  table_.resize(side * side);
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      table_[a * side + b] =
          static_cast<std::uint16_t>(encode_nn(cb, {static_cast<double>(a), static_cast<double>(b)}));
    }
  }
}

}  // namespace ace::vq
