#pragma once

// Vector quantisation of 2-D vectors: nearest-neighbour encoding, LBG
// (k-means) training, and topographic training with a fixed 1-D neighbourhood
// kernel on a codebook that grows by interpolated doubling.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ace::vq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Ordered decoding vectors; the index of a vector is its code.
struct Codebook {
  std::vector<Vec2> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
  bool operator==(const Codebook&) const = default;
};

/// Update weights of the topographic kernel: eps0 for the winning code,
/// eps1 for codes at index distance 1, zero beyond.
struct NeighborhoodKernel {
  double eps0 = 0.1;
  double eps1 = 0.05;

  /// Throws InvalidArgument unless 0 <= eps1 < eps0 < 1.
  void validate() const;
  double weight(std::ptrdiff_t index_distance) const;
};

struct TrainSchedule {
  int target_bits = 8;
  int updates_per_size_factor = 20;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Index of the nearest code vector; ties go to the lowest index.
std::size_t encode_nn(const Codebook& cb, Vec2 x);

/// Mean squared distortion of `data` under nearest-neighbour encoding.
double distortion(const Codebook& cb, std::span<const Vec2> data);

struct LbgResult {
  Codebook codebook;
  std::vector<double> trace;  // distortion after each iteration
};

/// Alternates nearest-neighbour assignment and centroid replacement for
/// `iters` iterations. Cells that receive no data keep their vector.
LbgResult lbg_train(std::span<const Vec2> data, Codebook cb0, int iters);

/// One steepest-descent step of the noisy quantiser: every code vector moves
/// toward `x` by the kernel weight of its index distance from the winner.
/// Returns the winning index.
std::size_t topo_update(Codebook& cb, Vec2 x, const NeighborhoodKernel& k);

/// Doubles the codebook: new[2i] = old[i], new[2i+1] = midpoint(old[i], old[i+1]),
/// and the last vector is duplicated.
Codebook interpolate_double(const Codebook& cb);

/// Grows a codebook from a random pair of training vectors to
/// 2^target_bits entries, running factor*N random updates at each size N
/// (including the final one).
Codebook train_topographic(std::span<const Vec2> data, const TrainSchedule& sched,
                           const NeighborhoodKernel& k = {});

/// Inter-layer lookup table: entry (a, b) is the code of the point (a, b).
class Lut {
 public:
  Lut(const Codebook& cb, int child_bits);

  int child_bits() const noexcept { return child_bits_; }
  std::size_t side() const noexcept { return std::size_t{1} << child_bits_; }
  std::uint16_t operator()(std::uint32_t a, std::uint32_t b) const {
    return table_[(std::size_t{a} << child_bits_) + b];
  }
  const std::vector<std::uint16_t>& table() const noexcept { return table_; }

 private:
  int child_bits_;
  std::vector<std::uint16_t> table_;
};

inline Lut build_lut(const Codebook& cb, int child_bits) { return Lut(cb, child_bits); }

}  // namespace ace::vq
