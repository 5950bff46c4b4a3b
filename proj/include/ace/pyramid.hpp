#pragma once

// The translation-invariant pyramid: every layer keeps full W x H resolution
// and pairs each position with a neighbour at a growing offset, alternating
// north/south and east/west, with toroidal wrap at the edges.

#include <cstdint>
#include <vector>

#include "ace/frame.hpp"
#include "ace/stats.hpp"
#include "ace/vq.hpp"

namespace ace::pyramid {

enum class Direction { kVertical, kHorizontal };

char direction_code(Direction d);  // 'v' or 'h'
Direction direction_from_code(char c);

struct LayerGeometry {
  int level = 1;
  Direction direction = Direction::kVertical;
  int offset = 1;
  int field_w = 1;  // east/west extent of the receptive field
  int field_h = 2;  // north/south extent

  int dx() const noexcept { return direction == Direction::kHorizontal ? offset : 0; }
  int dy() const noexcept { return direction == Direction::kVertical ? offset : 0; }
  bool operator==(const LayerGeometry&) const = default;
};

/// Geometry of layer `level` (>= 1). Offsets are 2^floor((l-1)/2); with a
/// vertical first step the field is 2^floor(l/2) wide by 2^ceil(l/2) tall.
LayerGeometry layer_geometry(int level, Direction first = Direction::kVertical);

/// Removes the least-squares plane from an 8-bit image, keeping its mean.
Frame wedge_correct(const Frame& img);

/// Drops the low (img.bits - bits) bits of every code.
Frame quantize_bits(const Frame& img, int bits);

/// out[p] = lut(in[p], in[p + offset * direction]) with wrap.
Frame forward_layer(const Frame& frame, const vq::Lut& lut, const LayerGeometry& geom);

/// Every (in[p], in[p + offset]) pair of a frame, as codes.
std::vector<stats::CodePair> layer_pairs(const Frame& frame, const LayerGeometry& geom);

struct AceConfig {
  int layers = 8;
  int vq_bits = 8;
  int hist_bits = 6;
  bool wedge = true;
  std::uint64_t seed = 1;
  Direction first_direction = Direction::kVertical;

  void validate() const;
  /// Seed used to train layer `level`'s codebook.
  std::uint64_t layer_seed(int level) const;
};

struct Layer {
  LayerGeometry geometry;
  vq::Codebook codebook;
  vq::Lut lut;
  stats::Histogram2D hist;  // raw counts over hist_bits-truncated child pairs
};

struct AceModel {
  AceConfig config;
  int width = 0;  // size of the training image
  int height = 0;
  stats::Histogram1D leaf_hist{0};  // raw counts over hist_bits-truncated pixels
  std::vector<Layer> layers;

  std::vector<LayerGeometry> geometries() const;
};

/// Throws InvalidArgument if the image cannot hold the largest receptive field.
void check_image_size(const AceConfig& config, int width, int height);

/// Optional wedge correction followed by quantization to vq_bits.
Frame preprocess(const AceConfig& config, const Frame& img);

/// Trains every layer in turn on the image, then histograms the image's own
/// code pairs. Deterministic for a given seed.
AceModel train_model(const Frame& img, const AceConfig& config);

/// Frames for layers 0..L; layer 0 is the preprocessed input.
std::vector<Frame> propagate(const AceModel& model, const Frame& img);

}  // namespace ace::pyramid
