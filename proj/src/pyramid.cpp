#include "ace/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ace/error.hpp"
#include "ace/rng.hpp"

namespace ace {

Frame::Frame(int w, int h, int b, std::uint16_t fill) : width(w), height(h), bits(b) {
  if (w < 1 || h < 1) throw InvalidArgument("frame dimensions must be >= 1");
  if (b < 1 || b > 16) throw InvalidArgument("frame bit width must be in [1, 16]");
  codes.assign(static_cast<std::size_t>(w) * h, fill);
}

std::uint16_t Frame::wrapped(int x, int y) const {
  x %= width;
  y %= height;
  if (x < 0) x += width;
  if (y < 0) y += height;
  return at(x, y);
}

void Frame::validate() const {
  if (width < 1 || height < 1) throw InvalidArgument("frame dimensions must be >= 1");
  if (codes.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("frame code count does not match its dimensions");
  }
  const std::uint32_t limit = std::uint32_t{1} << bits;
  for (std::uint16_t c : codes) {
    if (c >= limit) throw InvalidArgument("frame code " + std::to_string(c) + " exceeds its bit width");
  }
}

Frame cyclic_shift(const Frame& f, int dx, int dy) {
  Frame out = f;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) out.at(x, y) = f.wrapped(x - dx, y - dy);
  }
  return out;
}

}  // namespace ace

namespace ace::pyramid {

char direction_code(Direction d) { return d == Direction::kVertical ? 'v' : 'h'; }

Direction direction_from_code(char c) {
  if (c == 'v') return Direction::kVertical;
  if (c == 'h') return Direction::kHorizontal;
  throw InvalidArgument(std::string("unknown direction code '") + c + "'");
}

LayerGeometry layer_geometry(int level, Direction first) {
  if (level < 1 || level > 30) throw InvalidArgument("layer level must be in [1, 30]");
  const Direction other = first == Direction::kVertical ? Direction::kHorizontal : Direction::kVertical;
  LayerGeometry g;
  g.level = level;
  g.direction = (level % 2 == 1) ? first : other;
  g.offset = 1 << ((level - 1) / 2);
  // Extent along the first direction grows on odd levels, the other on even.
  const int along_first = 1 << ((level + 1) / 2);
  const int along_other = 1 << (level / 2);
  if (first == Direction::kVertical) {
    g.field_h = along_first;
    g.field_w = along_other;
  } else {
    g.field_w = along_first;
    g.field_h = along_other;
  }
  return g;
}

Frame wedge_correct(const Frame& img) {
  img.validate();
  if (img.bits != 8) throw InvalidArgument("wedge correction expects an 8-bit image");
  const double n = static_cast<double>(img.size());
  const double xm = (img.width - 1) / 2.0;
  const double ym = (img.height - 1) / 2.0;
  double mean = 0.0;
  for (std::uint16_t v : img.codes) mean += v;
  mean /= n;

  // On a full grid the centred coordinates are orthogonal, so the normal
  // equations decouple into two 1-D regressions.
  double sxv = 0.0, sxx = 0.0, syv = 0.0, syy = 0.0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = img.at(x, y) - mean;
      sxv += (x - xm) * v;
      syv += (y - ym) * v;
      sxx += (x - xm) * (x - xm);
      syy += (y - ym) * (y - ym);
    }
  }
  const double a = sxx > 0.0 ? sxv / sxx : 0.0;
  const double b = syy > 0.0 ? syv / syy : 0.0;

  Frame out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = img.at(x, y) - a * (x - xm) - b * (y - ym);
      out.at(x, y) = static_cast<std::uint16_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

Frame quantize_bits(const Frame& img, int bits) {
  if (bits < 1 || bits > img.bits) {
    throw InvalidArgument("cannot quantize a " + std::to_string(img.bits) + "-bit frame to " +
                          std::to_string(bits) + " bits");
  }
  Frame out = img;
  out.bits = bits;
  const int shift = img.bits - bits;
  for (auto& c : out.codes) c = static_cast<std::uint16_t>(c >> shift);
  return out;
}

Frame forward_layer(const Frame& frame, const vq::Lut& lut, const LayerGeometry& geom) {
  if (frame.bits > lut.child_bits()) throw InvalidArgument("LUT does not cover the frame's code range");
  Frame out(frame.width, frame.height, lut.child_bits());
  const int dx = geom.dx();
  const int dy = geom.dy();
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) out.at(x, y) = lut(frame.at(x, y), frame.wrapped(x + dx, y + dy));
  }
  return out;
}

std::vector<stats::CodePair> layer_pairs(const Frame& frame, const LayerGeometry& geom) {
  std::vector<stats::CodePair> pairs;
  pairs.reserve(frame.size());
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      pairs.push_back({frame.at(x, y), frame.wrapped(x + geom.dx(), y + geom.dy())});
    }
  }
  return pairs;
}

void AceConfig::validate() const {
  if (layers < 1 || layers > 30) throw InvalidArgument("layers must be in [1, 30]");
  if (vq_bits < 1 || vq_bits > 10) throw InvalidArgument("vq_bits must be in [1, 10]");
  if (hist_bits < 1 || hist_bits > vq_bits || hist_bits > stats::kMaxHistBits) {
    throw InvalidArgument("hist_bits must be in [1, vq_bits]");
  }
}

std::uint64_t AceConfig::layer_seed(int level) const {
  std::uint64_t x = seed ^ (static_cast<std::uint64_t>(level) << 32);
  return Rng::splitmix64(x);
}

std::vector<LayerGeometry> AceModel::geometries() const {
  std::vector<LayerGeometry> g;
  for (const auto& layer : layers) g.push_back(layer.geometry);
  return g;
}

void check_image_size(const AceConfig& config, int width, int height) {
  const LayerGeometry top = layer_geometry(config.layers, config.first_direction);
  if (width < top.field_w || height < top.field_h) {
    throw InvalidArgument("image " + std::to_string(width) + "x" + std::to_string(height) +
                          " is smaller than the " + std::to_string(top.field_w) + "x" +
                          std::to_string(top.field_h) + " receptive field of layer " +
                          std::to_string(config.layers));
  }
}

Frame preprocess(const AceConfig& config, const Frame& img) {
  img.validate();
  if (img.bits != 8) throw InvalidArgument("input images must be 8-bit");
  if (config.vq_bits > img.bits) throw InvalidArgument("vq_bits exceeds the input bit depth");
  return quantize_bits(config.wedge ? wedge_correct(img) : img, config.vq_bits);
}

namespace {

std::uint32_t truncate(std::uint32_t code, int shift) { return code >> shift; }

}  // namespace

AceModel train_model(const Frame& img, const AceConfig& config) {
  config.validate();
  check_image_size(config, img.width, img.height);

  AceModel model;
  model.config = config;
  model.width = img.width;
  model.height = img.height;

  const int shift = config.vq_bits - config.hist_bits;
  Frame frame = preprocess(config, img);
  model.leaf_hist = stats::Histogram1D(config.hist_bits);
  for (std::uint16_t c : frame.codes) model.leaf_hist.add(truncate(c, shift));

  for (int level = 1; level <= config.layers; ++level) {
    const LayerGeometry geom = layer_geometry(level, config.first_direction);
    const auto pairs = layer_pairs(frame, geom);

    std::vector<vq::Vec2> data;
    data.reserve(pairs.size());
    for (const auto& p : pairs) data.push_back({static_cast<double>(p.a), static_cast<double>(p.b)});
    const vq::TrainSchedule sched{config.vq_bits, 20, config.layer_seed(level)};
    vq::Codebook cb = vq::train_topographic(data, sched);
    vq::Lut lut(cb, config.vq_bits);

    stats::Histogram2D hist(config.hist_bits);
    for (const auto& p : pairs) hist.add(truncate(p.a, shift), truncate(p.b, shift));

    frame = forward_layer(frame, lut, geom);
    model.layers.push_back(Layer{geom, std::move(cb), std::move(lut), std::move(hist)});
  }
  return model;
}

std::vector<Frame> propagate(const AceModel& model, const Frame& img) {
  check_image_size(model.config, img.width, img.height);
  std::vector<Frame> frames;
  frames.reserve(model.layers.size() + 1);
  frames.push_back(preprocess(model.config, img));
  for (const auto& layer : model.layers) frames.push_back(forward_layer(frames.back(), layer.lut, layer.geometry));
  return frames;
}

}  // namespace ace::pyramid
