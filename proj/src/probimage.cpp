#include "ace/probimage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ace/error.hpp"
#include "ace/stats.hpp"

namespace ace::probimage {

namespace {

double field_sum(const SourceField& f) { return std::accumulate(f.values.begin(), f.values.end(), 0.0); }

void check_consistent(const std::vector<SourceField>& sources, const std::vector<pyramid::LayerGeometry>& geoms) {
  if (sources.empty()) throw InvalidArgument("need at least the leaf source field");
  if (geoms.size() + 1 < sources.size()) throw InvalidArgument("missing layer geometries");
  for (const auto& s : sources) {
    if (s.width != sources[0].width || s.height != sources[0].height ||
        s.values.size() != static_cast<std::size_t>(s.width) * s.height) {
      throw InvalidArgument("source fields have inconsistent dimensions");
    }
  }
}

// acc[p] += c[p] and acc[p + offset] += c[p], with wrap.
void spread_to_children(const std::vector<double>& c, std::vector<double>& acc, int w, int h,
                        const pyramid::LayerGeometry& g) {
  for (int y = 0; y < h; ++y) {
    const int yy = (y + g.dy()) % h;
    for (int x = 0; x < w; ++x) {
      const int xx = (x + g.dx()) % w;
      const double v = c[static_cast<std::size_t>(y) * w + x];
      acc[static_cast<std::size_t>(y) * w + x] += v;
      acc[static_cast<std::size_t>(yy) * w + xx] += v;
    }
  }
}

}  // namespace

double ProbImage::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

std::vector<SourceField> compute_sources(const pyramid::AceModel& model, const std::vector<Frame>& frames) {
  const auto& cfg = model.config;
  if (frames.size() != model.layers.size() + 1) {
    throw InvalidArgument("expected " + std::to_string(model.layers.size() + 1) + " frames, got " +
                          std::to_string(frames.size()));
  }
  const int w = frames[0].width;
  const int h = frames[0].height;
  for (const auto& f : frames) {
    if (f.width != w || f.height != h) throw InvalidArgument("frames have inconsistent dimensions");
    if (f.bits != cfg.vq_bits) throw InvalidArgument("frame bit width does not match the model");
  }
  const int shift = cfg.vq_bits - cfg.hist_bits;

  std::vector<SourceField> sources;
  const stats::LeafLogTable leaf(stats::regularize(model.leaf_hist));
  SourceField s0{0, w, h, std::vector<double>(frames[0].size())};
  for (std::size_t i = 0; i < frames[0].size(); ++i) s0.values[i] = leaf(frames[0].codes[i] >> shift);
  sources.push_back(std::move(s0));

  for (std::size_t l = 1; l <= model.layers.size(); ++l) {
    const auto& layer = model.layers[l - 1];
    const stats::PairSourceTable table(stats::regularize(layer.hist));
    const Frame& child = frames[l - 1];
    SourceField s{static_cast<int>(l), w, h, std::vector<double>(child.size())};
    const int dx = layer.geometry.dx();
    const int dy = layer.geometry.dy();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint32_t a = child.at(x, y) >> shift;
        const std::uint32_t b = child.wrapped(x + dx, y + dy) >> shift;
        s.values[static_cast<std::size_t>(y) * w + x] = table(a, b);
      }
    }
    sources.push_back(std::move(s));
  }
  return sources;
}

double total_logprob(const std::vector<SourceField>& sources) {
  if (sources.empty()) return 0.0;
  double total = field_sum(sources[0]);
  for (std::size_t l = 1; l < sources.size(); ++l) total += std::ldexp(field_sum(sources[l]), -static_cast<int>(l));
  return total;
}

double cooccurrence_form(const std::vector<SourceField>& sources,
                         const std::vector<pyramid::LayerGeometry>& geometries) {
  check_consistent(sources, geometries);
  if (sources.size() < 2) throw InvalidArgument("the co-occurrence form needs a pair layer");
  const SourceField& s0 = sources[0];
  const SourceField& s1 = sources[1];
  const auto& g = geometries[0];
  const int w = s0.width;
  const int h = s0.height;

  // Each layer-1 term rebuilt as log P12 estimate = S1 + S0[left] + S0[right].
  double pair_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      pair_sum += s1.at(x, y) + s0.at(x, y) + s0.at((x + g.dx()) % w, (y + g.dy()) % h);
    }
  }
  double total = 0.5 * pair_sum;
  for (std::size_t l = 2; l < sources.size(); ++l) total += std::ldexp(field_sum(sources[l]), -static_cast<int>(l));
  return total;
}

ProbImage backpropagate(const std::vector<SourceField>& sources,
                        const std::vector<pyramid::LayerGeometry>& geometries) {
  check_consistent(sources, geometries);
  const int w = sources[0].width;
  const int h = sources[0].height;
  const std::size_t n = sources[0].values.size();

  std::vector<double> acc(n, 0.0);
  for (std::size_t l = sources.size() - 1; l >= 1; --l) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (acc[i] + sources[l].values[i]) * 0.25;
    std::vector<double> below(n, 0.0);
    spread_to_children(c, below, w, h, geometries[l - 1]);
    acc = std::move(below);
  }
  ProbImage img{w, h, std::move(acc), {}};
  for (std::size_t i = 0; i < n; ++i) img.values[i] += sources[0].values[i];
  for (std::size_t l = 0; l < sources.size(); ++l) img.layers.push_back(static_cast<int>(l));
  return img;
}

ProbImage layer_image(const std::vector<SourceField>& sources, int level,
                      const std::vector<pyramid::LayerGeometry>& geometries) {
  check_consistent(sources, geometries);
  if (level < 0 || static_cast<std::size_t>(level) >= sources.size()) {
    throw InvalidArgument("no source field for level " + std::to_string(level));
  }
  const int w = sources[0].width;
  const int h = sources[0].height;
  const std::size_t n = sources[0].values.size();

  std::vector<double> acc = sources[level].values;
  for (int l = level; l >= 1; --l) {
    for (auto& v : acc) v *= 0.25;
    std::vector<double> below(n, 0.0);
    spread_to_children(acc, below, w, h, geometries[l - 1]);
    acc = std::move(below);
  }
  return ProbImage{w, h, std::move(acc), {level}};
}

Frame to_display(const ProbImage& img, bool invert) {
  if (img.values.empty()) throw InvalidArgument("cannot display an empty image");
  const auto [lo_it, hi_it] = std::minmax_element(img.values.begin(), img.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Frame out(img.width, img.height, 8, 128);
  // Round-off of a few ulps on a flat field still counts as flat.
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (hi - lo <= 1e-12 * scale) return out;
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    const double t = invert ? (hi - img.values[i]) : (img.values[i] - lo);
    out.codes[i] = static_cast<std::uint16_t>(std::clamp(std::floor(t / (hi - lo) * 255.0 + 0.5), 0.0, 255.0));
  }
  return out;
}

}  // namespace ace::probimage
