#pragma once

// Log-probability sources per pyramid layer and their backpropagation into a
// leaf-resolution probability image.
//
// With W x H positions per layer and wrap at the edges,
//
//   log Q = sum_p S0[p] + sum_{l=1..L} 2^-l sum_p Sl[p]
//
// where S0 is the log leaf probability and Sl = log(P12 / (P1 P2)) of the
// child pair feeding layer l. Each pixel is the left child of one layer-1
// pair and the right child of another, so the leaf term equals half the sum
// of S0[left] + S0[right] over layer-1 pairs; cooccurrence_form() evaluates
// that rewrite. Backpropagation scales by 1/4 per layer and copies to two
// children, so a layer-l source lands on 2^l pixels with weight 4^-l each and
// the image sums to log Q.

#include <vector>

#include "ace/pyramid.hpp"

namespace ace::probimage {

struct SourceField {
  int level = 0;  // 0 = leaf marginals, 1..L = pair sources
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct ProbImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<int> layers;  // which source levels contributed

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double sum() const;
};

/// Sources for frames produced by pyramid::propagate with the same model.
std::vector<SourceField> compute_sources(const pyramid::AceModel& model, const std::vector<Frame>& frames);

/// sum_p S0 + sum_l 2^-l sum_p Sl.
double total_logprob(const std::vector<SourceField>& sources);

/// The same total written with the leaf term as half the co-occurrence sum
/// over layer-1 pairs. Needs at least one pair layer.
double cooccurrence_form(const std::vector<SourceField>& sources,
                         const std::vector<pyramid::LayerGeometry>& geometries);

/// Full backpropagation: A_L = 0; A_{l-1}[child] += (A_l + S_l) / 4 for both
/// children; result A_0 + S_0.
ProbImage backpropagate(const std::vector<SourceField>& sources,
                        const std::vector<pyramid::LayerGeometry>& geometries);

/// Contribution of level `level` alone.
ProbImage layer_image(const std::vector<SourceField>& sources, int level,
                      const std::vector<pyramid::LayerGeometry>& geometries);

/// Linear map of [min, max] onto [0, 255] with round-half-up; a constant
/// image maps to 128. `invert` maps small values to white (anomaly image).
Frame to_display(const ProbImage& img, bool invert);

}  // namespace ace::probimage
