#pragma once

// Exact maximum-entropy estimates on small, fully enumerable discrete spaces.
//
// Everything here works on explicit probability tables, so it is limited to
// joint state spaces of at most kMaxJointStates entries. The image-scale
// evaluation of the same product formula lives in probimage.hpp.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ace::maxent {

inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 20;

/// Probability table over the joint states of several finite variables.
///
/// Joint states are stored row-major: the first variable is the most
/// significant digit of the flat index.
class DiscreteDist {
 public:
  /// Validates non-negativity, shape and normalization (within 1e-12).
  DiscreteDist(std::vector<std::size_t> shape, std::vector<double> probs);

  static DiscreteDist uniform(std::vector<std::size_t> shape);
  /// Normalizes non-negative weights with a positive sum.
  static DiscreteDist from_weights(std::vector<std::size_t> shape, std::vector<double> weights);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  std::size_t index_of(std::span<const std::size_t> states) const;
  std::vector<std::size_t> states_of(std::size_t index) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

/// Relative entropy functional: -sum dist(x) log(dist(x)/prior(x)).
/// Throws DomainError where dist > 0 but prior == 0.
double entropy(const DiscreteDist& dist, const DiscreteDist& prior);

/// sum p log(p/q). Throws DomainError where p > 0 but q == 0.
double kl_divergence(const DiscreteDist& p, const DiscreteDist& q);

/// Closed-form maximum-entropy estimate under one marginal constraint:
///   Q(x) = prior(x) target(y(x)) / sum_{x': y(x')=y(x)} prior(x').
/// `labels[i]` is y of flat state i; `target` is a distribution over labels.
DiscreteDist single_constraint_mem(const DiscreteDist& prior, std::span<const std::size_t> labels,
                                   std::span<const double> target);

/// Deterministic map from a (left child value, right child value) pair to a
/// parent value. `table[left * right_alphabet + right]`.
struct NodeMap {
  std::size_t parent_alphabet = 1;
  std::vector<std::size_t> table;
};

/// Complete binary tree of transformations over 2^depth leaf variables.
///
/// Nodes use heap numbering: the root is node 1, node k has children 2k and
/// 2k+1, and leaf i (0-based) is node 2^depth + i. `node_maps[k - 1]` belongs
/// to internal node k.
class TreeSpec {
 public:
  TreeSpec(int depth, std::vector<std::size_t> leaf_alphabets, std::vector<NodeMap> node_maps);

  /// Every internal node maps its pair bijectively onto left*right values.
  static TreeSpec identity(int depth, std::vector<std::size_t> leaf_alphabets);

  int depth() const noexcept { return depth_; }
  std::size_t leaf_count() const noexcept { return std::size_t{1} << depth_; }
  std::size_t internal_count() const noexcept { return leaf_count() - 1; }
  std::size_t node_count() const noexcept { return 2 * leaf_count() - 1; }
  const std::vector<std::size_t>& leaf_alphabets() const noexcept { return leaf_alphabets_; }
  const NodeMap& node_map(std::size_t node) const { return node_maps_[node - 1]; }

  /// Alphabet size of the value emitted at a heap node.
  std::size_t alphabet(std::size_t node) const { return alphabets_[node]; }
  bool is_leaf(std::size_t node) const noexcept { return node >= leaf_count(); }

  /// Values at every node for one joint leaf state; indexed by heap number
  /// (entry 0 unused).
  std::vector<std::size_t> node_values(std::span<const std::size_t> leaf_states) const;

  /// Internal nodes in post-order (left subtree, right subtree, node).
  std::vector<std::size_t> post_order() const;

 private:
  int depth_;
  std::vector<std::size_t> leaf_alphabets_;
  std::vector<NodeMap> node_maps_;
  std::vector<std::size_t> alphabets_;
};

/// Joint distribution of the two children of internal node `node`, pushed
/// forward from `dist`. Flat index `left * alphabet(2node+1) + right`.
std::vector<double> sibling_pair_marginal(const TreeSpec& tree, const DiscreteDist& dist,
                                          std::size_t node);

/// Hierarchical maximum-entropy estimate (uniform prior): the product over
/// internal nodes of P_pair / (P_left P_right) times the product of leaf
/// marginals, all taken from `empirical`. States whose transformed pair has
/// zero empirical probability get probability zero.
DiscreteDist tree_mem(const TreeSpec& tree, const DiscreteDist& empirical);

struct IpfResult {
  DiscreteDist dist;
  bool converged = false;
  int cycles = 0;
  double max_discrepancy = 0.0;
};

/// Iterative proportional fitting from the uniform distribution, cycling
/// through the sibling-pair constraints in post-order. Stops once the largest
/// marginal discrepancy after a full cycle is <= tol, or after max_iter cycles.
IpfResult ipf_oracle(const TreeSpec& tree, const DiscreteDist& empirical, int max_iter, double tol);

/// Single-layer RAM network (n-tuple classifier).
///
/// Input component c takes values in [0, alphabets[c]). Each group of the
/// partition addresses one table with the mixed-radix number formed by its
/// components in listed order.
struct RamDiscriminator {
  std::vector<std::size_t> alphabets;
  std::vector<std::vector<std::size_t>> partition;
  std::vector<std::vector<double>> tables;

  /// Throws InvalidArgument unless the partition uses every component exactly
  /// once and each table covers its group's address space.
  void validate() const;
  std::size_t address(std::size_t group, std::span<const std::size_t> x) const;
  std::size_t address_space(std::size_t group) const;
};

/// Real mode: sum of addressed table entries. One-bit mode: number of
/// addressed entries equal to 1.
double ram_score(const RamDiscriminator& disc, std::span<const std::size_t> x, bool one_bit);

/// Real mode: tables hold log regularized marginal frequencies of each group.
/// One-bit mode: entry is 1 iff its count reaches the ceiling of the table's
/// mean count.
RamDiscriminator ram_train(std::vector<std::size_t> alphabets,
                           std::vector<std::vector<std::size_t>> partition,
                           std::span<const std::vector<std::size_t>> samples, bool one_bit);

}  // namespace ace::maxent
