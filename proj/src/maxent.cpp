#include "ace/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "ace/error.hpp"
#include "ace/stats.hpp"

namespace ace::maxent {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw InvalidArgument("distribution needs at least one variable");
  std::size_t n = 1;
  for (std::size_t a : shape) {
    if (a == 0) throw InvalidArgument("variable alphabet size must be >= 1");
    if (n > kMaxJointStates / a) {
      throw InvalidArgument("joint state space exceeds " + std::to_string(kMaxJointStates) + " states");
    }
    n *= a;
  }
  return n;
}

void require_same_shape(const DiscreteDist& a, const DiscreteDist& b) {
  if (a.shape() != b.shape()) throw InvalidArgument("distributions have different shapes");
}

}  // namespace

DiscreteDist::DiscreteDist(std::vector<std::size_t> shape, std::vector<double> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
  if (shape_product(shape_) != probs_.size()) {
    throw InvalidArgument("probability table length does not match shape");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

DiscreteDist DiscreteDist::uniform(std::vector<std::size_t> shape) {
  const std::size_t n = shape_product(shape);
  return DiscreteDist(std::move(shape), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteDist DiscreteDist::from_weights(std::vector<std::size_t> shape, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("weights must have a positive sum");
  for (double& w : weights) w /= total;
  return DiscreteDist(std::move(shape), std::move(weights));
}

std::size_t DiscreteDist::index_of(std::span<const std::size_t> states) const {
  if (states.size() != shape_.size()) throw InvalidArgument("state vector has wrong length");
  std::size_t index = 0;
  for (std::size_t v = 0; v < shape_.size(); ++v) {
    if (states[v] >= shape_[v]) throw InvalidArgument("state value outside its alphabet");
    index = index * shape_[v] + states[v];
  }
  return index;
}

std::vector<std::size_t> DiscreteDist::states_of(std::size_t index) const {
  std::vector<std::size_t> states(shape_.size());
  for (std::size_t v = shape_.size(); v-- > 0;) {
    states[v] = index % shape_[v];
    index /= shape_[v];
  }
  return states;
}

double entropy(const DiscreteDist& dist, const DiscreteDist& prior) {
  require_same_shape(dist, prior);
  double h = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist[i];
    if (p == 0.0) continue;
    if (prior[i] == 0.0) throw DomainError("dist is positive where the prior vanishes");
    h -= p * std::log(p / prior[i]);
  }
  return h;
}

double kl_divergence(const DiscreteDist& p, const DiscreteDist& q) {
  require_same_shape(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw DomainError("p is positive where q vanishes");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

DiscreteDist single_constraint_mem(const DiscreteDist& prior, std::span<const std::size_t> labels,
                                   std::span<const double> target) {
  if (labels.size() != prior.size()) throw InvalidArgument("label map must cover every joint state");
  double target_total = 0.0;
  for (double t : target) {
    if (!(t >= 0.0)) throw InvalidArgument("target probabilities must be >= 0");
    target_total += t;
  }
  if (std::abs(target_total - 1.0) > 1e-12) throw InvalidArgument("target must sum to 1");

  std::vector<double> label_mass(target.size(), 0.0);
  for (std::size_t i = 0; i < prior.size(); ++i) {
    if (labels[i] >= target.size()) throw InvalidArgument("label outside target alphabet");
    label_mass[labels[i]] += prior[i];
  }
  for (std::size_t y = 0; y < target.size(); ++y) {
    if (target[y] > 0.0 && label_mass[y] == 0.0) {
      throw InfeasibleConstraint("label " + std::to_string(y) +
                                 " has positive target but no prior mass");
    }
  }
  std::vector<double> q(prior.size(), 0.0);
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const std::size_t y = labels[i];
    if (label_mass[y] > 0.0) q[i] = prior[i] * target[y] / label_mass[y];
  }
  return DiscreteDist::from_weights(prior.shape(), std::move(q));
}

// --- TreeSpec -------------------------------------------------------------

TreeSpec::TreeSpec(int depth, std::vector<std::size_t> leaf_alphabets, std::vector<NodeMap> node_maps)
    : depth_(depth), leaf_alphabets_(std::move(leaf_alphabets)), node_maps_(std::move(node_maps)) {
  if (depth_ < 1 || depth_ > 20) throw InvalidArgument("tree depth must be in [1, 20]");
  if (leaf_alphabets_.size() != leaf_count()) {
    throw InvalidArgument("need " + std::to_string(leaf_count()) + " leaf alphabets");
  }
  if (node_maps_.size() != internal_count()) {
    throw InvalidArgument("need " + std::to_string(internal_count()) + " node maps");
  }
  shape_product(leaf_alphabets_);

  alphabets_.assign(node_count() + 1, 0);
  for (std::size_t i = 0; i < leaf_count(); ++i) alphabets_[leaf_count() + i] = leaf_alphabets_[i];
  for (std::size_t node = internal_count(); node >= 1; --node) {
    const NodeMap& m = node_maps_[node - 1];
    const std::size_t want = alphabets_[2 * node] * alphabets_[2 * node + 1];
    if (m.parent_alphabet < 1) throw InvalidArgument("parent alphabet must be >= 1");
    if (m.table.size() != want) {
      throw InvalidArgument("node " + std::to_string(node) + " map has " +
                            std::to_string(m.table.size()) + " entries, expected " + std::to_string(want));
    }
    for (std::size_t v : m.table) {
      if (v >= m.parent_alphabet) {
        throw InvalidArgument("node " + std::to_string(node) + " maps outside its parent alphabet");
      }
    }
    alphabets_[node] = m.parent_alphabet;
  }
}

TreeSpec TreeSpec::identity(int depth, std::vector<std::size_t> leaf_alphabets) {
  if (depth < 1 || depth > 20) throw InvalidArgument("tree depth must be in [1, 20]");
  const std::size_t leaves = std::size_t{1} << depth;
  if (leaf_alphabets.size() != leaves) throw InvalidArgument("wrong number of leaf alphabets");
  shape_product(leaf_alphabets);
  std::vector<std::size_t> alpha(2 * leaves, 0);
  for (std::size_t i = 0; i < leaves; ++i) alpha[leaves + i] = leaf_alphabets[i];
  std::vector<NodeMap> maps(leaves - 1);
  for (std::size_t node = leaves - 1; node >= 1; --node) {
    const std::size_t n = alpha[2 * node] * alpha[2 * node + 1];
    maps[node - 1].parent_alphabet = n;
    maps[node - 1].table.resize(n);
    std::iota(maps[node - 1].table.begin(), maps[node - 1].table.end(), std::size_t{0});
    alpha[node] = n;
  }
  return TreeSpec(depth, std::move(leaf_alphabets), std::move(maps));
}

std::vector<std::size_t> TreeSpec::node_values(std::span<const std::size_t> leaf_states) const {
  if (leaf_states.size() != leaf_count()) throw InvalidArgument("wrong number of leaf states");
  std::vector<std::size_t> values(node_count() + 1, 0);
  for (std::size_t i = 0; i < leaf_count(); ++i) {
    if (leaf_states[i] >= leaf_alphabets_[i]) throw InvalidArgument("leaf state outside its alphabet");
    values[leaf_count() + i] = leaf_states[i];
  }
  for (std::size_t node = internal_count(); node >= 1; --node) {
    const NodeMap& m = node_maps_[node - 1];
    values[node] = m.table[values[2 * node] * alphabets_[2 * node + 1] + values[2 * node + 1]];
  }
  return values;
}

std::vector<std::size_t> TreeSpec::post_order() const {
  std::vector<std::size_t> order;
  order.reserve(internal_count());
  std::function<void(std::size_t)> visit = [&](std::size_t node) {
    if (is_leaf(node)) return;
    visit(2 * node);
    visit(2 * node + 1);
    order.push_back(node);
  };
  visit(1);
  return order;
}

namespace {

void require_tree_shape(const TreeSpec& tree, const DiscreteDist& dist) {
  if (dist.shape() != tree.leaf_alphabets()) {
    throw InvalidArgument("distribution shape does not match the tree's leaf alphabets");
  }
}

// For every joint state, the flat sibling-pair address at each internal node.
// Row-major by state; column k-1 belongs to internal node k.
struct PairAddresses {
  std::size_t internal = 0;
  std::vector<std::uint32_t> address;
  std::vector<std::size_t> pair_size;  // indexed by node

  std::uint32_t at(std::size_t state, std::size_t node) const {
    return address[state * internal + node - 1];
  }
};

PairAddresses pair_addresses(const TreeSpec& tree, const DiscreteDist& shape_source) {
  PairAddresses pa;
  pa.internal = tree.internal_count();
  pa.address.resize(shape_source.size() * pa.internal);
  pa.pair_size.assign(tree.internal_count() + 1, 0);
  for (std::size_t node = 1; node <= tree.internal_count(); ++node) {
    pa.pair_size[node] = tree.alphabet(2 * node) * tree.alphabet(2 * node + 1);
  }
  for (std::size_t s = 0; s < shape_source.size(); ++s) {
    const auto values = tree.node_values(shape_source.states_of(s));
    for (std::size_t node = 1; node <= tree.internal_count(); ++node) {
      pa.address[s * pa.internal + node - 1] =
          static_cast<std::uint32_t>(values[2 * node] * tree.alphabet(2 * node + 1) + values[2 * node + 1]);
    }
  }
  return pa;
}

std::vector<double> marginal_from(const PairAddresses& pa, std::span<const double> probs, std::size_t node) {
  std::vector<double> m(pa.pair_size[node], 0.0);
  for (std::size_t s = 0; s < probs.size(); ++s) m[pa.at(s, node)] += probs[s];
  return m;
}

}  // namespace

std::vector<double> sibling_pair_marginal(const TreeSpec& tree, const DiscreteDist& dist, std::size_t node) {
  require_tree_shape(tree, dist);
  if (node < 1 || node > tree.internal_count()) throw InvalidArgument("not an internal node");
  const std::size_t right = tree.alphabet(2 * node + 1);
  std::vector<double> m(tree.alphabet(2 * node) * right, 0.0);
  for (std::size_t s = 0; s < dist.size(); ++s) {
    const auto values = tree.node_values(dist.states_of(s));
    m[values[2 * node] * right + values[2 * node + 1]] += dist[s];
  }
  return m;
}

DiscreteDist tree_mem(const TreeSpec& tree, const DiscreteDist& empirical) {
  require_tree_shape(tree, empirical);
  const std::size_t nodes = tree.node_count();

  // Empirical marginals at every node and every sibling pair.
  std::vector<std::vector<double>> node_marginal(nodes + 1);
  std::vector<std::vector<double>> pair_marginal(tree.internal_count() + 1);
  for (std::size_t node = 1; node <= nodes; ++node) node_marginal[node].assign(tree.alphabet(node), 0.0);
  for (std::size_t node = 1; node <= tree.internal_count(); ++node) {
    pair_marginal[node].assign(tree.alphabet(2 * node) * tree.alphabet(2 * node + 1), 0.0);
  }

  std::vector<std::vector<std::size_t>> values(empirical.size());
  for (std::size_t s = 0; s < empirical.size(); ++s) {
    values[s] = tree.node_values(empirical.states_of(s));
    const double p = empirical[s];
    if (p == 0.0) continue;
    for (std::size_t node = 1; node <= nodes; ++node) node_marginal[node][values[s][node]] += p;
    for (std::size_t node = 1; node <= tree.internal_count(); ++node) {
      pair_marginal[node][values[s][2 * node] * tree.alphabet(2 * node + 1) + values[s][2 * node + 1]] += p;
    }
  }

  std::vector<double> q(empirical.size(), 0.0);
  for (std::size_t s = 0; s < empirical.size(); ++s) {
    const auto& v = values[s];
    double prod = 1.0;
    for (std::size_t node = 1; node <= tree.internal_count() && prod > 0.0; ++node) {
      const double joint = pair_marginal[node][v[2 * node] * tree.alphabet(2 * node + 1) + v[2 * node + 1]];
      if (joint == 0.0) {
        prod = 0.0;
        break;
      }
      prod *= joint / (node_marginal[2 * node][v[2 * node]] * node_marginal[2 * node + 1][v[2 * node + 1]]);
    }
    if (prod == 0.0) continue;
    for (std::size_t leaf = tree.leaf_count(); leaf <= nodes; ++leaf) prod *= node_marginal[leaf][v[leaf]];
    q[s] = prod;
  }
  // The product form is normalized by construction; a visible deviation means
  // the marginals above are inconsistent.
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error("tree_mem product sums to " + std::to_string(total));
  }
  return DiscreteDist::from_weights(empirical.shape(), std::move(q));
}

IpfResult ipf_oracle(const TreeSpec& tree, const DiscreteDist& empirical, int max_iter, double tol) {
  require_tree_shape(tree, empirical);
  const PairAddresses pa = pair_addresses(tree, empirical);
  const std::vector<std::size_t> order = tree.post_order();

  std::vector<std::vector<double>> target(tree.internal_count() + 1);
  for (std::size_t node : order) target[node] = marginal_from(pa, empirical.probs(), node);

  std::vector<double> q(empirical.size(), 1.0 / static_cast<double>(empirical.size()));
  IpfResult result{DiscreteDist::uniform(empirical.shape()), false, 0, 0.0};

  for (int cycle = 0; cycle < max_iter; ++cycle) {
    for (std::size_t node : order) {
      const auto current = marginal_from(pa, q, node);
      for (std::size_t s = 0; s < q.size(); ++s) {
        const std::uint32_t a = pa.at(s, node);
        q[s] = current[a] > 0.0 ? q[s] * target[node][a] / current[a] : 0.0;
      }
    }
    double worst = 0.0;
    for (std::size_t node : order) {
      const auto current = marginal_from(pa, q, node);
      for (std::size_t a = 0; a < current.size(); ++a) {
        worst = std::max(worst, std::abs(current[a] - target[node][a]));
      }
    }
    result.cycles = cycle + 1;
    result.max_discrepancy = worst;
    if (worst <= tol) {
      result.converged = true;
      break;
    }
  }
  if (result.cycles > 0) result.dist = DiscreteDist::from_weights(empirical.shape(), std::move(q));
  return result;
}

// --- RAM network -----------------------------------------------------------

std::size_t RamDiscriminator::address_space(std::size_t group) const {
  std::size_t n = 1;
  for (std::size_t c : partition.at(group)) n *= alphabets.at(c);
  return n;
}

void RamDiscriminator::validate() const {
  std::vector<int> used(alphabets.size(), 0);
  for (const auto& group : partition) {
    if (group.empty()) throw InvalidArgument("partition groups must be nonempty");
    for (std::size_t c : group) {
      if (c >= alphabets.size()) throw InvalidArgument("partition names an unknown component");
      ++used[c];
    }
  }
  for (std::size_t c = 0; c < used.size(); ++c) {
    if (used[c] != 1) {
      throw InvalidArgument("component " + std::to_string(c) + " is used " + std::to_string(used[c]) +
                            " times; the partition must use each exactly once");
    }
  }
  for (std::size_t a : alphabets) {
    if (a == 0) throw InvalidArgument("component alphabets must be >= 1");
  }
  if (tables.size() != partition.size()) throw InvalidArgument("need one table per group");
  for (std::size_t g = 0; g < partition.size(); ++g) {
    if (tables[g].size() != address_space(g)) throw InvalidArgument("table size does not match its group");
  }
}

std::size_t RamDiscriminator::address(std::size_t group, std::span<const std::size_t> x) const {
  if (x.size() != alphabets.size()) throw InvalidArgument("input has wrong number of components");
  std::size_t addr = 0;
  for (std::size_t c : partition.at(group)) {
    if (x[c] >= alphabets[c]) {
      throw InvalidArgument("component " + std::to_string(c) + " value " + std::to_string(x[c]) +
                            " is outside its alphabet");
    }
    addr = addr * alphabets[c] + x[c];
  }
  return addr;
}

double ram_score(const RamDiscriminator& disc, std::span<const std::size_t> x, bool one_bit) {
  double score = 0.0;
  for (std::size_t g = 0; g < disc.partition.size(); ++g) {
    const double entry = disc.tables.at(g).at(disc.address(g, x));
    if (one_bit) {
      score += entry == 1.0 ? 1.0 : 0.0;
    } else {
      score += entry;
    }
  }
  return score;
}

RamDiscriminator ram_train(std::vector<std::size_t> alphabets, std::vector<std::vector<std::size_t>> partition,
                           std::span<const std::vector<std::size_t>> samples, bool one_bit) {
  if (samples.empty()) throw InvalidArgument("ram_train needs at least one sample");
  RamDiscriminator disc{std::move(alphabets), std::move(partition), {}};
  for (std::size_t g = 0; g < disc.partition.size(); ++g) {
    disc.tables.emplace_back(disc.address_space(g), 0.0);
  }
  disc.validate();

  for (std::size_t g = 0; g < disc.partition.size(); ++g) {
    std::vector<std::uint64_t> counts(disc.address_space(g), 0);
    for (const auto& x : samples) ++counts[disc.address(g, x)];
    const std::uint64_t floor = stats::mean_count_ceiling(counts);
    auto& table = disc.tables[g];
    if (one_bit) {
      for (std::size_t a = 0; a < counts.size(); ++a) table[a] = counts[a] >= floor ? 1.0 : 0.0;
    } else {
      const auto reg = stats::apply_floor(counts, floor);
      const double total = static_cast<double>(std::accumulate(reg.begin(), reg.end(), std::uint64_t{0}));
      for (std::size_t a = 0; a < reg.size(); ++a) table[a] = std::log(static_cast<double>(reg[a]) / total);
    }
  }
  return disc;
}

}  // namespace ace::maxent
