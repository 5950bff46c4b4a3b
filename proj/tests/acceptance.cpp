// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ace/cli.hpp"
#include "ace/io.hpp"
#include "ace/maxent.hpp"
#include "ace/probimage.hpp"
#include "ace/rng.hpp"
#include "ace/stats.hpp"
#include "cluster_fixtures.hpp"
#include "texture_fixtures.hpp"

using namespace ace;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- maxent

struct Instance {
  maxent::TreeSpec tree;
  maxent::DiscreteDist emp;
};

// Even instances use identity maps; odd ones random many-to-one maps.
std::vector<Instance> oracle_instances(int n) {
  Rng rng(2024);
  std::vector<Instance> out;
  for (int i = 0; i < n; ++i) {
    std::vector<maxent::NodeMap> maps(3);
    const std::size_t parent = i % 2 ? 2 + rng.below(2) : 4;
    maps[1] = {parent, {}};
    maps[2] = {parent, {}};
    for (std::size_t k : {1, 2}) {
      for (std::size_t j = 0; j < 4; ++j) maps[k].table.push_back(i % 2 ? rng.below(parent) : j);
    }
    const std::size_t root = i % 2 ? 3 : parent * parent;
    maps[0] = {root, {}};
    for (std::size_t j = 0; j < parent * parent; ++j) maps[0].table.push_back(i % 2 ? rng.below(root) : j);
    maxent::TreeSpec tree(2, {2, 2, 2, 2}, maps);
    std::vector<double> w(16);
    for (auto& v : w) v = rng.uniform() < 0.1 ? 0.0 : rng.uniform();
    w[rng.below(16)] += 0.5;
    out.push_back({std::move(tree), maxent::DiscreteDist::from_weights({2, 2, 2, 2}, w)});
  }
  return out;
}

std::vector<double> brute_pair(const maxent::TreeSpec& tree, const maxent::DiscreteDist& d, std::size_t k) {
  const std::size_t l = 2 * k, r = 2 * k + 1;
  std::vector<double> out(tree.alphabet(l) * tree.alphabet(r), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto v = tree.node_values(d.states_of(i));
    out[v[l] * tree.alphabet(r) + v[r]] += d[i];
  }
  return out;
}

void criterion_1(const std::vector<Instance>& inst) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int unconverged = 0;
  for (const auto& in : inst) {
    const auto q = maxent::tree_mem(in.tree, in.emp);
    const auto ipf = maxent::ipf_oracle(in.tree, in.emp, 500, 1e-14);
    unconverged += !ipf.converged;
    for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(q[i] - ipf.dist[i]));
  }
  const double secs = seconds_since(t0);
  report(1, "oracle equivalence", worst <= 1e-6 && secs < 10.0,
         fmt("%.0f instances, max |tree_mem - ipf| = %.3g, %.2f s", static_cast<double>(inst.size()), worst, secs) +
             (unconverged ? ", " + std::to_string(unconverged) + " IPF runs hit max_iter" : ""));
}

void criterion_2(const std::vector<Instance>& inst) {
  double sum_err = 0.0, marg_err = 0.0, kl_max = 0.0;
  for (const auto& in : inst) {
    const auto q = maxent::tree_mem(in.tree, in.emp);
    sum_err = std::max(sum_err, std::abs(std::accumulate(q.probs().begin(), q.probs().end(), 0.0) - 1.0));
    for (std::size_t k : in.tree.post_order()) {
      const auto a = brute_pair(in.tree, q, k), b = brute_pair(in.tree, in.emp, k);
      for (std::size_t i = 0; i < a.size(); ++i) marg_err = std::max(marg_err, std::abs(a[i] - b[i]));
    }
    // q lies in the product family by construction, so re-estimating it must return q.
    kl_max = std::max(kl_max, maxent::kl_divergence(q, maxent::tree_mem(in.tree, q)));
  }
  report(2, "exactness", sum_err <= 1e-10 && marg_err <= 1e-10 && kl_max <= 1e-10,
         fmt("max |sum - 1| = %.3g, max marginal error = %.3g, max KL on factorizing = %.3g", sum_err, marg_err, kl_max));
}

// ---------------------------------------------------------------- probimage

void criterion_3() {
  Rng rng(77);
  double bp = 0.0, co = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Frame train(32, 32, 8), test(32, 32, 8);
    for (auto& v : train.codes) v = static_cast<std::uint16_t>(rng.below(256));
    for (auto& v : test.codes) v = static_cast<std::uint16_t>(rng.below(256));
    pyramid::AceConfig c;
    c.layers = 4;
    c.seed = static_cast<std::uint64_t>(trial) + 1;
    const auto model = pyramid::train_model(train, c);
    const auto src = probimage::compute_sources(model, pyramid::propagate(model, test));
    const double total = probimage::total_logprob(src);
    bp = std::max(bp, std::abs(probimage::backpropagate(src, model.geometries()).sum() - total) / std::abs(total));
    co = std::max(co, std::abs(probimage::cooccurrence_form(src, model.geometries()) - total) / std::abs(total));
  }
  report(3, "backpropagation identity", bp <= 1e-9 && co <= 1e-9,
         fmt("20 pairs, max rel error backprop %.3g, co-occurrence form %.3g", bp, co));
}

// ---------------------------------------------------------------- vq

void criterion_4() {
  Rng rng(4);
  int monotone = 0;
  for (int d = 0; d < 50; ++d) {
    std::vector<vq::Vec2> data(100 + rng.below(200));
    for (auto& v : data) v = {rng.uniform() * 255, rng.uniform() * 255};
    vq::Codebook cb;
    const std::size_t n = 2 + rng.below(15);
    for (std::size_t i = 0; i < n; ++i) cb.vectors.push_back(data[rng.below(data.size())]);
    const auto r = vq::lbg_train(data, cb, 20);
    bool ok = true;
    for (std::size_t i = 1; i < r.trace.size(); ++i) ok = ok && r.trace[i] <= r.trace[i - 1];
    monotone += ok;
  }

  const auto det_data = fixtures::two_clusters(99, 400).all;
  const vq::TrainSchedule s{6, 20, 42};
  const bool deterministic = vq::train_topographic(det_data, s) == vq::train_topographic(det_data, s);

  int split = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = fixtures::two_clusters(seed * 101, 400);
    split += fixtures::codes_split_clusters(c, vq::train_topographic(c.all, vq::TrainSchedule{1, 20, seed}));
  }
  report(4, "vq behaviour", monotone == 50 && deterministic && split >= 9,
         fmt("monotone traces %.0f/50, deterministic %.0f, cluster split %.0f/10 seeds", monotone, deterministic, split));
}

// ---------------------------------------------------------------- pyramid

void criterion_5() {
  const char* expected[] = {"1x2", "2x2", "2x4", "4x4", "4x8", "8x8", "8x16", "16x16"};
  std::string got;
  bool ok = true;
  for (int l = 1; l <= 8; ++l) {
    const auto g = pyramid::layer_geometry(l);
    const std::string f = std::to_string(g.field_w) + "x" + std::to_string(g.field_h);
    ok = ok && f == expected[l - 1];
    got += (l > 1 ? " " : "") + f;
  }
  report(5, "geometry", ok, got);
}

// ---------------------------------------------------------------- anomaly detection

struct Scored {
  Frame display;
  double seconds;
};

Scored anomaly_layer(const Frame& train, const Frame& test, int layers, std::uint64_t seed) {
  const auto t0 = Clock::now();
  pyramid::AceConfig c;
  c.layers = layers;
  c.seed = seed;
  const auto model = pyramid::train_model(train, c);
  const auto src = probimage::compute_sources(model, pyramid::propagate(model, test));
  const auto img = probimage::layer_image(src, layers, model.geometries());
  return {probimage::to_display(img, true), seconds_since(t0)};
}

void criterion_6() {
  int hits = 0;
  double secs = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto train = fixtures::periodic_texture(128, 128, seed, 0.1);
    const int px = 20 + static_cast<int>(seed * 37 % 80), py = 20 + static_cast<int>(seed * 53 % 80);
    const auto test = fixtures::plant_permuted_patch(train, px, py, 8, seed + 100);
    const auto s = anomaly_layer(train, test, 6, seed);
    secs += s.seconds;
    hits += fixtures::inside_dilated(fixtures::argmax(s.display), px, py, 8, 4);
  }
  report(6, "planted anomaly", hits >= 9 && secs < 60.0,
         fmt("layer-6 argmax inside dilated patch for %.0f/10 seeds, %.2f s total", hits, secs));
}

void criterion_7() {
  int hits = 0;
  double secs = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto base = fixtures::sawtooth_texture(128, 128, seed, 0.1);
    const auto train = fixtures::half_montage(base, 0);
    const auto test = fixtures::plant_flipped_patch(fixtures::half_montage(base, 64), 48, 48, 32);
    // a 32x32 receptive field is layer 10
    const auto s = anomaly_layer(train, test, 10, seed);
    secs += s.seconds;
    hits += fixtures::inside_dilated(fixtures::argmax(s.display), 48, 48, 32, 4);
  }
  report(7, "montage protocol", hits >= 9 && secs < 60.0,
         fmt("layer-10 argmax inside dilated flipped patch for %.0f/10 seeds, %.2f s total", hits, secs));
}

// ---------------------------------------------------------------- stats

void criterion_8() {
  auto hist = [](int bits, std::vector<std::uint64_t> c) {
    stats::Histogram2D h(bits);
    h.counts = std::move(c);
    h.total = std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0});
    return h;
  };
  bool ok = true;
  const auto r = stats::regularize(hist(1, {0, 1, 2, 9}));
  ok = ok && r.counts == std::vector<std::uint64_t>{3, 3, 3, 9};
  ok = ok && stats::regularize(hist(1, {4, 4, 4, 4})).counts == std::vector<std::uint64_t>{4, 4, 4, 4};
  ok = ok && stats::regularize(hist(1, {1, 1, 1, 1})).counts == std::vector<std::uint64_t>{1, 1, 1, 1};
  const auto big = hist(2, {1, 2, 0, 0, 3, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5});
  ok = ok && stats::rebin(big, 1).counts == std::vector<std::uint64_t>{10, 0, 0, 5};
  ok = ok && stats::rebin(big, 0) == big;
  ok = ok && std::abs(stats::pair_log_source(hist(1, {2, 1, 1, 2}), 0, 0) - std::log(4.0 / 3.0)) < 1e-15;
  stats::Histogram1D leaf(1);
  leaf.add(0), leaf.add(0), leaf.add(0), leaf.add(1);
  ok = ok && std::abs(stats::leaf_log_prob(stats::regularize(leaf), 0) - std::log(3.0 / 5.0)) < 1e-15;
  const bool examples = ok;

  Rng rng(8);
  bool idempotent = true, totals = true;
  for (int trial = 0; trial < 100; ++trial) {
    stats::Histogram2D h(4);
    const std::size_t n = 1 + rng.below(2000);
    for (std::size_t i = 0; i < n; ++i) h.add(static_cast<std::uint32_t>(rng.below(16)), static_cast<std::uint32_t>(rng.below(16)));
    const auto once = stats::regularize(h);
    idempotent = idempotent && stats::regularize(once) == once;
    for (int b = 0; b <= 4; ++b) totals = totals && stats::rebin(h, b).total == h.total;
  }
  report(8, "regularization and rebinning", examples && idempotent && totals,
         fmt("worked examples %.0f, idempotent %.0f, rebin totals %.0f (100 random histograms)", examples, idempotent,
             totals));
}

// ---------------------------------------------------------------- pipeline

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void criterion_9() {
  const fs::path root = fs::temp_directory_path() / "ace_acceptance_pipeline";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto img = fixtures::periodic_texture(64, 64, 3, 0.1);
  io::write_file(root / "train.pgm", io::write_pgm(img));
  io::write_file(root / "test.pgm", io::write_pgm(fixtures::plant_permuted_patch(img, 10, 30, 8, 1)));

  bool ok = true;
  for (const char* run : {"a", "b"}) {
    const fs::path d = root / run;
    fs::create_directories(d);
    ok = ok && run_cli({"train", "--input", (root / "train.pgm").string(), "--output", (d / "model.txt").string(),
                        "--layers", "6", "--seed", "11"}) == 0;
    ok = ok && run_cli({"score", "--model", (d / "model.txt").string(), "--input", (root / "test.pgm").string(),
                        "--out-dir", (d / "out").string(), "--combined"}) == 0;
  }
  std::size_t compared = 0;
  if (ok) {
    ok = io::read_file(root / "a" / "model.txt") == io::read_file(root / "b" / "model.txt");
    for (const auto& e : fs::directory_iterator(root / "a" / "out")) {
      ok = ok && io::read_file(e.path()) == io::read_file(root / "b" / "out" / e.path().filename());
      ++compared;
    }
    ok = ok && compared == 8;
  }
  fs::remove_all(root);
  report(9, "pipeline determinism", ok,
         "model files and " + std::to_string(compared) + " output images byte-identical across two runs");
}

}  // namespace

int main() {
  const auto instances = oracle_instances(120);
  const std::vector<std::function<void()>> criteria = {
      [&] { criterion_1(instances); }, [&] { criterion_2(instances); }, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion (exception): %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
