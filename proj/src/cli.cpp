#include "ace/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>

#include "ace/error.hpp"
#include "ace/io.hpp"
#include "ace/probimage.hpp"
#include "ace/pyramid.hpp"

namespace ace::cli {

namespace {

namespace fs = std::filesystem;

std::string fixed(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

struct TrainArgs {
  std::string input;
  std::string output;
  int layers = 8;
  int vq_bits = 8;
  int hist_bits = 6;
  std::uint64_t seed = 1;
  bool no_wedge = false;
  std::string first_direction = "v";
};

struct ScoreArgs {
  std::string model;
  std::string input;
  std::string out_dir;
  std::string mode = "anomaly";
  bool combined = false;
};

struct InfoArgs {
  std::string model;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  pyramid::AceConfig cfg;
  cfg.layers = a.layers;
  cfg.vq_bits = a.vq_bits;
  cfg.hist_bits = a.hist_bits;
  cfg.seed = a.seed;
  cfg.wedge = !a.no_wedge;
  cfg.first_direction = pyramid::direction_from_code(a.first_direction.at(0));

  const Frame img = io::read_pgm(io::read_file(a.input));
  const pyramid::AceModel model = pyramid::train_model(img, cfg);
  io::write_file(a.output, io::save_model(model));

  const auto frames = pyramid::propagate(model, img);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    std::vector<vq::Vec2> data;
    for (const auto& p : pyramid::layer_pairs(frames[l], layer.geometry)) {
      data.push_back({static_cast<double>(p.a), static_cast<double>(p.b)});
    }
    out << "layer " << layer.geometry.level << " field " << layer.geometry.field_w << "x" << layer.geometry.field_h
        << " distortion " << fixed("%.6g", vq::distortion(layer.codebook, data)) << '\n';
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "wall_time_s " << fixed("%.3f", secs) << '\n';
  return 0;
}

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const pyramid::AceModel model = io::load_model(io::read_file(a.model));
  const Frame img = io::read_pgm(io::read_file(a.input));
  const auto frames = pyramid::propagate(model, img);
  const auto sources = probimage::compute_sources(model, frames);
  const auto geoms = model.geometries();
  const bool invert = a.mode == "anomaly";

  fs::create_directories(a.out_dir);
  for (std::size_t l = 0; l < sources.size(); ++l) {
    char name[32];
    std::snprintf(name, sizeof name, "layer_%02zu.pgm", l);
    const auto image = probimage::layer_image(sources, static_cast<int>(l), geoms);
    io::write_file(fs::path(a.out_dir) / name, io::write_pgm(probimage::to_display(image, invert)));
  }
  if (a.combined) {
    const auto image = probimage::backpropagate(sources, geoms);
    io::write_file(fs::path(a.out_dir) / "combined.pgm", io::write_pgm(probimage::to_display(image, invert)));
  }
  const double total = probimage::total_logprob(sources);
  out << "total_logprob " << fixed("%.9g", total) << '\n';
  out << "per_pixel_logprob " << fixed("%.9g", total / static_cast<double>(img.size())) << '\n';
  return 0;
}

int cmd_info(const InfoArgs& a, std::ostream& out) {
  const pyramid::AceModel model = io::load_model(io::read_file(a.model));
  const auto& c = model.config;
  out << "image " << model.width << "x" << model.height << '\n';
  out << "layers " << c.layers << " vq_bits " << c.vq_bits << " hist_bits " << c.hist_bits << " wedge "
      << (c.wedge ? 1 : 0) << " seed " << c.seed << '\n';
  const auto occupancy = [](const std::vector<std::uint64_t>& counts) {
    std::size_t nonzero = 0;
    for (auto v : counts) nonzero += v != 0;
    return static_cast<double>(nonzero) / static_cast<double>(counts.size());
  };
  out << "leaf hist_occupancy " << fixed("%.6g", occupancy(model.leaf_hist.counts)) << '\n';
  for (const auto& layer : model.layers) {
    const auto& g = layer.geometry;
    double x0 = layer.codebook.vectors[0].x, x1 = x0, y0 = layer.codebook.vectors[0].y, y1 = y0;
    for (const auto& v : layer.codebook.vectors) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
    out << "layer " << g.level << " dir " << pyramid::direction_code(g.direction) << " offset " << g.offset
        << " field " << g.field_w << "x" << g.field_h << " hist_occupancy " << fixed("%.6g", occupancy(layer.hist.counts))
        << " codebook_span [" << fixed("%.4g", x0) << ", " << fixed("%.4g", x1) << "] x [" << fixed("%.4g", y0)
        << ", " << fixed("%.4g", y1) << "]\n";
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical maximum-entropy texture model: train, score, inspect"};
  app.name("ace");
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a model on a PGM image");
  t->add_option("--input", train.input, "Training image (PGM)")->required();
  t->add_option("--output", train.output, "Model file to write")->required();
  t->add_option("--layers", train.layers, "Number of pyramid layers")->capture_default_str();
  t->add_option("--vq-bits", train.vq_bits, "Bits per code for vector quantisation")->capture_default_str();
  t->add_option("--hist-bits", train.hist_bits, "Bits per code for histogramming")->capture_default_str();
  t->add_option("--seed", train.seed, "Training seed")->capture_default_str();
  t->add_flag("--no-wedge", train.no_wedge, "Skip grey-wedge (plane) correction");
  t->add_option("--first-direction", train.first_direction, "First pairing direction")
      ->check(CLI::IsMember({"v", "h"}))
      ->capture_default_str();

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Write per-layer probability or anomaly images");
  s->add_option("--model", score.model, "Model file")->required();
  s->add_option("--input", score.input, "Image to score (PGM)")->required();
  s->add_option("--out-dir", score.out_dir, "Output directory")->required();
  s->add_option("--mode", score.mode, "Display mode")
      ->check(CLI::IsMember({"anomaly", "probability"}))
      ->capture_default_str();
  s->add_flag("--combined", score.combined, "Also write the full backpropagated image");

  InfoArgs info;
  auto* i = app.add_subcommand("info", "Describe a model file");
  i->add_option("--model", info.model, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* candidate : {t, s, i}) {
      if (candidate->parsed()) sub = candidate;
    }
    err << (sub ? sub->help() : app.help());
    return 2;
  }

  try {
    if (t->parsed()) return cmd_train(train, out);
    if (s->parsed()) return cmd_score(score, out);
    return cmd_info(info, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ace::cli
