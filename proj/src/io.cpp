#include "ace/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ace/error.hpp"

namespace ace::io {

// --- PGM --------------------------------------------------------------------

namespace {

class PgmScanner {
 public:
  explicit PgmScanner(std::string_view bytes) : bytes_(bytes) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    if (pos_ >= bytes_.size()) throw ParseError(std::string("unexpected end of data reading ") + what, pos_);
    unsigned long value = 0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), value);
    if (ec != std::errc() || ptr == bytes_.data() + pos_) {
      throw ParseError(std::string("expected a decimal ") + what, start);
    }
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return value;
  }

  void expect_single_whitespace() {
    if (pos_ >= bytes_.size()) throw ParseError("unexpected end of data after header", pos_);
    const char c = bytes_[pos_];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') throw ParseError("expected whitespace after maxval", pos_);
    ++pos_;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Frame read_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw ParseError("not a P5 or P2 PGM file", 0);
  }
  const bool binary = bytes[1] == '5';
  PgmScanner scan(bytes.substr(2));
  const std::size_t base = 2;

  const std::size_t width_at = base + scan.pos();
  const unsigned long width = scan.number("width");
  const unsigned long height = scan.number("height");
  if (width == 0 || height == 0 || width > 65535 || height > 65535) {
    throw ParseError("image dimensions must be in [1, 65535]", width_at);
  }
  scan.skip_space_and_comments();
  const std::size_t maxval_at = base + scan.pos();
  const unsigned long maxval = scan.number("maxval");
  if (maxval != 255) throw ParseError("unsupported maxval " + std::to_string(maxval) + " (only 255)", maxval_at);

  Frame frame(static_cast<int>(width), static_cast<int>(height), 8);
  if (binary) {
    scan.expect_single_whitespace();
    const std::string_view data = scan.rest();
    if (data.size() < frame.size()) {
      throw ParseError("truncated pixel data: need " + std::to_string(frame.size()) + " bytes, have " +
                           std::to_string(data.size()),
                       base + scan.pos() + data.size());
    }
    for (std::size_t i = 0; i < frame.size(); ++i) frame.codes[i] = static_cast<unsigned char>(data[i]);
  } else {
    for (std::size_t i = 0; i < frame.size(); ++i) {
      scan.skip_space_and_comments();
      const std::size_t at = base + scan.pos();
      const unsigned long v = scan.number("sample");
      if (v > 255) throw ParseError("sample " + std::to_string(v) + " exceeds maxval", at);
      frame.codes[i] = static_cast<std::uint16_t>(v);
    }
  }
  return frame;
}

std::string write_pgm(const Frame& frame) {
  frame.validate();
  if (frame.bits != 8) throw InvalidArgument("PGM output needs an 8-bit frame");
  std::string out = "P5\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  out.reserve(out.size() + frame.size());
  for (std::uint16_t c : frame.codes) out.push_back(static_cast<char>(c));
  return out;
}

// --- model files ------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("failed to format a codebook value");
  return std::string(buf, ptr);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::size_t line_number() const noexcept { return line_; }

  std::string_view next(const char* expecting) {
    if (pos_ >= text_.size()) {
      throw ModelFormatError(ModelFormatError::Kind::kTruncated,
                             std::string("model file truncated: expected ") + expecting + " at line " +
                                 std::to_string(line_ + 1));
    }
    const std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) {
      throw ModelFormatError(ModelFormatError::Kind::kTruncated,
                             "model file truncated: line " + std::to_string(line_ + 1) + " is unterminated");
    }
    std::string_view line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_;
    return line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void syntax(const std::string& what, std::size_t line) {
  throw ModelFormatError(ModelFormatError::Kind::kSyntax, what + " at line " + std::to_string(line));
}

[[noreturn]] void dimension(const std::string& what, std::size_t line) {
  throw ModelFormatError(ModelFormatError::Kind::kDimension, what + " at line " + std::to_string(line));
}

template <typename T>
T parse_int(std::string_view tok, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    syntax("expected an integer, found '" + std::string(tok) + "'", line);
  }
  return value;
}

double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    syntax("expected a number, found '" + std::string(tok) + "'", line);
  }
  return value;
}

void expect_keyword(std::string_view line, std::string_view keyword, std::size_t line_no) {
  if (line != keyword) syntax("expected '" + std::string(keyword) + "'", line_no);
}

std::vector<std::uint64_t> parse_counts(std::string_view line, std::size_t expected, std::size_t line_no) {
  const auto toks = split(line);
  if (toks.size() != expected) {
    dimension("expected " + std::to_string(expected) + " counts, found " + std::to_string(toks.size()), line_no);
  }
  std::vector<std::uint64_t> counts;
  counts.reserve(expected);
  for (auto t : toks) counts.push_back(parse_int<std::uint64_t>(t, line_no));
  return counts;
}

void write_counts(std::ostringstream& os, const std::uint64_t* begin, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ' ';
    os << begin[i];
  }
  os << '\n';
}

}  // namespace

std::string save_model(const pyramid::AceModel& model) {
  const auto& c = model.config;
  std::ostringstream os;
  os << "ACE-MODEL v1\n";
  os << "width " << model.width << " height " << model.height << " layers " << c.layers << " vq_bits "
     << c.vq_bits << " hist_bits " << c.hist_bits << " wedge " << (c.wedge ? 1 : 0) << " seed " << c.seed << '\n';
  os << "LEAF_HIST\n";
  write_counts(os, model.leaf_hist.counts.data(), model.leaf_hist.bins());
  for (const auto& layer : model.layers) {
    const auto& g = layer.geometry;
    os << "LAYER " << g.level << " DIR " << pyramid::direction_code(g.direction) << " OFFSET " << g.offset << '\n';
    os << "CODEBOOK " << layer.codebook.size() << '\n';
    for (const auto& v : layer.codebook.vectors) os << format_double(v.x) << ' ' << format_double(v.y) << '\n';
    os << "HIST\n";
    const std::size_t side = layer.hist.side();
    for (std::size_t a = 0; a < side; ++a) write_counts(os, layer.hist.counts.data() + a * side, side);
  }
  os << "END\n";
  return os.str();
}

pyramid::AceModel load_model(std::string_view text) {
  using Kind = ModelFormatError::Kind;
  LineReader in(text);

  const std::string_view magic = in.next("the ACE-MODEL header");
  if (magic != "ACE-MODEL v1") {
    if (magic.substr(0, 9) == "ACE-MODEL") {
      throw ModelFormatError(Kind::kVersionMismatch, "unsupported model version '" + std::string(magic) + "'");
    }
    syntax("not an ACE model file", 1);
  }

  const std::string_view cfg_line = in.next("the configuration line");
  const auto toks = split(cfg_line);
  static const char* kKeys[] = {"width", "height", "layers", "vq_bits", "hist_bits", "wedge", "seed"};
  if (toks.size() != 14) syntax("malformed configuration line", in.line_number());
  for (std::size_t i = 0; i < 7; ++i) {
    if (toks[2 * i] != kKeys[i]) syntax("expected key '" + std::string(kKeys[i]) + "'", in.line_number());
  }
  pyramid::AceModel model;
  model.width = parse_int<int>(toks[1], in.line_number());
  model.height = parse_int<int>(toks[3], in.line_number());
  auto& cfg = model.config;
  cfg.layers = parse_int<int>(toks[5], in.line_number());
  cfg.vq_bits = parse_int<int>(toks[7], in.line_number());
  cfg.hist_bits = parse_int<int>(toks[9], in.line_number());
  const int wedge = parse_int<int>(toks[11], in.line_number());
  if (wedge != 0 && wedge != 1) syntax("wedge must be 0 or 1", in.line_number());
  cfg.wedge = wedge == 1;
  cfg.seed = parse_int<std::uint64_t>(toks[13], in.line_number());
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    dimension(e.what(), in.line_number());
  }
  if (model.width < 1 || model.height < 1) dimension("image dimensions must be >= 1", in.line_number());

  const std::size_t hist_side = std::size_t{1} << cfg.hist_bits;
  expect_keyword(in.next("LEAF_HIST"), "LEAF_HIST", in.line_number());
  model.leaf_hist = stats::Histogram1D(cfg.hist_bits);
  model.leaf_hist.counts = parse_counts(in.next("leaf histogram counts"), hist_side, in.line_number());
  for (auto c : model.leaf_hist.counts) model.leaf_hist.total += c;

  const std::size_t codebook_size = std::size_t{1} << cfg.vq_bits;
  for (int l = 1; l <= cfg.layers; ++l) {
    const auto layer_toks = split(in.next("a LAYER line"));
    const std::size_t ln = in.line_number();
    if (layer_toks.size() == 1 && layer_toks[0] == "END") {
      dimension("model declares " + std::to_string(cfg.layers) + " layers but ends after " + std::to_string(l - 1),
                ln);
    }
    if (layer_toks.size() != 6 || layer_toks[0] != "LAYER" || layer_toks[2] != "DIR" || layer_toks[4] != "OFFSET" ||
        layer_toks[3].size() != 1) {
      syntax("malformed LAYER line", ln);
    }
    if (parse_int<int>(layer_toks[1], ln) != l) dimension("expected layer " + std::to_string(l), ln);
    pyramid::Direction dir{};
    try {
      dir = pyramid::direction_from_code(layer_toks[3][0]);
    } catch (const InvalidArgument& e) {
      syntax(e.what(), ln);
    }
    if (l == 1) cfg.first_direction = dir;
    const auto geom = pyramid::layer_geometry(l, cfg.first_direction);
    if (geom.direction != dir || geom.offset != parse_int<int>(layer_toks[5], ln)) {
      dimension("layer " + std::to_string(l) + " geometry does not follow the alternating sequence", ln);
    }

    const auto cb_toks = split(in.next("a CODEBOOK line"));
    if (cb_toks.size() != 2 || cb_toks[0] != "CODEBOOK") syntax("malformed CODEBOOK line", in.line_number());
    if (parse_int<std::size_t>(cb_toks[1], in.line_number()) != codebook_size) {
      dimension("codebook size must be 2^vq_bits = " + std::to_string(codebook_size), in.line_number());
    }
    vq::Codebook cb;
    cb.vectors.reserve(codebook_size);
    for (std::size_t i = 0; i < codebook_size; ++i) {
      const auto v = split(in.next("a codebook vector"));
      if (v.size() != 2) dimension("codebook vectors need two coordinates", in.line_number());
      cb.vectors.push_back({parse_double(v[0], in.line_number()), parse_double(v[1], in.line_number())});
    }

    expect_keyword(in.next("HIST"), "HIST", in.line_number());
    stats::Histogram2D hist(cfg.hist_bits);
    for (std::size_t a = 0; a < hist_side; ++a) {
      const auto row = parse_counts(in.next("histogram rows"), hist_side, in.line_number());
      for (std::size_t b = 0; b < hist_side; ++b) {
        hist.counts[a * hist_side + b] = row[b];
        hist.total += row[b];
      }
    }
    vq::Lut lut(cb, cfg.vq_bits);
    model.layers.push_back(pyramid::Layer{geom, std::move(cb), std::move(lut), std::move(hist)});
  }

  const std::string_view end = in.next("END");
  if (end != "END") syntax("expected END", in.line_number());
  return model;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace ace::io
