#pragma once

// PGM images and the text model format.
//
// Model format (one item per line unless noted):
//
//   ACE-MODEL v1
//   width W height H layers L vq_bits V hist_bits B wedge 0|1 seed S
//   LEAF_HIST
//   <2^B counts, space separated>
//   then for each layer l = 1..L:
//     LAYER l DIR v|h OFFSET d
//     CODEBOOK N
//     <N lines: x y, 17 significant digits>
//     HIST
//     <2^B lines of 2^B counts>
//   END
//
// Counts are raw (unregularized). Lookup tables are rebuilt from the
// codebooks on load.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ace/frame.hpp"
#include "ace/pyramid.hpp"

namespace ace::io {

/// Parses binary P5 or ASCII P2 with maxval 255. Comments (#...) may appear
/// between header tokens. Throws ParseError with the failing byte offset.
Frame read_pgm(std::string_view bytes);

/// "P5\n<w> <h>\n255\n" followed by row-major bytes. The frame must be 8-bit.
std::string write_pgm(const Frame& frame);

std::string save_model(const pyramid::AceModel& model);

/// Throws ModelFormatError naming the failure (version, dimension, truncation, syntax).
pyramid::AceModel load_model(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ace::io
