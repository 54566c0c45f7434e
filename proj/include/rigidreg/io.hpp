#pragma once

#include <stdexcept>
#include <string>

#include "rigidreg/image.hpp"

namespace rigidreg {

// Recoverable file-format problem; the CLI maps this to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Supported formats:
//   PGM (P5, 8- or 16-bit big-endian samples) for 2D images;
//   RAWVOL for 3D volumes: one ASCII header line
//     "RAWVOL <nx> <ny> <nz> <dtype in {u8,u16,f32}> <T>"
//   then little-endian samples in x-fastest order.
// Intensities map to [0, 1]; `invert` applies 1 - v on read.
DiscreteImage read_image(const std::string& path, bool invert = false);

// Format chosen by extension: .pgm (2D) or .rawvol (3D, dtype f32).
void write_image(const std::string& path, const DiscreteImage& image);

bool looks_like_pgm(const std::string& path);

}  // namespace rigidreg
