#include "rigidreg/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace rigidreg {

namespace {

// Skip PGM whitespace and '#' comments between header tokens.
std::string next_token(std::istream& in) {
  std::string tok;
  for (;;) {
    const int c = in.peek();
    if (c == EOF) throw IoError("unexpected end of header");
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  in >> tok;
  return tok;
}

DiscreteImage read_pgm(std::istream& in, const std::string& path, bool invert) {
  std::string magic = next_token(in);
  if (magic != "P5") throw IoError(path + ": not a binary PGM (P5) file");
  const int nx = std::stoi(next_token(in));
  const int ny = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (nx < 1 || ny < 1 || maxval < 1 || maxval > 65535)
    throw IoError(path + ": malformed PGM header");
  in.get();  // the single whitespace byte after maxval

  DiscreteImage img(2, Index{nx, ny, 1}, 1.0);
  const std::size_t count = img.size();
  if (maxval < 256) {
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
      throw IoError(path + ": truncated PGM payload");
    for (std::size_t i = 0; i < count; ++i) img.samples()[i] = raw[i] / double(maxval);
  } else {
    // 16-bit PGM samples are big-endian per the de-facto standard
    std::vector<unsigned char> raw(count * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw IoError(path + ": truncated PGM payload");
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
      img.samples()[i] = v / double(maxval);
    }
  }
  if (invert)
    for (auto& v : img.samples()) v = 1.0 - v;
  return img;
}

// Optional colour input: P6 is reduced to grayscale with luminance weights.
DiscreteImage read_ppm(std::istream& in, const std::string& path, bool invert) {
  std::string magic = next_token(in);
  if (magic != "P6") throw IoError(path + ": not a binary PPM (P6) file");
  const int nx = std::stoi(next_token(in));
  const int ny = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (nx < 1 || ny < 1 || maxval < 1 || maxval > 255)
    throw IoError(path + ": malformed or unsupported PPM header");
  in.get();
  DiscreteImage img(2, Index{nx, ny, 1}, 1.0);
  std::vector<unsigned char> raw(img.size() * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw IoError(path + ": truncated PPM payload");
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double lum =
        0.299 * raw[3 * i] + 0.587 * raw[3 * i + 1] + 0.114 * raw[3 * i + 2];
    img.samples()[i] = lum / maxval;
  }
  if (invert)
    for (auto& v : img.samples()) v = 1.0 - v;
  return img;
}

DiscreteImage read_rawvol(std::istream& in, const std::string& path, bool invert) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing RAWVOL header");
  std::istringstream header(line);
  std::string magic, dtype;
  int nx = 0, ny = 0, nz = 0;
  double period = 0;
  header >> magic >> nx >> ny >> nz >> dtype >> period;
  if (magic != "RAWVOL" || header.fail()) throw IoError(path + ": malformed RAWVOL header");
  if (nx < 1 || ny < 1 || nz < 1 || !(period > 0))
    throw IoError(path + ": malformed RAWVOL header");

  DiscreteImage img(3, Index{nx, ny, nz}, period);
  const std::size_t count = img.size();
  auto read_exact = [&](void* dst, std::size_t bytes) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes)
      throw IoError(path + ": truncated RAWVOL payload");
  };
  if (dtype == "u8") {
    std::vector<unsigned char> raw(count);
    read_exact(raw.data(), count);
    for (std::size_t i = 0; i < count; ++i) img.samples()[i] = raw[i] / 255.0;
  } else if (dtype == "u16") {
    std::vector<unsigned char> raw(count * 2);
    read_exact(raw.data(), raw.size());
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = unsigned(raw[2 * i]) | (unsigned(raw[2 * i + 1]) << 8);
      img.samples()[i] = v / 65535.0;
    }
  } else if (dtype == "f32") {
    std::vector<float> raw(count);
    read_exact(raw.data(), count * sizeof(float));
    for (std::size_t i = 0; i < count; ++i) img.samples()[i] = raw[i];
  } else {
    throw IoError(path + ": unknown RAWVOL dtype '" + dtype + "'");
  }
  if (invert)
    for (auto& v : img.samples()) v = 1.0 - v;
  return img;
}

}  // namespace

bool looks_like_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  return magic[0] == 'P' && magic[1] == '5';
}

DiscreteImage read_image(const std::string& path, bool invert) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  char magic[6] = {};
  in.read(magic, 6);
  in.seekg(0);
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(in, path, invert);
  if (magic[0] == 'P' && magic[1] == '6') return read_ppm(in, path, invert);
  if (std::string(magic, 6) == "RAWVOL") return read_rawvol(in, path, invert);
  throw IoError(path + ": unrecognized image format (expected PGM P5, PPM P6 or RAWVOL)");
}

void write_image(const std::string& path, const DiscreteImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  if (image.dims() == 2) {
    out << "P5\n" << image.extent(0) << " " << image.extent(1) << "\n65535\n";
    for (double v : image.samples()) {
      const double clamped = std::min(1.0, std::max(0.0, v));
      const unsigned q = static_cast<unsigned>(clamped * 65535.0 + 0.5);
      out.put(static_cast<char>((q >> 8) & 0xff));
      out.put(static_cast<char>(q & 0xff));
    }
  } else {
    out << "RAWVOL " << image.extent(0) << " " << image.extent(1) << " " << image.extent(2)
        << " f32 " << image.period() << "\n";
    for (double v : image.samples()) {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof(float));
    }
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace rigidreg
