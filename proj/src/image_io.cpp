#include "dpps/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dpps {

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
        tok.push_back(static_cast<char>(in.get()));
      return tok;
    }
  }
  throw IoError(path + ": truncated netpbm header");
}

long parse_long(const std::string& tok, const std::string& path, const char* what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": bad " + what + " in netpbm header: '" + tok + "'");
  }
}

std::vector<std::uint8_t> read_pnm_payload(const std::string& path, Shape& shape, bool& color) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");

  const std::string magic = next_token(in, path);
  if (magic == "P5")
    color = false;
  else if (magic == "P6")
    color = true;
  else
    throw IoError(path + ": unsupported netpbm magic '" + magic + "' (want P5 or P6)");

  const long w = parse_long(next_token(in, path), path, "width");
  const long h = parse_long(next_token(in, path), path, "height");
  const long maxval = parse_long(next_token(in, path), path, "maxval");
  if (w < 1 || h < 1) throw IoError(path + ": non-positive image dimensions");
  if (maxval != 255)
    throw IoError(path + ": unsupported maxval " + std::to_string(maxval) + " (only 255)");
  in.get();  // single whitespace byte after maxval

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * (color ? 3 : 1);
  std::vector<std::uint8_t> bytes(n);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError(path + ": truncated pixel payload (expected " + std::to_string(n) + " bytes)");

  shape = color ? Shape{h, w, 3} : Shape{h, w};
  return bytes;
}

void write_pnm(const std::string& path, const Shape& shape, const std::vector<std::uint8_t>& bytes) {
  const bool color = shape.size() == 3;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << (color ? "P6" : "P5") << "\n" << shape[1] << " " << shape[0] << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace

SignalField read_image(const std::string& path) {
  Shape shape;
  bool color = false;
  const std::vector<std::uint8_t> bytes = read_pnm_payload(path, shape, color);
  Vec data(static_cast<Index>(bytes.size()));
  for (std::size_t i = 0; i < bytes.size(); ++i)
    data[static_cast<Index>(i)] = static_cast<double>(bytes[i]) / 255.0;
  return SignalField(std::move(shape), std::move(data));
}

void write_image(const std::string& path, const SignalField& field) {
  require(field.shape.size() == 2 || (field.shape.size() == 3 && field.shape[2] == 3),
          "write_image: shape must be [H,W] or [H,W,3], got " + shape_str(field.shape));
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(field.size()));
  for (Index i = 0; i < field.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, field.data[i]));
    bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  write_pnm(path, field.shape, bytes);
}

std::vector<std::uint8_t> read_mask_pgm(const std::string& path, Shape& image_shape) {
  Shape shape;
  bool color = false;
  const std::vector<std::uint8_t> bytes = read_pnm_payload(path, shape, color);
  if (color) throw IoError(path + ": masks must be P5 grayscale");
  std::vector<std::uint8_t> mask(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) mask[i] = bytes[i] >= 128 ? 1 : 0;
  image_shape = shape;
  return mask;
}

void write_mask_pgm(const std::string& path, const Shape& field_shape,
                    const std::vector<std::uint8_t>& pixel_mask) {
  Shape img;
  if (field_shape.size() == 1)
    img = {1, field_shape[0]};
  else
    img = {field_shape[0], field_shape[1]};
  require(static_cast<Index>(pixel_mask.size()) == img[0] * img[1],
          "write_mask_pgm: mask length does not match shape");
  std::vector<std::uint8_t> bytes(pixel_mask.size());
  for (std::size_t i = 0; i < pixel_mask.size(); ++i) bytes[i] = pixel_mask[i] ? 255 : 0;
  write_pnm(path, img, bytes);
}

Vec read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line.rfind("value", 0) != 0)
    throw IoError(path + ": expected 'value' header in signal CSV");
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(line, &pos));
    } catch (const std::exception&) {
      throw IoError(path + ": bad number in signal CSV: '" + line + "'");
    }
  }
  if (vals.empty()) throw IoError(path + ": empty signal CSV");
  Vec v(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
  return v;
}

void write_signal_csv(const std::string& path, const Vec& signal) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "value\n";
  char buf[40];
  for (Index i = 0; i < signal.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", signal[i]);
    out << buf << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace dpps
