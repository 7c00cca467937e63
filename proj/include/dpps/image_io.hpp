#pragma once

#include "dpps/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpps {

// Binary netpbm I/O. P5 (grayscale) maps to shape [H,W], P6 (RGB) to
// [H,W,3]; maxval must be 255. Bytes map to [0,1] by v/255; writing rounds
// clamp(x,0,1)*255 to nearest, so a write/read round trip moves any in-range
// value by at most 1/510.
SignalField read_image(const std::string& path);
void write_image(const std::string& path, const SignalField& field);

// Masks ride on P5: 0 = dropped, 255 = kept (>= 128 reads as kept). 1D masks
// use a 1 x d image.
std::vector<std::uint8_t> read_mask_pgm(const std::string& path, Shape& image_shape);
void write_mask_pgm(const std::string& path, const Shape& field_shape,
                    const std::vector<std::uint8_t>& pixel_mask);

// 1D signals are exchanged as one-column CSV with a "value" header.
Vec read_signal_csv(const std::string& path);
void write_signal_csv(const std::string& path, const Vec& signal);

}  // namespace dpps
