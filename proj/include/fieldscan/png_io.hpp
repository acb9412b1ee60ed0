#pragma once

#include <array>
#include <string>
#include <vector>

#include "fieldscan/common.hpp"

namespace fieldscan::io {

// Reads an 8-bit PNG. RGB/RGBA/palette inputs come back as 3-channel RGB
// (alpha dropped), grayscale as 1-channel.
ImageU8 read_png(const std::string& path);

// Writes 1-channel gray or 3-channel RGB, 8 bits per channel.
void write_png(const std::string& path, const ImageU8& img);

// 3-channel 16-bit output (score-map export).
void write_png16(const std::string& path, const Image<uint16_t>& img);

// Paletted single-channel write; palette is a list of RGB triples indexed by
// pixel value.
void write_png_paletted(const std::string& path, const ImageU8& img,
                        const std::vector<std::array<uint8_t, 3>>& palette);

}  // namespace fieldscan::io
