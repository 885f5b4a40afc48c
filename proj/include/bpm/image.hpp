#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace bpm {

using Rgba = std::array<uint8_t, 4>;

// RGBA8 texture with bilinear sampling in [0,1]^2 texture space.
struct Texture {
  enum class Address { Clamp, Repeat };

  int width = 0, height = 0;
  std::vector<uint8_t> pixels;  // row-major RGBA
  Address address = Address::Clamp;

  Rgba texel(int x, int y) const;
  // Bilinear sample; (0,0) is the lower-left corner of the image.
  Rgba sample(double u, double v) const;

  static Texture checkerboard(int width, int height, int cell, Rgba a = {230, 230, 230, 255},
                              Rgba b = {40, 60, 160, 255});
};

struct Framebuffer {
  int width = 0, height = 0;
  std::vector<uint8_t> pixels;  // row-major RGBA, row 0 at the bottom
  Rgba background{0, 0, 0, 0};

  Framebuffer() = default;
  Framebuffer(int w, int h, Rgba bg);
  void put(int x, int y, Rgba color);
  Rgba get(int x, int y) const;
};

// 8-bit RGBA PNG, row 0 of the buffer written as the bottom image row.
void write_png(const std::string& path, int width, int height, const std::vector<uint8_t>& rgba);
Texture load_png(const std::string& path);

}  // namespace bpm
