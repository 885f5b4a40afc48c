#include "bpm/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "bpm/errors.hpp"

namespace bpm {

Rgba Texture::texel(int x, int y) const {
  if (address == Address::Repeat) {
    x = ((x % width) + width) % width;
    y = ((y % height) + height) % height;
  } else {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
  }
  const size_t k = (static_cast<size_t>(y) * width + x) * 4;
  return {pixels[k], pixels[k + 1], pixels[k + 2], pixels[k + 3]};
}

Rgba Texture::sample(double u, double v) const {
  // texel centers at (x + 0.5) / width
  const double fx = u * width - 0.5;
  const double fy = v * height - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0;
  const double ty = fy - y0;
  const Rgba c00 = texel(x0, y0), c10 = texel(x0 + 1, y0);
  const Rgba c01 = texel(x0, y0 + 1), c11 = texel(x0 + 1, y0 + 1);
  Rgba out;
  for (int ch = 0; ch < 4; ++ch) {
    const double top = c01[ch] * (1.0 - tx) + c11[ch] * tx;
    const double bottom = c00[ch] * (1.0 - tx) + c10[ch] * tx;
    out[ch] = static_cast<uint8_t>(std::lround(bottom * (1.0 - ty) + top * ty));
  }
  return out;
}

Texture Texture::checkerboard(int width, int height, int cell, Rgba a, Rgba b) {
  Texture tex;
  tex.width = width;
  tex.height = height;
  tex.pixels.resize(static_cast<size_t>(width) * height * 4);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgba& c = ((x / cell + y / cell) % 2 == 0) ? a : b;
      const size_t k = (static_cast<size_t>(y) * width + x) * 4;
      for (int ch = 0; ch < 4; ++ch) tex.pixels[k + ch] = c[ch];
    }
  }
  return tex;
}

Framebuffer::Framebuffer(int w, int h, Rgba bg) : width(w), height(h), background(bg) {
  if (w < 1 || h < 1) throw DegenerateError("framebuffer dimensions must be >= 1");
  pixels.resize(static_cast<size_t>(w) * h * 4);
  for (size_t k = 0; k < pixels.size(); k += 4)
    for (int ch = 0; ch < 4; ++ch) pixels[k + ch] = bg[ch];
}

void Framebuffer::put(int x, int y, Rgba color) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const size_t k = (static_cast<size_t>(y) * width + x) * 4;
  for (int ch = 0; ch < 4; ++ch) pixels[k + ch] = color[ch];
}

Rgba Framebuffer::get(int x, int y) const {
  const size_t k = (static_cast<size_t>(y) * width + x) * 4;
  return {pixels[k], pixels[k + 1], pixels[k + 2], pixels[k + 3]};
}

void write_png(const std::string& path, int width, int height, const std::vector<uint8_t>& rgba) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), std::fclose);
  if (!fp) throw ParseError("cannot write '" + path + "'");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ParseError("libpng failure writing '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  // buffer row 0 is the bottom of the image; PNG stores top-down
  for (int y = height - 1; y >= 0; --y) {
    png_write_row(png, const_cast<uint8_t*>(rgba.data() + static_cast<size_t>(y) * width * 4));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Texture load_png(const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), std::fclose);
  if (!fp) throw ParseError("cannot open '" + path + "'");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("libpng failure reading '" + path + "'");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
  png_read_update_info(png, info);

  Texture tex;
  tex.width = static_cast<int>(png_get_image_width(png, info));
  tex.height = static_cast<int>(png_get_image_height(png, info));
  tex.pixels.resize(static_cast<size_t>(tex.width) * tex.height * 4);
  // store bottom-up
  for (int y = tex.height - 1; y >= 0; --y) {
    png_read_row(png, tex.pixels.data() + static_cast<size_t>(y) * tex.width * 4, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return tex;
}

}  // namespace bpm
