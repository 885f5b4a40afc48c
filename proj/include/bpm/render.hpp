#pragma once

#include <string>

#include "bpm/image.hpp"
#include "bpm/interpolator.hpp"
#include "bpm/mesh.hpp"
#include "bpm/parallel.hpp"

namespace bpm {

// Axis-aligned rectangle identifying how a plane region maps onto [0,1]^2
// texture space.
struct Rect {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  static Rect bounds(const std::vector<Complex>& points, double pad = 0.0);
};

struct RenderStats {
  int64_t covered_pixels = 0;
  int64_t error_samples = 0;  // evaluations that hit a pole etc.
};

// Samples the texture at the image f(p) of every covered pixel center p
// of the planar source domain. `domain` is the rendered region of the
// source plane, `tex_rect` the region of the target plane the texture
// spans. Failed evaluations render as magenta and are counted.
Framebuffer pullback(const Interpolator& interp, const TriMesh& mesh, const Texture& texture,
                     int width, int height, const Rect& domain, const Rect& tex_rect,
                     RenderStats* stats = nullptr, Exec exec = Exec::Parallel);

// Forward-splats a fine subdivision of the source mesh: each micro
// triangle's image is rasterized into the target-plane framebuffer with
// the texture sampled at the interpolated source position. Target edges
// come out curved. Grid side per face = 2^levels * supersample.
Framebuffer pushforward(const Interpolator& interp, const TriMesh& mesh, const Texture& texture,
                        int width, int height, const Rect& target_rect, const Rect& tex_rect,
                        int supersample = 4, int levels = 4, RenderStats* stats = nullptr,
                        Exec exec = Exec::Parallel);

// Subdivides each face `levels` times, evaluates the map at every refined
// vertex and writes a seam-free OBJ with per-vertex vt. Vertices shared
// between faces are emitted once; the two-sided UVs must agree within
// 1e-9 of the UV diagonal.
void export_refined_obj(const Interpolator& interp, const TriMesh& mesh, int levels,
                        const std::string& path);

}  // namespace bpm
