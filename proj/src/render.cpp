#include "bpm/render.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "bpm/analysis.hpp"
#include "bpm/baselines.hpp"
#include "bpm/errors.hpp"

namespace bpm {

namespace {

constexpr Rgba kErrorColor{255, 0, 255, 255};

// Uniform grid over face bounding boxes for pixel -> face lookup.
class FaceLocator {
 public:
  FaceLocator(const TriMesh& mesh, const Rect& domain, int cells)
      : mesh_(&mesh), domain_(domain), cells_(cells), bins_(static_cast<size_t>(cells) * cells) {
    for (int t = 0; t < mesh.face_count(); ++t) {
      const auto c = mesh.planar_corners(t);
      double lo_x = std::min({c[0].real(), c[1].real(), c[2].real()});
      double hi_x = std::max({c[0].real(), c[1].real(), c[2].real()});
      double lo_y = std::min({c[0].imag(), c[1].imag(), c[2].imag()});
      double hi_y = std::max({c[0].imag(), c[1].imag(), c[2].imag()});
      for (int gy = cell_of_y(lo_y); gy <= cell_of_y(hi_y); ++gy)
        for (int gx = cell_of_x(lo_x); gx <= cell_of_x(hi_x); ++gx)
          bins_[static_cast<size_t>(gy) * cells_ + gx].push_back(t);
    }
  }

  // Face containing p together with its barycentric coordinates, or -1.
  int locate(Complex p, std::array<double, 3>& bary) const {
    const auto& bin =
        bins_[static_cast<size_t>(cell_of_y(p.imag())) * cells_ + cell_of_x(p.real())];
    for (int t : bin) {
      const auto b = barycentric_planar(mesh_->planar_corners(t), p);
      if (b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12) {
        bary = b;
        return t;
      }
    }
    return -1;
  }

 private:
  int cell_of_x(double x) const {
    const double r = (x - domain_.min_x) / std::max(domain_.width(), 1e-300);
    return std::clamp(static_cast<int>(r * cells_), 0, cells_ - 1);
  }
  int cell_of_y(double y) const {
    const double r = (y - domain_.min_y) / std::max(domain_.height(), 1e-300);
    return std::clamp(static_cast<int>(r * cells_), 0, cells_ - 1);
  }

  const TriMesh* mesh_;
  Rect domain_;
  int cells_;
  std::vector<std::vector<int>> bins_;
};

}  // namespace

Rect Rect::bounds(const std::vector<Complex>& points, double pad) {
  Rect r{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
         std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Complex& p : points) {
    r.min_x = std::min(r.min_x, p.real());
    r.min_y = std::min(r.min_y, p.imag());
    r.max_x = std::max(r.max_x, p.real());
    r.max_y = std::max(r.max_y, p.imag());
  }
  const double px = pad * (r.max_x - r.min_x);
  const double py = pad * (r.max_y - r.min_y);
  r.min_x -= px;
  r.max_x += px;
  r.min_y -= py;
  r.max_y += py;
  return r;
}

Framebuffer pullback(const Interpolator& interp, const TriMesh& mesh, const Texture& texture,
                     int width, int height, const Rect& domain, const Rect& tex_rect,
                     RenderStats* stats, Exec exec) {
  if (!mesh.planar()) throw DegenerateError("pullback requires a planar source mesh");
  Framebuffer fb(width, height, {0, 0, 0, 0});
  const int cells = std::max(1, static_cast<int>(std::sqrt(mesh.face_count())));
  const FaceLocator locator(mesh, domain, cells);

  std::atomic<int64_t> covered{0}, errors{0};
  parallel_for(exec, height, [&](int64_t y) {
    int64_t row_covered = 0, row_errors = 0;
    for (int x = 0; x < width; ++x) {
      const Complex p(domain.min_x + (x + 0.5) / width * domain.width(),
                      domain.min_y + (y + 0.5) / height * domain.height());
      std::array<double, 3> b;
      const int t = locator.locate(p, b);
      if (t < 0) continue;
      ++row_covered;
      Rgba color;
      try {
        const Complex w = interp.eval_bary(t, b[0], b[1], b[2]);
        const double u = (w.real() - tex_rect.min_x) / std::max(tex_rect.width(), 1e-300);
        const double v = (w.imag() - tex_rect.min_y) / std::max(tex_rect.height(), 1e-300);
        color = texture.sample(u, v);
      } catch (const Error&) {
        color = kErrorColor;
        ++row_errors;
      }
      fb.put(x, static_cast<int>(y), color);
    }
    covered += row_covered;
    errors += row_errors;
  });
  if (stats) {
    stats->covered_pixels = covered.load();
    stats->error_samples = errors.load();
  }
  return fb;
}

Framebuffer pushforward(const Interpolator& interp, const TriMesh& mesh, const Texture& texture,
                        int width, int height, const Rect& target_rect, const Rect& tex_rect,
                        int supersample, int levels, RenderStats* stats, Exec exec) {
  if (!mesh.planar()) throw DegenerateError("pushforward requires a planar source mesh");
  Framebuffer fb(width, height, {0, 0, 0, 0});

  // grid side 2^levels * supersample: supersample^2 micro triangles per
  // refined triangle of the `levels`-deep subdivision
  const int side = (1 << levels) * std::max(1, supersample);
  SubdivGrid grid;
  grid.side = side;
  for (int b = 0; b <= side; ++b)
    for (int a = 0; a + b <= side; ++a) grid.verts.push_back({a, b});
  for (int b = 0; b < side; ++b)
    for (int a = 0; a + b < side; ++a) {
      grid.tris.push_back({grid.vertex_index(a, b), grid.vertex_index(a + 1, b),
                           grid.vertex_index(a, b + 1)});
      if (a + b + 1 < side)
        grid.tris.push_back({grid.vertex_index(a + 1, b), grid.vertex_index(a + 1, b + 1),
                             grid.vertex_index(a, b + 1)});
    }

  const int nf = mesh.face_count();
  const int nv = static_cast<int>(grid.verts.size());
  const double inv_n = 1.0 / side;

  // Faces are processed in chunks: a parallel map stage (the expensive
  // evaluations) followed by a serial, deterministic splat stage.
  const int chunk = 512;
  std::vector<Complex> source(static_cast<size_t>(chunk) * nv);
  std::vector<Complex> image(static_cast<size_t>(chunk) * nv);
  std::vector<char> failed(static_cast<size_t>(chunk) * nv);

  int64_t errors = 0;
  const double sx = width / std::max(target_rect.width(), 1e-300);
  const double sy = height / std::max(target_rect.height(), 1e-300);
  for (int chunk_begin = 0; chunk_begin < nf; chunk_begin += chunk) {
    const int chunk_faces = std::min(chunk, nf - chunk_begin);
    std::fill(failed.begin(), failed.end(), 0);
    parallel_for(exec, chunk_faces, [&](int64_t local_t) {
      const int t = chunk_begin + static_cast<int>(local_t);
      const auto corners = mesh.planar_corners(t);
      for (int v = 0; v < nv; ++v) {
        const double b1 = grid.verts[v][0] * inv_n;
        const double b2 = grid.verts[v][1] * inv_n;
        const size_t k = static_cast<size_t>(local_t) * nv + v;
        source[k] = (1.0 - b1 - b2) * corners[0] + b1 * corners[1] + b2 * corners[2];
        try {
          image[k] = interp.eval_bary(t, 1.0 - b1 - b2, b1, b2);
        } catch (const Error&) {
          failed[k] = 1;
        }
      }
    });

    for (int local_t = 0; local_t < chunk_faces; ++local_t) {
      for (const auto& tri : grid.tris) {
        const size_t k0 = static_cast<size_t>(local_t) * nv + tri[0];
        const size_t k1 = static_cast<size_t>(local_t) * nv + tri[1];
        const size_t k2 = static_cast<size_t>(local_t) * nv + tri[2];
        if (failed[k0] || failed[k1] || failed[k2]) {
          ++errors;
          continue;
        }
        // pixel coordinates of the target micro triangle
        const double px0 = (image[k0].real() - target_rect.min_x) * sx;
        const double py0 = (image[k0].imag() - target_rect.min_y) * sy;
        const double px1 = (image[k1].real() - target_rect.min_x) * sx;
        const double py1 = (image[k1].imag() - target_rect.min_y) * sy;
        const double px2 = (image[k2].real() - target_rect.min_x) * sx;
        const double py2 = (image[k2].imag() - target_rect.min_y) * sy;

        const double det = (px1 - px0) * (py2 - py0) - (px2 - px0) * (py1 - py0);
        if (std::abs(det) < 1e-300) continue;
        const int lo_x =
            std::max(0, static_cast<int>(std::floor(std::min({px0, px1, px2}) - 0.5)));
        const int hi_x =
            std::min(width - 1, static_cast<int>(std::ceil(std::max({px0, px1, px2}) + 0.5)));
        const int lo_y =
            std::max(0, static_cast<int>(std::floor(std::min({py0, py1, py2}) - 0.5)));
        const int hi_y =
            std::min(height - 1, static_cast<int>(std::ceil(std::max({py0, py1, py2}) + 0.5)));
        for (int y = lo_y; y <= hi_y; ++y) {
          for (int x = lo_x; x <= hi_x; ++x) {
            const double cx = x + 0.5, cy = y + 0.5;
            const double b1 = ((cx - px0) * (py2 - py0) - (px2 - px0) * (cy - py0)) / det;
            const double b2 = ((px1 - px0) * (cy - py0) - (cx - px0) * (py1 - py0)) / det;
            const double b0 = 1.0 - b1 - b2;
            const double eps = -1e-9;
            if (b0 < eps || b1 < eps || b2 < eps) continue;
            const Complex s = b0 * source[k0] + b1 * source[k1] + b2 * source[k2];
            const double u = (s.real() - tex_rect.min_x) / std::max(tex_rect.width(), 1e-300);
            const double v = (s.imag() - tex_rect.min_y) / std::max(tex_rect.height(), 1e-300);
            fb.put(x, y, texture.sample(u, v));
          }
        }
      }
    }
  }

  if (stats) {
    int64_t covered = 0;
    for (size_t k = 0; k < fb.pixels.size(); k += 4)
      if (fb.pixels[k + 3] != 0 || fb.pixels[k] != 0 || fb.pixels[k + 1] != 0 ||
          fb.pixels[k + 2] != 0)
        ++covered;
    stats->covered_pixels = covered;
    stats->error_samples = errors;
  }
  return fb;
}

void export_refined_obj(const Interpolator& interp, const TriMesh& mesh, int levels,
                        const std::string& path) {
  const int n = 1 << levels;

  // Deduplicate refined vertices: original corners, points on original
  // edges (keyed by the undirected edge and the step from its smaller
  // vertex id) and face-interior points.
  enum Kind { kCorner, kEdge, kInterior };
  std::map<std::tuple<int, int64_t, int64_t>, int> index;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Complex> uvs;
  std::vector<std::array<int, 3>> tris;

  double uv_diag = 0.0;
  {
    std::vector<Complex> corner_uvs;
    for (int t = 0; t < mesh.face_count(); ++t) {
      corner_uvs.push_back(interp.eval_bary(t, 1, 0, 0));
      corner_uvs.push_back(interp.eval_bary(t, 0, 1, 0));
      corner_uvs.push_back(interp.eval_bary(t, 0, 0, 1));
    }
    const Rect r = Rect::bounds(corner_uvs);
    uv_diag = std::hypot(r.width(), r.height());
  }
  const double seam_tol = 1e-9 * std::max(uv_diag, 1e-300);

  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    const Eigen::Vector3d p0 = mesh.position(f[0]);
    const Eigen::Vector3d p1 = mesh.position(f[1]);
    const Eigen::Vector3d p2 = mesh.position(f[2]);

    // local refined-vertex indices for this face
    std::vector<int> local((n + 1) * (n + 2) / 2);
    int slot = 0;
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a + b <= n; ++a, ++slot) {
        const int c0 = n - a - b, c1 = a, c2 = b;
        std::tuple<int, int64_t, int64_t> key;
        if (c0 == n)
          key = {kCorner, f[0], 0};
        else if (c1 == n)
          key = {kCorner, f[1], 0};
        else if (c2 == n)
          key = {kCorner, f[2], 0};
        else if (c2 == 0) {  // edge f0-f1, step c1 from f0
          key = f[0] < f[1]
                    ? std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[0]) << 32 | f[1], c1}
                    : std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[1]) << 32 | f[0],
                                                        n - c1};
        } else if (c0 == 0) {  // edge f1-f2, step c2 from f1
          key = f[1] < f[2]
                    ? std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[1]) << 32 | f[2], c2}
                    : std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[2]) << 32 | f[1],
                                                        n - c2};
        } else if (c1 == 0) {  // edge f2-f0, step c0 from f2
          key = f[2] < f[0]
                    ? std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[2]) << 32 | f[0], c0}
                    : std::tuple<int, int64_t, int64_t>{kEdge,
                                                        static_cast<int64_t>(f[0]) << 32 | f[2],
                                                        n - c0};
        } else {
          key = {kInterior, (static_cast<int64_t>(t) << 32) | (a << 16) | b, 0};
        }

        const double b1 = static_cast<double>(a) / n;
        const double b2 = static_cast<double>(b) / n;
        const Complex uv = interp.eval_bary(t, 1.0 - b1 - b2, b1, b2);

        auto [it, inserted] = index.try_emplace(key, static_cast<int>(positions.size()));
        if (inserted) {
          positions.push_back((1.0 - b1 - b2) * p0 + b1 * p1 + b2 * p2);
          uvs.push_back(uv);
        } else if (std::abs(uvs[it->second] - uv) > seam_tol) {
          throw Error("export_refined_obj: two-sided UV mismatch at a shared refined vertex (" +
                      std::to_string(std::abs(uvs[it->second] - uv)) + ")");
        }
        local[slot] = it->second;
      }
    }

    auto at = [&](int a, int b) {
      return local[b * (n + 1) - b * (b - 1) / 2 + a];
    };
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a + b < n; ++a) {
        tris.push_back({at(a, b), at(a + 1, b), at(a, b + 1)});
        if (a + b + 1 < n) tris.push_back({at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)});
      }
    }
  }

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out.precision(17);
  for (const auto& p : positions) out << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
  for (const auto& uv : uvs) out << "vt " << uv.real() << " " << uv.imag() << "\n";
  for (const auto& tri : tris) {
    out << "f " << tri[0] + 1 << "/" << tri[0] + 1 << " " << tri[1] + 1 << "/" << tri[1] + 1
        << " " << tri[2] + 1 << "/" << tri[2] + 1 << "\n";
  }
}

}  // namespace bpm
