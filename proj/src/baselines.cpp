#include "bpm/baselines.hpp"

#include <cmath>

#include "bpm/errors.hpp"

namespace bpm {

std::array<double, 3> barycentric_planar(const std::array<Complex, 3>& tri, Complex z) {
  const Complex e1 = tri[1] - tri[0];
  const Complex e2 = tri[2] - tri[0];
  const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
  if (std::abs(det) < 1e-300) throw DegenerateError("degenerate triangle");
  const Complex d = z - tri[0];
  const double b1 = (d.real() * e2.imag() - d.imag() * e2.real()) / det;
  const double b2 = (e1.real() * d.imag() - e1.imag() * d.real()) / det;
  return {1.0 - b1 - b2, b1, b2};
}

Complex pl_evaluate(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst,
                    Complex z) {
  const auto b = barycentric_planar(src, z);
  return b[0] * dst[0] + b[1] * dst[1] + b[2] * dst[2];
}

std::array<double, 3> projective_scale_factors(const std::array<double, 3>& src_lengths,
                                               const std::array<double, 3>& dst_lengths) {
  for (int e = 0; e < 3; ++e) {
    if (!(src_lengths[e] > 0.0) || !(dst_lengths[e] > 0.0))
      throw DegenerateError("non-positive edge length");
  }
  // lengths ordered (l_ij, l_jk, l_ki); adjacent edges of corner i are
  // ij and ki, the opposite edge is jk, and cyclically.
  std::array<double, 3> factors;
  for (int c = 0; c < 3; ++c) {
    const int adj_a = c;            // edge (c, c+1)
    const int adj_b = (c + 2) % 3;  // edge (c+2, c)
    const int opp = (c + 1) % 3;    // edge (c+1, c+2)
    const double u = std::log(dst_lengths[adj_a]) + std::log(dst_lengths[adj_b]) +
                     std::log(src_lengths[opp]) - std::log(src_lengths[adj_a]) -
                     std::log(src_lengths[adj_b]) - std::log(dst_lengths[opp]);
    factors[c] = std::exp(u);
  }
  return factors;
}

Complex projective_evaluate(const std::array<Complex, 3>& dst, const std::array<double, 3>& scale,
                            double a0, double a1, double a2) {
  const double w0 = a0 * scale[0];
  const double w1 = a1 * scale[1];
  const double w2 = a2 * scale[2];
  const double denom = w0 + w1 + w2;
  if (std::abs(denom) < 1e-300) throw DegenerateError("projective weights sum to zero");
  return (w0 * dst[0] + w1 * dst[1] + w2 * dst[2]) / denom;
}

PlInterpolator::PlInterpolator(const TriMesh& mesh, const DiscreteMap& map)
    : mesh_(&mesh), map_(&map) {
  if (static_cast<int>(map.w.size()) != mesh.vertex_count())
    throw DegenerateError("map size does not match vertex count");
}

Complex PlInterpolator::eval_bary(int face, double b0, double b1, double b2) const {
  const auto& f = mesh_->face(face);
  return b0 * map_->w[f[0]] + b1 * map_->w[f[1]] + b2 * map_->w[f[2]];
}

Complex PlInterpolator::evaluate(int face, Complex z) const {
  const auto b = barycentric_planar(mesh_->planar_corners(face), z);
  return eval_bary(face, b[0], b[1], b[2]);
}

ProjInterpolator::ProjInterpolator(const TriMesh& mesh, const DiscreteMap& map)
    : mesh_(&mesh), map_(&map) {
  if (static_cast<int>(map.w.size()) != mesh.vertex_count())
    throw DegenerateError("map size does not match vertex count");
  factors_.resize(mesh.face_count());
  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    const std::array<double, 3> src{mesh.edge_length(f[0], f[1]), mesh.edge_length(f[1], f[2]),
                                    mesh.edge_length(f[2], f[0])};
    const std::array<double, 3> dst{std::abs(map.w[f[1]] - map.w[f[0]]),
                                    std::abs(map.w[f[2]] - map.w[f[1]]),
                                    std::abs(map.w[f[0]] - map.w[f[2]])};
    try {
      factors_[t] = projective_scale_factors(src, dst);
    } catch (const Error& e) {
      throw DegenerateError("face " + std::to_string(t) + ": " + e.what());
    }
  }
}

Complex ProjInterpolator::eval_bary(int face, double b0, double b1, double b2) const {
  const auto& f = mesh_->face(face);
  return projective_evaluate({map_->w[f[0]], map_->w[f[1]], map_->w[f[2]]}, factors_[face], b0,
                             b1, b2);
}

Complex ProjInterpolator::evaluate(int face, Complex z) const {
  const auto b = barycentric_planar(mesh_->planar_corners(face), z);
  return eval_bary(face, b[0], b[1], b[2]);
}

}  // namespace bpm
