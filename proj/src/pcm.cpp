#include "bpm/pcm.hpp"

#include <cmath>

#include "bpm/errors.hpp"

namespace bpm {

namespace {

// Matrix of the standard map (p1, p2, p3) -> (0, 1, inf).
MoebiusMatrix three_point_frame(Complex p1, Complex p2, Complex p3) {
  return {p2 - p3, -p1 * (p2 - p3), p2 - p1, -p3 * (p2 - p1)};
}

// Similarity (p - center) / spread moving the triple to unit scale, so
// the frame construction stays conditioned for uniformly tiny or huge
// triples (a near-constant map must still fit cleanly).
MoebiusMatrix unit_frame(Complex p1, Complex p2, Complex p3, const char* what) {
  const Complex center = (p1 + p2 + p3) / 3.0;
  const double spread =
      (std::abs(p1 - p2) + std::abs(p2 - p3) + std::abs(p3 - p1)) / 3.0;
  const double magnitude = std::max({std::abs(p1), std::abs(p2), std::abs(p3), 1.0});
  if (spread < 1e-14 * magnitude) throw DegenerateError(std::string("coincident ") + what);
  if (std::abs(p1 - p2) < 1e-13 * spread || std::abs(p2 - p3) < 1e-13 * spread ||
      std::abs(p3 - p1) < 1e-13 * spread)
    throw DegenerateError(std::string("coincident ") + what);
  return {1.0 / spread, -center / spread, 0.0, 1.0};
}

}  // namespace

MoebiusMatrix fit_face_moebius(Complex z1, Complex z2, Complex z3, Complex w1, Complex w2,
                               Complex w3) {
  const MoebiusMatrix tz = unit_frame(z1, z2, z3, "source points");
  const MoebiusMatrix tw = unit_frame(w1, w2, w3, "target points");
  const MoebiusMatrix A =
      three_point_frame(bpm::apply(tz, z1), bpm::apply(tz, z2), bpm::apply(tz, z3));
  const MoebiusMatrix B =
      three_point_frame(bpm::apply(tw, w1), bpm::apply(tw, w2), bpm::apply(tw, w3));
  // M = tw^{-1} (B^{-1} A) tz up to scale; adjugates avoid the dets.
  const MoebiusMatrix B_adj{B.d, -B.b, -B.c, B.a};
  const MoebiusMatrix tw_adj{tw.d, -tw.b, -tw.c, tw.a};
  return normalize(tw_adj * B_adj * A * tz);
}

PcmMap build_pcm(const TriMesh& mesh, const DiscreteMap& map, Exec exec) {
  if (!mesh.planar()) throw DegenerateError("build_pcm requires a planar mesh");
  if (static_cast<int>(map.w.size()) != mesh.vertex_count())
    throw DegenerateError("map size does not match vertex count");

  const int nf = mesh.face_count();
  PcmMap pcm;
  pcm.face_matrix.resize(nf);
  pcm.corner_x.resize(nf);

  std::vector<std::string> failures(nf);
  parallel_for(exec, nf, [&](int64_t t) {
    const auto& f = mesh.face(static_cast<int>(t));
    try {
      const MoebiusMatrix m =
          fit_face_moebius(mesh.planar_vertex(f[0]), mesh.planar_vertex(f[1]),
                           mesh.planar_vertex(f[2]), map.w[f[0]], map.w[f[1]], map.w[f[2]]);
      pcm.face_matrix[t] = m;
      for (int c = 0; c < 3; ++c) {
        pcm.corner_x[t][c] = 1.0 / (m.c * mesh.planar_vertex(f[c]) + m.d);
      }
    } catch (const Error& e) {
      failures[t] = e.what();
    }
  });
  for (int t = 0; t < nf; ++t) {
    if (!failures[t].empty())
      throw DegenerateError("face " + std::to_string(t) + ": " + failures[t]);
  }
  return pcm;
}

std::vector<double> cetm_deviation(const TriMesh& mesh, const PcmMap& pcm) {
  std::vector<double> lo(mesh.vertex_count(), std::numeric_limits<double>::max());
  std::vector<double> hi(mesh.vertex_count(), 0.0);
  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    for (int c = 0; c < 3; ++c) {
      const double mag = std::abs(pcm.corner_x[t][c]);
      lo[f[c]] = std::min(lo[f[c]], mag);
      hi[f[c]] = std::max(hi[f[c]], mag);
    }
  }
  std::vector<double> dev(mesh.vertex_count(), 0.0);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (hi[v] > 0.0 && lo[v] < std::numeric_limits<double>::max())
      dev[v] = hi[v] / lo[v] - 1.0;
  }
  return dev;
}

double face_qc_error(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst) {
  const Complex e1 = src[1] - src[0];
  const Complex e2 = src[2] - src[0];
  const double src_area2 = e1.real() * e2.imag() - e1.imag() * e2.real();
  const double scale = std::max({std::abs(e1), std::abs(e2), 1e-300});
  if (std::abs(src_area2) < 1e-14 * scale * scale)
    throw DegenerateError("zero-area source triangle");

  // Jacobian of the affine map: J = [f1 f2] [e1 e2]^{-1}, as real 2x2.
  const Complex f1 = dst[1] - dst[0];
  const Complex f2 = dst[2] - dst[0];
  const double inv_det = 1.0 / src_area2;
  const double a = (f1.real() * e2.imag() - f2.real() * e1.imag()) * inv_det;
  const double b = (f2.real() * e1.real() - f1.real() * e2.real()) * inv_det;
  const double c = (f1.imag() * e2.imag() - f2.imag() * e1.imag()) * inv_det;
  const double d = (f2.imag() * e1.real() - f1.imag() * e2.real()) * inv_det;

  if (a * d - b * c <= 0.0) return kQcInfinity;

  // Closed-form singular values of [[a, b], [c, d]].
  const double q = std::hypot(0.5 * (a + d), 0.5 * (c - b));
  const double r = std::hypot(0.5 * (a - d), 0.5 * (c + b));
  const double s_max = q + r;
  const double s_min = q - r;
  if (s_min <= 0.0) return kQcInfinity;
  return s_max / s_min;
}

double face_qc_error_3d(const std::array<Eigen::Vector3d, 3>& src,
                        const std::array<Complex, 3>& dst) {
  // Isometric flattening of the source triangle, CCW by vertex order.
  const double l01 = (src[1] - src[0]).norm();
  if (l01 < 1e-300) throw DegenerateError("zero-area source triangle");
  const Eigen::Vector3d u = (src[1] - src[0]) / l01;
  const Eigen::Vector3d w = src[2] - src[0];
  const double x = u.dot(w);
  const double y_sq = w.squaredNorm() - x * x;
  const double y = y_sq > 0.0 ? std::sqrt(y_sq) : 0.0;
  return face_qc_error({Complex(0, 0), Complex(l01, 0), Complex(x, y)}, dst);
}

}  // namespace bpm
