#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <random>

#include "bpm/errors.hpp"
#include "bpm/pcm.hpp"
#include "synthetic.hpp"

using bpm::Complex;
using bpm::DiscreteMap;
using bpm::MoebiusMatrix;
using bpm::TriMesh;
namespace ts = bpm::testsupport;

namespace {

// Independent fit oracle: the homogeneous system a z + b - w c z - w d = 0
// solved by the null space of a 3x4 complex matrix.
MoebiusMatrix svd_fit_oracle(const std::array<Complex, 3>& z, const std::array<Complex, 3>& w) {
  Eigen::Matrix<std::complex<double>, 3, 4> A;
  for (int n = 0; n < 3; ++n) {
    A(n, 0) = z[n];
    A(n, 1) = 1.0;
    A(n, 2) = -w[n] * z[n];
    A(n, 3) = -w[n];
  }
  Eigen::JacobiSVD<Eigen::Matrix<std::complex<double>, 3, 4>> svd(A, Eigen::ComputeFullV);
  const auto v = svd.matrixV().col(3);
  return bpm::normalize({v(0), v(1), v(2), v(3)});
}

}  // namespace

TEST_SUITE_BEGIN("pcm");

TEST_CASE("fit_face_moebius: identity and similarity") {
  const std::array<Complex, 3> z{Complex(0, 0), Complex(1, 0), Complex(0, 1)};
  MoebiusMatrix m = bpm::fit_face_moebius(z[0], z[1], z[2], z[0], z[1], z[2]);
  CHECK(bpm::distance_up_to_sign(m, MoebiusMatrix::identity()) < 1e-12);

  // w = 2z + i corresponds to [[2, i], [0, 1]] up to normalization
  auto sim = [](Complex p) { return 2.0 * p + Complex(0, 1); };
  m = bpm::fit_face_moebius(z[0], z[1], z[2], sim(z[0]), sim(z[1]), sim(z[2]));
  const MoebiusMatrix expected = bpm::normalize({2.0, Complex(0, 1), 0.0, 1.0});
  CHECK(bpm::distance_up_to_sign(m, expected) < 1e-12);
}

TEST_CASE("fit_face_moebius: reproduces 1/(z+2) at its samples") {
  auto target = [](Complex p) { return 1.0 / (p + 2.0); };
  const std::array<Complex, 3> z{Complex(0, 0), Complex(1, 0), Complex(0, 1)};
  const MoebiusMatrix m =
      bpm::fit_face_moebius(z[0], z[1], z[2], target(z[0]), target(z[1]), target(z[2]));
  for (const auto& p : z) CHECK(std::abs(bpm::apply(m, p) - target(p)) < 1e-12);
  // and at a fourth point, because the fit is the whole transformation
  CHECK(std::abs(bpm::apply(m, Complex(0.25, 0.25)) - target(Complex(0.25, 0.25))) < 1e-12);
}

TEST_CASE("fit_face_moebius: agrees with null-space oracle on random data") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    std::array<Complex, 3> z, w;
    for (int n = 0; n < 3; ++n) {
      z[n] = Complex(u(rng), u(rng));
      w[n] = Complex(u(rng), u(rng));
    }
    if (std::abs(z[0] - z[1]) < 0.1 || std::abs(z[1] - z[2]) < 0.1 ||
        std::abs(z[2] - z[0]) < 0.1)
      continue;
    if (std::abs(w[0] - w[1]) < 0.1 || std::abs(w[1] - w[2]) < 0.1 ||
        std::abs(w[2] - w[0]) < 0.1)
      continue;
    const MoebiusMatrix fit = bpm::fit_face_moebius(z[0], z[1], z[2], w[0], w[1], w[2]);
    const MoebiusMatrix oracle = svd_fit_oracle(z, w);
    CHECK(bpm::distance_up_to_sign(fit, oracle) < 1e-9);
    for (int n = 0; n < 3; ++n) {
      const double scale = std::max(1.0, std::abs(w[n]));
      CHECK(std::abs(bpm::apply(fit, z[n]) - w[n]) < 1e-10 * scale);
    }
  }
}

TEST_CASE("fit_face_moebius: coincident points throw") {
  CHECK_THROWS_AS(bpm::fit_face_moebius(Complex(0, 0), Complex(0, 0), Complex(1, 0),
                                        Complex(0, 0), Complex(1, 0), Complex(0, 1)),
                  bpm::DegenerateError);
}

TEST_CASE("build_pcm: identity map gives identity matrices") {
  TriMesh mesh = ts::grid_mesh(3, 3);
  const auto pcm = bpm::build_pcm(mesh, ts::identity_map(mesh));
  for (const auto& m : pcm.face_matrix)
    CHECK(bpm::distance_up_to_sign(m, MoebiusMatrix::identity()) < 1e-12);
}

TEST_CASE("build_pcm: global Moebius gives the same matrix everywhere") {
  TriMesh mesh = ts::grid_mesh(3, 3, 1.0, 0.5);
  std::mt19937_64 rng(43);
  const MoebiusMatrix mg = ts::random_moebius_outside(mesh, rng);
  const auto map = ts::map_from(mesh, [&](Complex z) { return bpm::apply(mg, z); });
  const auto pcm = bpm::build_pcm(mesh, map);
  for (const auto& m : pcm.face_matrix) CHECK(bpm::distance_up_to_sign(m, mg) < 1e-9);
}

TEST_CASE("build_pcm: interpolation and compatibility on a perturbed map") {
  TriMesh mesh = ts::grid_mesh(4, 4);
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  const auto map = ts::map_from(mesh, [&](Complex z) { return z + Complex(u(rng), u(rng)); });
  const auto pcm = bpm::build_pcm(mesh, map);
  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    for (int c = 0; c < 3; ++c) {
      const Complex img = bpm::apply(pcm.face_matrix[t], mesh.planar_vertex(f[c]));
      const double scale = std::max(1.0, std::abs(map.w[f[c]]));
      CHECK(std::abs(img - map.w[f[c]]) < 1e-9 * scale);
    }
  }
}

TEST_CASE("pcm closure under global composition keeps compatibility") {
  TriMesh mesh = ts::grid_mesh(3, 3, 2.0, 2.0);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const auto map = ts::map_from(mesh, [&](Complex z) { return z + Complex(u(rng), u(rng)); });
  const auto pcm = bpm::build_pcm(mesh, map);
  const MoebiusMatrix mg = ts::random_moebius_outside(mesh, rng);

  const auto adj = bpm::build_adjacency(mesh);
  // {M_g M_t} agrees on the original shared vertices; {M_t M_g} is a
  // compatible set on the pre-transformed source, i.e. at m_g^{-1}(z_v)
  for (int t = 0; t < mesh.face_count(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const int w = adj.neighbor(t, e);
      if (w == bpm::FaceAdjacency::kBoundary || w < t) continue;
      for (int end = 0; end < 2; ++end) {
        const Complex z = mesh.planar_vertex(mesh.face(t)[(e + end) % 3]);
        const Complex left_t = bpm::apply(mg * pcm.face_matrix[t], z);
        const Complex left_w = bpm::apply(mg * pcm.face_matrix[w], z);
        CHECK(std::abs(left_t - left_w) < 1e-9 * std::max(1.0, std::abs(left_t)));
        const Complex zp = bpm::apply(mg.inverse(), z);
        const Complex right_t = bpm::apply(pcm.face_matrix[t] * mg, zp);
        const Complex right_w = bpm::apply(pcm.face_matrix[w] * mg, zp);
        CHECK(std::abs(right_t - right_w) < 1e-9 * std::max(1.0, std::abs(right_t)));
      }
    }
  }
}

TEST_CASE("cetm_deviation: zero for global Moebius and identity") {
  TriMesh mesh = ts::grid_mesh(3, 3, 1.0, 1.0);
  std::mt19937_64 rng(59);
  const MoebiusMatrix mg = ts::random_moebius_outside(mesh, rng);

  auto dev_id = bpm::cetm_deviation(mesh, bpm::build_pcm(mesh, ts::identity_map(mesh)));
  for (double d : dev_id) CHECK(d < 1e-12);

  const auto map = ts::map_from(mesh, [&](Complex z) { return bpm::apply(mg, z); });
  auto dev_mg = bpm::cetm_deviation(mesh, bpm::build_pcm(mesh, map));
  for (double d : dev_mg) CHECK(d < 1e-9);
}

TEST_CASE("cetm_deviation: positive at shared vertices of a stretched square") {
  TriMesh mesh = ts::grid_mesh(1, 1);  // two faces sharing the diagonal
  const auto map = ts::map_from(mesh, [](Complex z) { return Complex(2.0 * z.real(), z.imag()); });
  const auto pcm = bpm::build_pcm(mesh, map);
  const auto dev = bpm::cetm_deviation(mesh, pcm);
  // diagonal runs between vertices 0 and 3 of the 2x2 vertex grid
  const auto adj = bpm::build_adjacency(mesh);
  int shared_a = -1, shared_b = -1;
  for (int e = 0; e < 3; ++e) {
    if (adj.neighbor(0, e) == 1) {
      shared_a = mesh.face(0)[e];
      shared_b = mesh.face(0)[(e + 1) % 3];
    }
  }
  REQUIRE(shared_a >= 0);
  CHECK(dev[shared_a] > 1e-3);
  CHECK(dev[shared_b] > 1e-3);
}

TEST_CASE("face_qc_error: similarity, stretch, flip") {
  const std::array<Complex, 3> src{Complex(0, 0), Complex(1, 0), Complex(0.3, 0.8)};
  // similarity: rotate + scale
  const Complex rot = 1.7 * std::polar(1.0, 0.6);
  std::array<Complex, 3> dst;
  for (int n = 0; n < 3; ++n) dst[n] = rot * src[n] + Complex(3, -2);
  CHECK(bpm::face_qc_error(src, dst) == doctest::Approx(1.0).epsilon(1e-12));

  for (int n = 0; n < 3; ++n) dst[n] = Complex(2.0 * src[n].real(), src[n].imag());
  CHECK(bpm::face_qc_error(src, dst) == doctest::Approx(2.0).epsilon(1e-12));

  // flipped target
  for (int n = 0; n < 3; ++n) dst[n] = std::conj(src[n]);
  CHECK(bpm::face_qc_error(src, dst) == bpm::kQcInfinity);
}

TEST_CASE("face_qc_error: random linear maps against Eigen SVD oracle") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::array<Complex, 3> src{Complex(0, 0), Complex(1, 0), Complex(0.2, 1.1)};
  for (int it = 0; it < 300; ++it) {
    Eigen::Matrix2d J;
    J << u(rng) + 2.0, u(rng), u(rng), u(rng) + 2.0;  // keep det > 0 likely
    if (J.determinant() <= 1e-3) continue;
    std::array<Complex, 3> dst;
    for (int n = 0; n < 3; ++n) {
      const Eigen::Vector2d v = J * Eigen::Vector2d(src[n].real(), src[n].imag());
      dst[n] = Complex(v.x(), v.y());
    }
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
    const double oracle = svd.singularValues()(0) / svd.singularValues()(1);
    CHECK(bpm::face_qc_error(src, dst) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("face_qc_error: degenerate source throws") {
  const std::array<Complex, 3> src{Complex(0, 0), Complex(1, 0), Complex(2, 0)};
  const std::array<Complex, 3> dst{Complex(0, 0), Complex(1, 0), Complex(0, 1)};
  CHECK_THROWS_AS(bpm::face_qc_error(src, dst), bpm::DegenerateError);
}

TEST_CASE("face_qc_error_3d: matches planar result through flattening") {
  const std::array<Eigen::Vector3d, 3> src{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0),
                                           Eigen::Vector3d(0.3, 0.8, 0)};
  const std::array<Complex, 3> src2{Complex(0, 0), Complex(1, 0), Complex(0.3, 0.8)};
  const std::array<Complex, 3> dst{Complex(0, 0), Complex(2, 0), Complex(0.6, 0.8)};
  CHECK(bpm::face_qc_error_3d(src, dst) ==
        doctest::Approx(bpm::face_qc_error(src2, dst)).epsilon(1e-12));

  // rotating the source in 3D changes nothing
  Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const std::array<Eigen::Vector3d, 3> rotated{R * src[0], R * src[1], R * src[2]};
  CHECK(bpm::face_qc_error_3d(rotated, dst) ==
        doctest::Approx(bpm::face_qc_error(src2, dst)).epsilon(1e-10));
}

TEST_SUITE_END();
