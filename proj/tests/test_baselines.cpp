#include <doctest.h>

#include <random>

#include "bpm/analysis.hpp"
#include "bpm/baselines.hpp"
#include "bpm/errors.hpp"
#include "synthetic.hpp"

using bpm::Complex;
using bpm::TriMesh;
namespace ts = bpm::testsupport;

TEST_SUITE_BEGIN("baselines");

TEST_CASE("pl_evaluate: corners, centroid, identity") {
  const std::array<Complex, 3> src{Complex(0, 0), Complex(1, 0), Complex(0.2, 1.0)};
  const std::array<Complex, 3> dst{Complex(1, 1), Complex(3, 0), Complex(2, 2)};
  for (int c = 0; c < 3; ++c) CHECK(std::abs(bpm::pl_evaluate(src, dst, src[c]) - dst[c]) < 1e-14);

  const Complex centroid_src = (src[0] + src[1] + src[2]) / 3.0;
  const Complex centroid_dst = (dst[0] + dst[1] + dst[2]) / 3.0;
  CHECK(std::abs(bpm::pl_evaluate(src, dst, centroid_src) - centroid_dst) < 1e-14);

  CHECK(std::abs(bpm::pl_evaluate(src, src, Complex(0.3, 0.3)) - Complex(0.3, 0.3)) < 1e-15);
}

TEST_CASE("projective_scale_factors: identity and uniform scale") {
  const std::array<double, 3> l{1.0, 1.2, 0.8};
  auto f = bpm::projective_scale_factors(l, l);
  for (double s : f) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));

  std::array<double, 3> l2;
  for (int e = 0; e < 3; ++e) l2[e] = 2.0 * l[e];
  f = bpm::projective_scale_factors(l, l2);
  for (double s : f) CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("projective_scale_factors: defining relation roundtrip on random lengths") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  int tested = 0;
  while (tested < 200) {
    std::array<double, 3> src{u(rng), u(rng), u(rng)};
    std::array<double, 3> dst{u(rng), u(rng), u(rng)};
    auto triangle_ok = [](const std::array<double, 3>& l) {
      return l[0] + l[1] > l[2] && l[1] + l[2] > l[0] && l[2] + l[0] > l[1];
    };
    if (!triangle_ok(src) || !triangle_ok(dst)) continue;
    const auto f = bpm::projective_scale_factors(src, dst);
    // edge e = (corner e, corner e+1)
    for (int e = 0; e < 3; ++e) {
      const double predicted = std::sqrt(f[e] * f[(e + 1) % 3]) * src[e];
      CHECK(predicted == doctest::Approx(dst[e]).epsilon(1e-10));
    }
    ++tested;
  }
}

TEST_CASE("projective_evaluate: equal factors reduce to pl, corners exact") {
  const std::array<Complex, 3> dst{Complex(0, 0), Complex(2, 0), Complex(0, 3)};
  const std::array<double, 3> equal{1.7, 1.7, 1.7};
  const double b0 = 0.2, b1 = 0.5, b2 = 0.3;
  const Complex proj = bpm::projective_evaluate(dst, equal, b0, b1, b2);
  const Complex pl = b0 * dst[0] + b1 * dst[1] + b2 * dst[2];
  CHECK(std::abs(proj - pl) < 1e-14);

  const std::array<double, 3> mixed{0.5, 2.0, 1.0};
  CHECK(std::abs(bpm::projective_evaluate(dst, mixed, 1, 0, 0) - dst[0]) < 1e-14);
  CHECK(std::abs(bpm::projective_evaluate(dst, mixed, 0, 1, 0) - dst[1]) < 1e-14);
  CHECK(std::abs(bpm::projective_evaluate(dst, mixed, 0, 0, 1) - dst[2]) < 1e-14);
}

TEST_CASE("proj interpolator: continuous on a discrete-conformal input") {
  // a global Moebius map satisfies the length relation exactly, so the
  // per-triangle factors agree along shared edges
  TriMesh mesh = ts::grid_mesh(3, 3, 1.0, 1.0);
  const auto adj = bpm::build_adjacency(mesh);
  std::mt19937_64 rng(107);
  const auto mg = ts::random_moebius_outside(mesh, rng);
  const auto map = ts::map_from(mesh, [&](Complex z) { return bpm::apply(mg, z); });
  const bpm::ProjInterpolator proj(mesh, map);

  const auto report = bpm::continuity_probe(proj, mesh, adj, 20);
  CHECK(report.global_max < 1e-9 * mesh.bbox_diagonal());
}

TEST_CASE("proj interpolator: discontinuous on a non-conformal input, pl is not") {
  TriMesh mesh = ts::grid_mesh(2, 2);
  const auto adj = bpm::build_adjacency(mesh);
  // anisotropic stretch: not a conformal equivalence
  const auto map =
      ts::map_from(mesh, [](Complex z) { return Complex(2.0 * z.real(), z.imag()); });
  const bpm::ProjInterpolator proj(mesh, map);
  const bpm::PlInterpolator pl(mesh, map);

  const auto proj_report = bpm::continuity_probe(proj, mesh, adj, 20);
  const auto pl_report = bpm::continuity_probe(pl, mesh, adj, 20);
  CHECK(proj_report.global_max > 1e-6 * mesh.bbox_diagonal());
  CHECK(pl_report.global_max < 1e-13 * mesh.bbox_diagonal());

  // factor disagreement at shared vertices is the mechanism
  bool factors_disagree = false;
  for (int t = 0; t < mesh.face_count() && !factors_disagree; ++t) {
    for (int e = 0; e < 3; ++e) {
      const int u = adj.neighbor(t, e);
      if (u == bpm::FaceAdjacency::kBoundary) continue;
      const int eu = adj.neighbor_edge(t, e);
      // corner e of t is corner eu+1 of u (opposite directions)
      const double ft = proj.face_factors(t)[e];
      const double fu = proj.face_factors(u)[(eu + 1) % 3];
      if (std::abs(ft - fu) > 1e-6) factors_disagree = true;
    }
  }
  CHECK(factors_disagree);
}

TEST_CASE("baselines interpolate vertices exactly") {
  TriMesh mesh = ts::grid_mesh(2, 3);
  const auto map = ts::map_from(mesh, [](Complex z) { return z * z + Complex(1, -1); });
  const bpm::PlInterpolator pl(mesh, map);
  const bpm::ProjInterpolator proj(mesh, map);
  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    CHECK(std::abs(pl.eval_bary(t, 1, 0, 0) - map.w[f[0]]) < 1e-14);
    CHECK(std::abs(proj.eval_bary(t, 0, 1, 0) - map.w[f[1]]) < 1e-14);
    CHECK(std::abs(proj.eval_bary(t, 0, 0, 1) - map.w[f[2]]) < 1e-14);
  }
}

TEST_SUITE_END();
