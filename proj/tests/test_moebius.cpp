#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "bpm/errors.hpp"
#include "bpm/moebius.hpp"

using bpm::Complex;
using bpm::LogMoebius;
using bpm::MoebiusMatrix;

namespace {

// Independent logarithm oracle: full eigen-decomposition with Eigen,
// principal logs forced to +-mu on the two eigenvalues.
Eigen::Matrix2cd eigen_log_oracle(const MoebiusMatrix& M) {
  Eigen::Matrix2cd A;
  A << M.a, M.b, M.c, M.d;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(A);
  Eigen::Vector2cd lam = es.eigenvalues();
  Eigen::Matrix2cd V = es.eigenvectors();
  Complex mu = std::log(lam(0));
  Eigen::Vector2cd logs(mu, -mu);
  return V * logs.asDiagonal() * V.inverse();
}

Eigen::Matrix2cd to_eigen(const LogMoebius& L) {
  Eigen::Matrix2cd A;
  A << L.a, L.b, L.c, L.d;
  return A;
}

MoebiusMatrix random_near_identity(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    MoebiusMatrix m{Complex(1.0 + radius * u(rng), radius * u(rng)),
                    Complex(radius * u(rng), radius * u(rng)),
                    Complex(radius * u(rng), radius * u(rng)),
                    Complex(1.0 + radius * u(rng), radius * u(rng))};
    if (std::abs(m.det()) < 1e-6) continue;
    MoebiusMatrix n = bpm::normalize(m);
    if (bpm::frobenius_distance(n, MoebiusMatrix::identity()) < 1.0) return n;
  }
}

}  // namespace

TEST_SUITE_BEGIN("moebius");

TEST_CASE("apply: identity, translation, inversion") {
  CHECK(bpm::apply(MoebiusMatrix::identity(), Complex(3, 4)) == Complex(3, 4));

  MoebiusMatrix shift{1, 1, 0, 1};
  CHECK(bpm::apply(shift, Complex(0, 0)) == Complex(1, 0));

  // z -> -1/z at z = 2i: hand evaluation gives 0.5i.
  MoebiusMatrix inv{0, 1, -1, 0};
  Complex w = bpm::apply(inv, Complex(0, 2));
  CHECK(std::abs(w - Complex(0, 0.5)) < 1e-15);
}

TEST_CASE("apply: pole detection") {
  MoebiusMatrix inv{0, 1, -1, 0};
  CHECK_THROWS_AS(bpm::apply(inv, Complex(0, 0)), bpm::PoleError);
}

TEST_CASE("apply: sign invariance and composition") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    MoebiusMatrix m1 = random_near_identity(rng, 0.4);
    MoebiusMatrix m2 = random_near_identity(rng, 0.4);
    Complex z(u(rng), u(rng));
    CHECK(std::abs(bpm::apply(m1, z) - bpm::apply(-m1, z)) < 1e-14);
    Complex lhs = bpm::apply(m1 * m2, z);
    Complex rhs = bpm::apply(m1, bpm::apply(m2, z));
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("normalize: diagonal cases") {
  MoebiusMatrix two{2, 0, 0, 2};
  MoebiusMatrix n = bpm::normalize(two);
  CHECK(std::abs(n.a - 1.0) < 1e-15);
  CHECK(std::abs(n.d - 1.0) < 1e-15);

  MoebiusMatrix d41{4, 0, 0, 1};
  n = bpm::normalize(d41);
  CHECK(std::abs(n.a - 2.0) < 1e-15);
  CHECK(std::abs(n.d - 0.5) < 1e-15);
}

TEST_CASE("normalize: complex det, output proportional to input") {
  MoebiusMatrix m{Complex(1, 1), 0, 0, 1};
  MoebiusMatrix n = bpm::normalize(m);
  CHECK(std::abs(n.det() - 1.0) < 1e-12);
  // output = input / s for a single scalar s
  Complex s = m.a / n.a;
  CHECK(std::abs(m.d / n.d - s) < 1e-12);
}

TEST_CASE("normalize: singular input throws") {
  MoebiusMatrix sing{1, 1, 1, 1};
  CHECK_THROWS_AS(bpm::normalize(sing), bpm::DegenerateError);
}

TEST_CASE("log_ratio: identity and -identity map to zero") {
  LogMoebius l = bpm::log_ratio(MoebiusMatrix::identity());
  CHECK(l.frobenius_norm() < 1e-15);
  l = bpm::log_ratio(-MoebiusMatrix::identity());
  CHECK(l.frobenius_norm() < 1e-15);
}

TEST_CASE("log_ratio: diag(2, 0.5) against eigen oracle") {
  MoebiusMatrix d{2, 0, 0, 0.5};
  LogMoebius l = bpm::log_ratio(d);
  CHECK(std::abs(l.a - std::log(2.0)) < 1e-14);
  CHECK(std::abs(l.d + std::log(2.0)) < 1e-14);
  CHECK(std::abs(l.b) < 1e-14);
  CHECK(std::abs(l.c) < 1e-14);

  Eigen::Matrix2cd oracle = eigen_log_oracle(d);
  CHECK((to_eigen(l) - oracle).norm() < 1e-12);
}

TEST_CASE("log_ratio: matches eigen oracle on random matrices") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 500; ++it) {
    MoebiusMatrix d = random_near_identity(rng, 0.5);
    LogMoebius l = bpm::log_ratio(d);
    Eigen::Matrix2cd oracle = eigen_log_oracle(d);
    // The oracle's branch may be the overall negation; ratios near the
    // identity agree directly.
    double direct = (to_eigen(l) - oracle).norm();
    double negated = (to_eigen(l) + oracle).norm();
    CHECK(std::min(direct, negated) < 1e-9);
  }
}

TEST_CASE("log_ratio: traceless always, roundtrip up to sign") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 1000; ++it) {
    MoebiusMatrix d = random_near_identity(rng, 0.6);
    LogMoebius l = bpm::log_ratio(d);
    CHECK(std::abs(l.trace()) < 1e-10);
    MoebiusMatrix back = bpm::exp_traceless(l);
    CHECK(bpm::distance_up_to_sign(back, d) < 1e-9);
  }
}

TEST_CASE("log_ratio: sign choice minimizes distance to identity") {
  std::mt19937_64 rng(17);
  const MoebiusMatrix id = MoebiusMatrix::identity();
  for (int it = 0; it < 1000; ++it) {
    MoebiusMatrix d = random_near_identity(rng, 0.6);
    if (it % 2 == 1) d = -d;  // exercise both input signs
    double s = d.trace().real() >= 0.0 ? 1.0 : -1.0;
    MoebiusMatrix chosen{s * d.a, s * d.b, s * d.c, s * d.d};
    CHECK(bpm::frobenius_distance(chosen, id) <=
          bpm::frobenius_distance(-chosen, id) + 1e-15);
  }
}

TEST_CASE("log_ratio: parabolic case is the nilpotent part") {
  MoebiusMatrix shear{1, Complex(0.25, -0.5), 0, 1};
  LogMoebius l = bpm::log_ratio(shear);
  CHECK(std::abs(l.a) < 1e-15);
  CHECK(std::abs(l.d) < 1e-15);
  CHECK(std::abs(l.b - Complex(0.25, -0.5)) < 1e-15);
  MoebiusMatrix back = bpm::exp_traceless(l);
  CHECK(bpm::distance_up_to_sign(back, shear) < 1e-12);
}

TEST_CASE("log_ratio: half-turn tie picks +1 and counts a diagnostic") {
  bpm::reset_trace_sign_tie_count();
  MoebiusMatrix half_turn{Complex(0, 1), 0, 0, Complex(0, -1)};
  LogMoebius l = bpm::log_ratio(half_turn);
  CHECK(bpm::trace_sign_tie_count() == 1);
  CHECK(std::abs(l.a - Complex(0, M_PI / 2)) < 1e-14);
  CHECK(std::abs(l.d + Complex(0, M_PI / 2)) < 1e-14);
  bpm::reset_trace_sign_tie_count();
}

TEST_CASE("exp_traceless: zero, diagonal, nilpotent") {
  MoebiusMatrix e = bpm::exp_traceless(LogMoebius{});
  CHECK(bpm::frobenius_distance(e, MoebiusMatrix::identity()) < 1e-15);

  LogMoebius dg{0.7, 0, 0, -0.7};
  e = bpm::exp_traceless(dg);
  CHECK(std::abs(e.a - std::exp(0.7)) < 1e-14);
  CHECK(std::abs(e.d - std::exp(-0.7)) < 1e-14);

  LogMoebius nil{0, Complex(0.3, 0.1), 0, 0};
  e = bpm::exp_traceless(nil);
  CHECK(std::abs(e.a - 1.0) < 1e-15);
  CHECK(std::abs(e.b - Complex(0.3, 0.1)) < 1e-15);
  CHECK(std::abs(e.c) < 1e-15);
  CHECK(std::abs(e.d - 1.0) < 1e-15);
}

TEST_CASE("exp_traceless: det 1 and taylor branch continuity") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 500; ++it) {
    Complex a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    LogMoebius l{a, b, c, -a};
    MoebiusMatrix e = bpm::exp_traceless(l);
    CHECK(std::abs(e.det() - 1.0) < 1e-10);
  }
  // tiny q on both sides of the taylor cutoff
  for (double s : {1e-7, 9.9e-7, 1.01e-6, 1e-5}) {
    LogMoebius l{s, s, s, -s};
    MoebiusMatrix e = bpm::exp_traceless(l);
    CHECK(std::abs(e.det() - 1.0) < 1e-12);
  }
}

TEST_CASE("exp_traceless: rejects non-traceless input") {
  LogMoebius bad{1e-3, 0, 0, 0};
  CHECK_THROWS_AS(bpm::exp_traceless(bad), bpm::InvalidTraceError);
}

TEST_CASE("sqrt_ratio: fixed cases") {
  MoebiusMatrix s = bpm::sqrt_ratio(MoebiusMatrix::identity());
  CHECK(bpm::distance_up_to_sign(s, MoebiusMatrix::identity()) < 1e-15);

  MoebiusMatrix d{4, 0, 0, 0.25};
  s = bpm::sqrt_ratio(d);
  CHECK(std::abs(s.a - 2.0) < 1e-14);
  CHECK(std::abs(s.d - 0.5) < 1e-14);
}

TEST_CASE("sqrt_ratio: squaring reproduces +-D on 1000 random matrices") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 1000; ++it) {
    MoebiusMatrix d = random_near_identity(rng, 0.6);
    MoebiusMatrix s = bpm::sqrt_ratio(d);
    CHECK(bpm::distance_up_to_sign(s * s, d) < 1e-10);
  }
}

TEST_SUITE_END();
