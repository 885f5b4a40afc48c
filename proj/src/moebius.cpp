#include "bpm/moebius.hpp"

#include <cmath>

#include "bpm/errors.hpp"

namespace bpm {

namespace {

std::atomic<int64_t> g_trace_tie_count{0};

double norm_sq(const Complex& z) { return std::norm(z); }

}  // namespace

int64_t trace_sign_tie_count() { return g_trace_tie_count.load(); }
void reset_trace_sign_tie_count() { g_trace_tie_count.store(0); }

double LogMoebius::frobenius_norm() const {
  return std::sqrt(norm_sq(a) + norm_sq(b) + norm_sq(c) + norm_sq(d));
}

double MoebiusMatrix::frobenius_norm() const {
  return std::sqrt(norm_sq(a) + norm_sq(b) + norm_sq(c) + norm_sq(d));
}

MoebiusMatrix operator*(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs) {
  return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
          lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

Complex apply(const MoebiusMatrix& M, Complex z) {
  const Complex denom = M.c * z + M.d;
  if (std::abs(denom) < kPoleEps) throw PoleError("evaluation point hits the pole of the transformation");
  return (M.a * z + M.b) / denom;
}

MoebiusMatrix normalize(const MoebiusMatrix& M) {
  const Complex det = M.det();
  if (std::abs(det) < kDetEps) throw DegenerateError("singular matrix cannot be normalized");
  const Complex s = std::sqrt(det);
  return {M.a / s, M.b / s, M.c / s, M.d / s};
}

LogMoebius log_ratio(const MoebiusMatrix& D) {
  const Complex tr_d = D.trace();
  double sign = 1.0;
  if (tr_d.real() < 0.0) {
    sign = -1.0;
  } else if (tr_d.real() == 0.0) {
    // Undefined in theory (both signs equally far from the identity);
    // we pick +1 and count the event.
    g_trace_tie_count.fetch_add(1, std::memory_order_relaxed);
  }
  const MoebiusMatrix T{sign * D.a, sign * D.b, sign * D.c, sign * D.d};
  const Complex tr = T.trace();

  // Unipotent: T = I + N with N^2 = 0 by Cayley-Hamilton, log(I+N) = N.
  if (std::abs(tr - 2.0) < kParabolicEps) {
    return {T.a - 1.0, T.b, T.c, T.d - 1.0};
  }

  // Eigenvalues lam, 1/lam solve lam^2 - tr lam + 1 = 0. Pick the root of
  // larger magnitude to avoid cancellation; their difference is +-disc.
  Complex disc = std::sqrt(tr * tr - 4.0);
  if ((std::conj(tr) * disc).real() < 0.0) disc = -disc;
  const Complex lam = 0.5 * (tr + disc);

  if (lam.real() < 0.0 && std::abs(lam.imag()) < kBranchEps) {
    throw BranchError("ratio eigenvalues on the negative real axis; no stable logarithm branch");
  }

  // For f analytic with f(lam) = mu, f(1/lam) = -mu forced:
  //   log T = mu (2T - tr I) / (lam - 1/lam),  lam - 1/lam = disc.
  // Traceless by construction, which the blend requires.
  const Complex mu = std::log(lam);
  const Complex k = mu / disc;
  return {k * (2.0 * T.a - tr), k * (2.0 * T.b), k * (2.0 * T.c), k * (2.0 * T.d - tr)};
}

MoebiusMatrix exp_traceless(const LogMoebius& L) {
  if (std::abs(L.trace()) > 1e-10) {
    throw InvalidTraceError("exp_traceless requires a traceless matrix");
  }
  const Complex q = std::sqrt(-L.det());
  Complex ch, sh_over_q;
  if (std::abs(q) < kSinchTaylorCutoff) {
    const Complex q2 = q * q;
    ch = 1.0 + q2 * (0.5 + q2 / 24.0);
    sh_over_q = 1.0 + q2 * (1.0 / 6.0 + q2 / 120.0);
  } else {
    ch = std::cosh(q);
    sh_over_q = std::sinh(q) / q;
  }
  return {ch + sh_over_q * L.a, sh_over_q * L.b, sh_over_q * L.c, ch + sh_over_q * L.d};
}

MoebiusMatrix sqrt_ratio(const MoebiusMatrix& D) { return exp_traceless(0.5 * log_ratio(D)); }

double frobenius_distance(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs) {
  return std::sqrt(norm_sq(lhs.a - rhs.a) + norm_sq(lhs.b - rhs.b) + norm_sq(lhs.c - rhs.c) +
                   norm_sq(lhs.d - rhs.d));
}

double distance_up_to_sign(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs) {
  return std::min(frobenius_distance(lhs, rhs), frobenius_distance(lhs, -rhs));
}

}  // namespace bpm
