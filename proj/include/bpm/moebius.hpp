#pragma once

#include <atomic>
#include <complex>

namespace bpm {

using Complex = std::complex<double>;

// A point closer than this to the pole of a transformation is rejected.
inline constexpr double kPoleEps = 1e-14;
// Matrices with |det| below this are considered singular.
inline constexpr double kDetEps = 1e-14;
// Parabolic detection: |tr - 2| below this means a non-diagonalizable
// unipotent matrix, handled by the exact nilpotent logarithm.
inline constexpr double kParabolicEps = 1e-10;
// Eigenvalues within this distance of the negative real axis sit on the
// logarithm branch cut.
inline constexpr double kBranchEps = 1e-12;
// Taylor cutoff for sinh(q)/q; below this the three-term series is
// accurate to ~1e-24 relative.
inline constexpr double kSinchTaylorCutoff = 1e-6;

// Traceless 2x2 complex matrix, the logarithm of a Moebius ratio.
// Supports the linear operations needed for barycentric blending.
struct LogMoebius {
  Complex a{0.0}, b{0.0}, c{0.0}, d{0.0};

  Complex trace() const { return a + d; }
  Complex det() const { return a * d - b * c; }
  double frobenius_norm() const;

  LogMoebius operator-() const { return {-a, -b, -c, -d}; }
  LogMoebius& operator+=(const LogMoebius& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
};

inline LogMoebius operator+(LogMoebius lhs, const LogMoebius& rhs) { return lhs += rhs; }
inline LogMoebius operator*(double s, const LogMoebius& L) {
  return {s * L.a, s * L.b, s * L.c, s * L.d};
}

// 2x2 complex matrix representing z -> (az+b)/(cz+d). Normalized matrices
// have det = 1 and are unique up to a global sign; M and -M are the same
// transformation, so all comparisons go through the up-to-sign helpers.
struct MoebiusMatrix {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static MoebiusMatrix identity() { return {}; }

  Complex det() const { return a * d - b * c; }
  Complex trace() const { return a + d; }
  double frobenius_norm() const;

  // Inverse of a det-1 matrix (the adjugate).
  MoebiusMatrix inverse() const { return {d, -b, -c, a}; }

  MoebiusMatrix operator-() const { return {-a, -b, -c, -d}; }
};

MoebiusMatrix operator*(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs);

// (az+b)/(cz+d). Throws PoleError when z hits the pole of M.
Complex apply(const MoebiusMatrix& M, Complex z);

// M / sqrt(det M), principal square root. The result represents the same
// transformation and has det = 1 (up to the usual sign ambiguity).
// Throws DegenerateError on singular input.
MoebiusMatrix normalize(const MoebiusMatrix& M);

// Traceless logarithm of sign(Tr Re D) * D, i.e. of whichever of +-D is
// closer to the identity in Frobenius norm. Throws BranchError when the
// sign-corrected matrix has eigenvalues on the negative real axis.
LogMoebius log_ratio(const MoebiusMatrix& D);

// Closed-form exponential of a traceless 2x2 matrix:
//   exp(L) = cosh(q) I + sinh(q)/q L,  q = sqrt(-det L).
// Throws InvalidTraceError if |trace L| > 1e-10.
MoebiusMatrix exp_traceless(const LogMoebius& L);

// exp(log_ratio(D) / 2); squaring it reproduces +-D.
MoebiusMatrix sqrt_ratio(const MoebiusMatrix& D);

// ||A - B||_F.
double frobenius_distance(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs);

// min(||A - B||_F, ||A + B||_F): distance between transformations rather
// than matrices.
double distance_up_to_sign(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs);

inline bool approx_equal_up_to_sign(const MoebiusMatrix& lhs, const MoebiusMatrix& rhs,
                                    double tol) {
  return distance_up_to_sign(lhs, rhs) <= tol;
}

// Number of log_ratio calls that hit the undefined Tr(Re D) = 0 tie so
// far (the convention there is s = +1). Diagnostic only.
int64_t trace_sign_tie_count();
void reset_trace_sign_tie_count();

}  // namespace bpm
