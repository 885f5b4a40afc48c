#pragma once

#include <limits>
#include <vector>

#include "bpm/mesh.hpp"
#include "bpm/moebius.hpp"
#include "bpm/parallel.hpp"

namespace bpm {

// Vertex-indexed target positions in the complex plane.
struct DiscreteMap {
  std::vector<Complex> w;
};

// QC value reported for flipped or degenerate targets.
inline constexpr double kQcInfinity = std::numeric_limits<double>::infinity();

// The per-face Moebius matrices induced by a discrete map, together with
// the corner variables X_{t,i} = 1/(c_t z_i + d_t). Compatible by
// construction: adjacent faces agree on the images of shared vertices.
struct PcmMap {
  std::vector<MoebiusMatrix> face_matrix;
  std::vector<std::array<Complex, 3>> corner_x;
};

// The unique normalized Moebius transformation with z_n -> w_n, built by
// composing the standard maps of both triples onto (0, 1, inf). Points
// must be pairwise distinct on both sides.
MoebiusMatrix fit_face_moebius(Complex z1, Complex z2, Complex z3, Complex w1, Complex w2,
                               Complex w3);

// Fits every face of a planar mesh. Throws DegenerateError carrying the
// face id.
PcmMap build_pcm(const TriMesh& mesh, const DiscreteMap& map, Exec exec = Exec::Parallel);

// Per-vertex max|X|/min|X| - 1 over incident corners; 0 means the map is
// a discrete conformal equivalence at that vertex.
std::vector<double> cetm_deviation(const TriMesh& mesh, const PcmMap& pcm);

// sigma_max / sigma_min of the linear map between two planar triangles;
// kQcInfinity for flipped or degenerate targets. Throws DegenerateError
// on a zero-area source.
double face_qc_error(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst);

// Same for a 3D source triangle, measured through its isometric
// flattening (orientation from the face's vertex order).
double face_qc_error_3d(const std::array<Eigen::Vector3d, 3>& src,
                        const std::array<Complex, 3>& dst);

}  // namespace bpm
