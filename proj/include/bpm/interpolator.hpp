#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "bpm/mesh.hpp"
#include "bpm/moebius.hpp"
#include "bpm/parallel.hpp"
#include "bpm/pcm.hpp"

namespace bpm {

// Normalized edge barycentric weights of a point inside a triangle: the
// weight of an edge tends to 1 on that edge's interior and the three sum
// to 1. Computed from unsigned distances to the edges' supporting lines.
struct EdgeBarycentric {
  double ij = 0.0, jk = 0.0, ki = 0.0;
};

// Throws VertexProximityError when z is within vertex_eps of a corner
// (the weights have no limit there; callers snap to the vertex instead)
// and DegenerateError on a collapsed triangle.
EdgeBarycentric edge_barycentric(Complex z, Complex zi, Complex zj, Complex zk,
                                 double vertex_eps);

// Everything needed to evaluate inside one face: its matrix, the log
// ratios toward the three edge neighbors (zero on boundary edges, which
// pins the ratio to the identity), and the source corners in the frame
// evaluation happens in (global plane, or the local hinge flattening for
// surfaces).
struct FaceBlendData {
  MoebiusMatrix m;
  std::array<LogMoebius, 3> edge_log;
  std::array<Complex, 3> corners;
};

// gamma-weighted combination of the three edge logs; traceless by
// linearity.
LogMoebius blend_log_ratio(const FaceBlendData& data, const EdgeBarycentric& gamma);

// Common surface for the evaluators the analysis and render passes
// sample: a map defined per face via barycentric coordinates.
class Interpolator {
 public:
  virtual ~Interpolator() = default;
  virtual Complex eval_bary(int face, double b0, double b1, double b2) const = 0;
  virtual std::string_view name() const = 0;
};

// The blended piecewise Moebius interpolator. Immutable after build;
// evaluation is pure and thread-safe.
class BpmInterpolator : public Interpolator {
 public:
  // Fits the per-face matrices from the map and precomputes all edge log
  // ratios (for surfaces: per-face hinge flattenings and local fits).
  static BpmInterpolator build(const TriMesh& mesh, const FaceAdjacency& adj,
                               const DiscreteMap& map, Exec exec = Exec::Parallel);

  // Matrix-level build from an explicit per-face matrix set on a planar
  // mesh; used to exercise equivariance at the matrix level. Vertex
  // snapping targets apply(M_t, z_v).
  static BpmInterpolator from_matrices(const TriMesh& mesh, const FaceAdjacency& adj,
                                       std::vector<MoebiusMatrix> matrices,
                                       Exec exec = Exec::Parallel);

  // Planar evaluation at z in (closed) face t. Snaps to the target when z
  // is within vertex_snap_eps of a corner.
  Complex evaluate(int face, Complex z) const;

  // Surface evaluation at a 3D point of face t, through the precomputed
  // hinge flattening.
  Complex evaluate_curved(int face, const Eigen::Vector3d& x) const;

  Complex eval_bary(int face, double b0, double b1, double b2) const override;
  std::string_view name() const override { return "bpm"; }

  // The blended matrix O(z) for z in face t, in the face's evaluation
  // frame; no vertex snapping. det = 1 up to roundoff.
  MoebiusMatrix blended_matrix(int face, Complex z) const;

  const FaceBlendData& face_data(int face) const { return faces_[face]; }
  const MoebiusMatrix& face_matrix(int face) const { return faces_[face].m; }
  double vertex_snap_eps() const { return vertex_eps_; }
  const TriMesh& mesh() const { return *mesh_; }

  // Target position of a vertex (W, or apply(M_t, z_v) for matrix-level
  // builds).
  Complex vertex_target(int face, int corner) const { return corner_targets_[face][corner]; }

 private:
  BpmInterpolator() = default;
  static BpmInterpolator build_planar(const TriMesh& mesh, const FaceAdjacency& adj,
                                      std::vector<MoebiusMatrix> matrices,
                                      const DiscreteMap* map, Exec exec);
  static BpmInterpolator build_curved(const TriMesh& mesh, const FaceAdjacency& adj,
                                      const DiscreteMap& map, Exec exec);
  Complex evaluate_in_frame(int face, Complex z) const;

  const TriMesh* mesh_ = nullptr;  // non-owning; caller keeps the mesh alive
  std::vector<FaceBlendData> faces_;
  std::vector<std::array<Complex, 3>> corner_targets_;
  double vertex_eps_ = 0.0;
};

}  // namespace bpm
