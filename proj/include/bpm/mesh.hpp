#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "bpm/moebius.hpp"

namespace bpm {

// Indexed triangle mesh, either embedded in the plane (z = 0, faces
// counterclockwise, no flips) or a surface in R^3. Manifold with
// boundary; no zero-area faces. Immutable once built.
class TriMesh {
 public:
  enum class Dim { Planar, Surface };

  // Validates finiteness, index ranges, face areas and (for planar
  // meshes) positive orientation. Throws DegenerateError /
  // NonManifoldError. When dim is not given it is inferred: planar iff
  // the z-extent is below 1e-9 of the xy-diagonal.
  static TriMesh create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces);
  static TriMesh create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces, Dim dim);

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  const Eigen::Vector3d& position(int v) const { return vertices_[v]; }
  const std::array<int, 3>& face(int t) const { return faces_[t]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  Dim dim() const { return dim_; }
  bool planar() const { return dim_ == Dim::Planar; }

  // Planar meshes only: vertex as a point of the complex plane.
  Complex planar_vertex(int v) const { return {vertices_[v].x(), vertices_[v].y()}; }
  std::array<Complex, 3> planar_corners(int t) const;

  double edge_length(int va, int vb) const { return (vertices_[va] - vertices_[vb]).norm(); }
  double bbox_diagonal() const { return bbox_diagonal_; }

  // Same geometry re-tagged as a surface; planar data run through the
  // curved pipeline must match the planar one.
  TriMesh as_surface() const;

 private:
  TriMesh() = default;
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::array<int, 3>> faces_;
  Dim dim_ = Dim::Planar;
  double bbox_diagonal_ = 0.0;
};

// For face t = (i, j, k), the neighbor across e_ij, e_jk, e_ki in that
// order, or kBoundary.
class FaceAdjacency {
 public:
  static constexpr int kBoundary = -1;

  const std::array<int, 3>& neighbors(int t) const { return neighbor_[t]; }
  int neighbor(int t, int edge) const { return neighbor_[t][edge]; }
  bool is_boundary(int t, int edge) const { return neighbor_[t][edge] == kBoundary; }

  // Local index (0/1/2) of the same edge within neighbor(t, edge); -1 on
  // boundary.
  int neighbor_edge(int t, int edge) const { return neighbor_edge_[t][edge]; }

  // Vertex of neighbor(t, edge) opposite the shared edge; -1 on boundary.
  int opposite_vertex(int t, int edge) const { return opposite_vertex_[t][edge]; }

  int interior_edge_count() const { return interior_edges_; }

 private:
  friend FaceAdjacency build_adjacency(const TriMesh&);
  std::vector<std::array<int, 3>> neighbor_;
  std::vector<std::array<int, 3>> neighbor_edge_;
  std::vector<std::array<int, 3>> opposite_vertex_;  // vertex of the neighbor not on the edge
  int interior_edges_ = 0;
};

// Throws NonManifoldError if an edge has more than two incident faces or
// two faces traverse it in the same direction.
FaceAdjacency build_adjacency(const TriMesh& mesh);

// Face t and its up-to-three edge neighbors laid out isometrically in the
// plane: t's corners counterclockwise with z_i at the origin and z_j on
// the positive real axis, each neighbor's apex unfolded about the shared
// edge onto the side away from t.
struct HingePatch {
  int face = -1;
  std::array<Complex, 3> corners{};            // images of t's corners i, j, k
  std::array<Complex, 3> opposite{};           // apex across e_ij, e_jk, e_ki
  std::array<bool, 3> has_neighbor{false, false, false};
  std::array<int, 3> opposite_vertex{-1, -1, -1};
};

HingePatch hinge_flatten(const TriMesh& mesh, const FaceAdjacency& adj, int t);

}  // namespace bpm
