#include "bpm/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <utility>

#include "bpm/errors.hpp"

namespace bpm {

namespace {

double face_area_3d(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                    const Eigen::Vector3d& p2) {
  return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

double signed_area_2d(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                      const Eigen::Vector3d& p2) {
  return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

}  // namespace

TriMesh TriMesh::create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(std::numeric_limits<double>::lowest());
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double xy_diag = vertices.empty() ? 0.0 : (hi - lo).head<2>().norm();
  const double z_extent = vertices.empty() ? 0.0 : hi.z() - lo.z();
  Dim dim = z_extent <= 1e-9 * xy_diag ? Dim::Planar : Dim::Surface;
  return create(std::move(vertices), std::move(faces), dim);
}

TriMesh TriMesh::create(std::vector<Eigen::Vector3d> vertices,
                        std::vector<std::array<int, 3>> faces, Dim dim) {
  TriMesh mesh;
  mesh.dim_ = dim;

  if (vertices.empty() || faces.empty()) throw DegenerateError("empty mesh");

  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(std::numeric_limits<double>::lowest());
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw DegenerateError("non-finite vertex coordinate");
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  mesh.bbox_diagonal_ = (hi - lo).norm();
  const double area_floor = 1e-12 * mesh.bbox_diagonal_ * mesh.bbox_diagonal_;

  const int nv = static_cast<int>(vertices.size());
  for (size_t t = 0; t < faces.size(); ++t) {
    const auto& f = faces[t];
    for (int c = 0; c < 3; ++c) {
      if (f[c] < 0 || f[c] >= nv)
        throw ParseError("face " + std::to_string(t) + " references invalid vertex");
    }
    if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0])
      throw DegenerateError("face " + std::to_string(t) + " repeats a vertex");
    const auto& p0 = vertices[f[0]];
    const auto& p1 = vertices[f[1]];
    const auto& p2 = vertices[f[2]];
    if (dim == Dim::Planar) {
      double sa = signed_area_2d(p0, p1, p2);
      if (sa <= area_floor)
        throw DegenerateError("planar face " + std::to_string(t) +
                              " is degenerate or flipped (signed area " + std::to_string(sa) +
                              ")");
    } else {
      if (face_area_3d(p0, p1, p2) <= area_floor)
        throw DegenerateError("face " + std::to_string(t) + " has ~zero area");
    }
  }

  mesh.vertices_ = std::move(vertices);
  mesh.faces_ = std::move(faces);
  return mesh;
}

std::array<Complex, 3> TriMesh::planar_corners(int t) const {
  const auto& f = faces_[t];
  return {planar_vertex(f[0]), planar_vertex(f[1]), planar_vertex(f[2])};
}

TriMesh TriMesh::as_surface() const {
  TriMesh copy = *this;
  copy.dim_ = Dim::Surface;
  return copy;
}

FaceAdjacency build_adjacency(const TriMesh& mesh) {
  FaceAdjacency adj;
  const int nf = mesh.face_count();
  adj.neighbor_.assign(nf, {FaceAdjacency::kBoundary, FaceAdjacency::kBoundary,
                            FaceAdjacency::kBoundary});
  adj.neighbor_edge_.assign(nf, {-1, -1, -1});
  adj.opposite_vertex_.assign(nf, {-1, -1, -1});

  // Directed half-edge -> (face, local edge). A manifold oriented mesh
  // has each directed edge at most once and pairs it with its reverse.
  std::map<std::pair<int, int>, std::pair<int, int>> half_edges;
  for (int t = 0; t < nf; ++t) {
    const auto& f = mesh.face(t);
    for (int e = 0; e < 3; ++e) {
      int va = f[e];
      int vb = f[(e + 1) % 3];
      auto [it, inserted] = half_edges.try_emplace({va, vb}, std::make_pair(t, e));
      if (!inserted)
        throw NonManifoldError("edge (" + std::to_string(va) + "," + std::to_string(vb) +
                               ") traversed twice in the same direction");
      (void)it;
    }
  }

  for (const auto& [key, val] : half_edges) {
    auto rev = half_edges.find({key.second, key.first});
    if (rev == half_edges.end()) continue;  // boundary
    const auto [t, e] = val;
    const auto [u, eu] = rev->second;
    adj.neighbor_[t][e] = u;
    adj.neighbor_edge_[t][e] = eu;
    adj.opposite_vertex_[t][e] = mesh.face(u)[(eu + 2) % 3];
    if (t < u) ++adj.interior_edges_;
  }
  return adj;
}

namespace {

// Planar position of the point at distance da from a and db from b,
// on the given side of the segment a->b (side > 0: left / upper).
Complex place_by_distances(Complex a, Complex b, double da, double db, double side) {
  const Complex ab = b - a;
  const double len = std::abs(ab);
  if (len < 1e-300) throw DegenerateError("hinge edge collapses");
  const double along = (da * da - db * db + len * len) / (2.0 * len);
  const double perp_sq = da * da - along * along;
  const double perp = perp_sq > 0.0 ? std::sqrt(perp_sq) : 0.0;
  const Complex dir = ab / len;
  const Complex normal = Complex(0, 1) * dir;  // left of a->b
  return a + along * dir + side * perp * normal;
}

}  // namespace

HingePatch hinge_flatten(const TriMesh& mesh, const FaceAdjacency& adj, int t) {
  HingePatch patch;
  patch.face = t;
  const auto& f = mesh.face(t);
  const Eigen::Vector3d& xi = mesh.position(f[0]);
  const Eigen::Vector3d& xj = mesh.position(f[1]);
  const Eigen::Vector3d& xk = mesh.position(f[2]);

  const double lij = (xj - xi).norm();
  const double lik = (xk - xi).norm();
  const double ljk = (xk - xj).norm();
  if (lij < 1e-300) throw DegenerateError("degenerate face in hinge_flatten");

  // z_i at the origin, z_j on the positive real axis, z_k above.
  const Complex zi(0, 0);
  const Complex zj(lij, 0);
  const Complex zk = place_by_distances(zi, zj, lik, ljk, +1.0);
  if (zk.imag() <= 0.0) throw DegenerateError("degenerate face in hinge_flatten");
  patch.corners = {zi, zj, zk};

  // Unfold each neighbor's apex about the shared edge, away from t. The
  // shared edge of neighbor e runs from corner e to corner e+1; t lies to
  // its left, so the apex goes right.
  for (int e = 0; e < 3; ++e) {
    if (adj.is_boundary(t, e)) continue;
    const int opp = adj.opposite_vertex(t, e);
    const int va = f[e];
    const int vb = f[(e + 1) % 3];
    const double da = (mesh.position(opp) - mesh.position(va)).norm();
    const double db = (mesh.position(opp) - mesh.position(vb)).norm();
    const Complex pa = patch.corners[e];
    const Complex pb = patch.corners[(e + 1) % 3];
    patch.opposite[e] = place_by_distances(pa, pb, da, db, -1.0);
    patch.has_neighbor[e] = true;
    patch.opposite_vertex[e] = opp;
  }
  return patch;
}

}  // namespace bpm
