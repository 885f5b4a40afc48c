#include "bpm/interpolator.hpp"

#include <cmath>
#include <sstream>

#include "bpm/errors.hpp"

namespace bpm {

namespace {

double line_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len = std::abs(ab);
  if (len < 1e-300) throw DegenerateError("edge of zero length");
  const Complex az = z - a;
  return std::abs(az.real() * ab.imag() - az.imag() * ab.real()) / len;
}

}  // namespace

EdgeBarycentric edge_barycentric(Complex z, Complex zi, Complex zj, Complex zk,
                                 double vertex_eps) {
  if (std::abs(z - zi) < vertex_eps || std::abs(z - zj) < vertex_eps ||
      std::abs(z - zk) < vertex_eps) {
    throw VertexProximityError("query point within epsilon of a corner");
  }
  const double rij = line_distance(z, zi, zj);
  const double rjk = line_distance(z, zj, zk);
  const double rki = line_distance(z, zk, zi);
  const double s = rjk * rki + rij * rjk + rij * rki;
  if (s <= 0.0) throw VertexProximityError("query point at a corner (all edge distances vanish)");
  return {rjk * rki / s, rij * rki / s, rij * rjk / s};
}

LogMoebius blend_log_ratio(const FaceBlendData& data, const EdgeBarycentric& gamma) {
  return gamma.ij * data.edge_log[0] + gamma.jk * data.edge_log[1] + gamma.ki * data.edge_log[2];
}

BpmInterpolator BpmInterpolator::build(const TriMesh& mesh, const FaceAdjacency& adj,
                                       const DiscreteMap& map, Exec exec) {
  if (static_cast<int>(map.w.size()) != mesh.vertex_count())
    throw DegenerateError("map size does not match vertex count");
  for (const Complex& w : map.w) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw DegenerateError("non-finite target position");
  }
  if (mesh.planar()) {
    PcmMap pcm = build_pcm(mesh, map, exec);
    return build_planar(mesh, adj, std::move(pcm.face_matrix), &map, exec);
  }
  return build_curved(mesh, adj, map, exec);
}

BpmInterpolator BpmInterpolator::from_matrices(const TriMesh& mesh, const FaceAdjacency& adj,
                                               std::vector<MoebiusMatrix> matrices, Exec exec) {
  if (!mesh.planar()) throw DegenerateError("from_matrices requires a planar mesh");
  if (static_cast<int>(matrices.size()) != mesh.face_count())
    throw DegenerateError("matrix count does not match face count");
  return build_planar(mesh, adj, std::move(matrices), nullptr, exec);
}

BpmInterpolator BpmInterpolator::build_planar(const TriMesh& mesh, const FaceAdjacency& adj,
                                              std::vector<MoebiusMatrix> matrices,
                                              const DiscreteMap* map, Exec exec) {
  BpmInterpolator interp;
  interp.mesh_ = &mesh;
  interp.vertex_eps_ = 1e-12 * mesh.bbox_diagonal();
  const int nf = mesh.face_count();
  interp.faces_.resize(nf);
  interp.corner_targets_.resize(nf);

  std::vector<std::string> failures(nf);

  // Pass 1: per-face frame data plus the log ratio of each interior edge,
  // computed once on the side with the smaller face id.
  parallel_for(exec, nf, [&](int64_t ti) {
    const int t = static_cast<int>(ti);
    const auto& f = mesh.face(t);
    FaceBlendData& data = interp.faces_[t];
    data.m = matrices[t];
    data.corners = mesh.planar_corners(t);
    for (int c = 0; c < 3; ++c) {
      interp.corner_targets_[t][c] =
          map ? map->w[f[c]] : bpm::apply(matrices[t], data.corners[c]);
    }
    const MoebiusMatrix mt_inv = matrices[t].inverse();
    for (int e = 0; e < 3; ++e) {
      const int u = adj.neighbor(t, e);
      if (u == FaceAdjacency::kBoundary || u < t) continue;
      try {
        data.edge_log[e] = log_ratio(matrices[u] * mt_inv);
      } catch (const Error& err) {
        failures[t] = "edge of face " + std::to_string(t) + ": " + err.what();
      }
    }
  });

  // Pass 2: the opposite orientation of each edge is the negation
  // (delta_ut = delta_tu^{-1} and the sign rule commutes with inversion).
  parallel_for(exec, nf, [&](int64_t ti) {
    const int t = static_cast<int>(ti);
    for (int e = 0; e < 3; ++e) {
      const int u = adj.neighbor(t, e);
      if (u == FaceAdjacency::kBoundary || u > t) continue;
      interp.faces_[t].edge_log[e] = -interp.faces_[u].edge_log[adj.neighbor_edge(t, e)];
    }
  });

  for (const auto& fail : failures)
    if (!fail.empty()) throw BranchError(fail);
  return interp;
}

BpmInterpolator BpmInterpolator::build_curved(const TriMesh& mesh, const FaceAdjacency& adj,
                                              const DiscreteMap& map, Exec exec) {
  BpmInterpolator interp;
  interp.mesh_ = &mesh;
  interp.vertex_eps_ = 1e-12 * mesh.bbox_diagonal();
  const int nf = mesh.face_count();
  interp.faces_.resize(nf);
  interp.corner_targets_.resize(nf);

  std::vector<std::string> failures(nf);
  parallel_for(exec, nf, [&](int64_t ti) {
    const int t = static_cast<int>(ti);
    const auto& f = mesh.face(t);
    try {
      const HingePatch patch = hinge_flatten(mesh, adj, t);
      FaceBlendData& data = interp.faces_[t];
      data.corners = patch.corners;
      data.m = fit_face_moebius(patch.corners[0], patch.corners[1], patch.corners[2],
                                map.w[f[0]], map.w[f[1]], map.w[f[2]]);
      for (int c = 0; c < 3; ++c) interp.corner_targets_[t][c] = map.w[f[c]];
      const MoebiusMatrix mt_inv = data.m.inverse();
      for (int e = 0; e < 3; ++e) {
        if (!patch.has_neighbor[e]) continue;  // boundary: identity ratio
        const MoebiusMatrix mu = fit_face_moebius(
            patch.corners[e], patch.corners[(e + 1) % 3], patch.opposite[e], map.w[f[e]],
            map.w[f[(e + 1) % 3]], map.w[patch.opposite_vertex[e]]);
        data.edge_log[e] = log_ratio(mu * mt_inv);
      }
    } catch (const Error& err) {
      failures[t] = "face " + std::to_string(t) + ": " + err.what();
    }
  });
  for (const auto& fail : failures)
    if (!fail.empty()) throw DegenerateError(fail);
  return interp;
}

Complex BpmInterpolator::evaluate_in_frame(int face, Complex z) const {
  const FaceBlendData& data = faces_[face];
  for (int c = 0; c < 3; ++c) {
    if (std::abs(z - data.corners[c]) < vertex_eps_) return corner_targets_[face][c];
  }
  const EdgeBarycentric gamma =
      edge_barycentric(z, data.corners[0], data.corners[1], data.corners[2], vertex_eps_);
  const MoebiusMatrix blended = exp_traceless(0.5 * blend_log_ratio(data, gamma)) * data.m;
  try {
    return bpm::apply(blended, z);
  } catch (const PoleError&) {
    std::ostringstream msg;
    msg << "blended transformation pole hit in face " << face << " at (" << z.real() << ", "
        << z.imag() << ")";
    throw PoleError(msg.str());
  }
}

Complex BpmInterpolator::evaluate(int face, Complex z) const {
  return evaluate_in_frame(face, z);
}

Complex BpmInterpolator::evaluate_curved(int face, const Eigen::Vector3d& x) const {
  // Barycentric coordinates of x with respect to the 3D face, then the
  // corresponding point of the isometric flattening.
  const auto& f = mesh_->face(face);
  const Eigen::Vector3d& p0 = mesh_->position(f[0]);
  const Eigen::Vector3d e1 = mesh_->position(f[1]) - p0;
  const Eigen::Vector3d e2 = mesh_->position(f[2]) - p0;
  const Eigen::Vector3d d = x - p0;
  const double d11 = e1.squaredNorm();
  const double d12 = e1.dot(e2);
  const double d22 = e2.squaredNorm();
  const double det = d11 * d22 - d12 * d12;
  if (det <= 0.0) throw DegenerateError("degenerate face in evaluate_curved");
  const double b1 = (d22 * e1.dot(d) - d12 * e2.dot(d)) / det;
  const double b2 = (d11 * e2.dot(d) - d12 * e1.dot(d)) / det;
  return eval_bary(face, 1.0 - b1 - b2, b1, b2);
}

Complex BpmInterpolator::eval_bary(int face, double b0, double b1, double b2) const {
  const FaceBlendData& data = faces_[face];
  const Complex z = b0 * data.corners[0] + b1 * data.corners[1] + b2 * data.corners[2];
  return evaluate_in_frame(face, z);
}

MoebiusMatrix BpmInterpolator::blended_matrix(int face, Complex z) const {
  const FaceBlendData& data = faces_[face];
  const EdgeBarycentric gamma =
      edge_barycentric(z, data.corners[0], data.corners[1], data.corners[2], vertex_eps_);
  return exp_traceless(0.5 * blend_log_ratio(data, gamma)) * data.m;
}

}  // namespace bpm
