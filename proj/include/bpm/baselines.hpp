#pragma once

#include <vector>

#include "bpm/interpolator.hpp"
#include "bpm/mesh.hpp"
#include "bpm/pcm.hpp"

namespace bpm {

// Barycentric image of z under the affine map (z1,z2,z3) -> (w1,w2,w3).
Complex pl_evaluate(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst,
                    Complex z);

// Per-corner scale factors e^{u_i}, e^{u_j}, e^{u_k} of one triangle:
// the unique solution of l'_e = e^{(u_a+u_b)/2} l_e over its three edges,
// solved in log space. Lengths must be positive.
std::array<double, 3> projective_scale_factors(const std::array<double, 3>& src_lengths,
                                               const std::array<double, 3>& dst_lengths);

// Scale-weighted homogeneous combination: with barycentric coordinates
// alpha and factors s, returns (sum alpha_n s_n w_n) / (sum alpha_n s_n).
Complex projective_evaluate(const std::array<Complex, 3>& dst, const std::array<double, 3>& scale,
                            double a0, double a1, double a2);

// Piecewise-linear interpolator over a mesh + map.
class PlInterpolator : public Interpolator {
 public:
  PlInterpolator(const TriMesh& mesh, const DiscreteMap& map);
  Complex eval_bary(int face, double b0, double b1, double b2) const override;
  std::string_view name() const override { return "pl"; }

  // Planar convenience entry: z in face t.
  Complex evaluate(int face, Complex z) const;

 private:
  const TriMesh* mesh_;
  const DiscreteMap* map_;
};

// Projective interpolator with per-triangle scale factors. Continuous
// across an edge only when the two faces' factors agree at the shared
// vertices (exactly the discrete-conformal case).
class ProjInterpolator : public Interpolator {
 public:
  ProjInterpolator(const TriMesh& mesh, const DiscreteMap& map);
  Complex eval_bary(int face, double b0, double b1, double b2) const override;
  std::string_view name() const override { return "proj"; }

  Complex evaluate(int face, Complex z) const;
  const std::array<double, 3>& face_factors(int face) const { return factors_[face]; }

 private:
  const TriMesh* mesh_;
  const DiscreteMap* map_;
  std::vector<std::array<double, 3>> factors_;
};

// Real barycentric coordinates of z in the (planar) triangle (z1,z2,z3).
std::array<double, 3> barycentric_planar(const std::array<Complex, 3>& tri, Complex z);

}  // namespace bpm
