#include "bpm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "bpm/baselines.hpp"
#include "bpm/errors.hpp"
#include "bpm/pcm.hpp"

namespace bpm {

SubdivGrid SubdivGrid::make(int levels) {
  SubdivGrid grid;
  grid.side = 1 << levels;
  const int n = grid.side;
  for (int b = 0; b <= n; ++b)
    for (int a = 0; a + b <= n; ++a) grid.verts.push_back({a, b});
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a + b < n; ++a) {
      grid.tris.push_back({grid.vertex_index(a, b), grid.vertex_index(a + 1, b),
                           grid.vertex_index(a, b + 1)});
      if (a + b + 1 < n) {
        grid.tris.push_back({grid.vertex_index(a + 1, b), grid.vertex_index(a + 1, b + 1),
                             grid.vertex_index(a, b + 1)});
      }
    }
  }
  return grid;
}

int SubdivGrid::vertex_index(int a, int b) const {
  const int n = side;
  // row b starts after rows 0..b-1 of lengths (n+1), (n), ...
  return b * (n + 1) - b * (b - 1) / 2 + a;
}

double QcReport::global_max() const {
  double m = 0.0;
  for (double v : sample_qc)
    if (std::isfinite(v)) m = std::max(m, v);
  return m;
}

double QcReport::global_mean() const {
  double sum = 0.0;
  int64_t n = 0;
  for (double v : sample_qc)
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

std::vector<int> QcReport::bound_violations(double tol) const {
  std::vector<int> faces;
  for (size_t t = 0; t < face_max.size(); ++t) {
    if (face_max[t] > face_discrete[t] + tol) faces.push_back(static_cast<int>(t));
  }
  return faces;
}

namespace {

Histogram make_histogram(const std::vector<double>& values) {
  Histogram h;
  h.edges = {1.0, 1.01, 1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0};
  h.counts.assign(h.edges.size(), 0);
  for (double v : values) {
    size_t bin = h.edges.size() - 1;
    for (size_t i = 0; i + 1 < h.edges.size(); ++i) {
      if (v < h.edges[i + 1]) {
        bin = i;
        break;
      }
    }
    ++h.counts[bin];
  }
  return h;
}

}  // namespace

QcReport qc_map(const Interpolator& interp, const TriMesh& mesh, int levels, Exec exec) {
  if (levels < 1) throw DegenerateError("qc_map requires levels >= 1");
  const SubdivGrid grid = SubdivGrid::make(levels);
  const int nf = mesh.face_count();
  const int tris_per_face = static_cast<int>(grid.tris.size());
  const int verts_per_face = static_cast<int>(grid.verts.size());
  const double inv_n = 1.0 / grid.side;

  QcReport report;
  report.levels = levels;
  report.sample_qc.assign(static_cast<size_t>(nf) * tris_per_face, 0.0);
  report.face_offset.resize(nf + 1);
  for (int t = 0; t <= nf; ++t) report.face_offset[t] = t * tris_per_face;
  report.face_max.assign(nf, 0.0);
  report.face_mean.assign(nf, 0.0);
  report.face_discrete.assign(nf, 0.0);

  std::vector<std::string> failures(nf);
  parallel_for(exec, nf, [&](int64_t ti) {
    const int t = static_cast<int>(ti);
    const auto& f = mesh.face(t);
    try {
      // Images of the refined vertices, each evaluated within this face.
      std::vector<Complex> image(verts_per_face);
      for (int v = 0; v < verts_per_face; ++v) {
        const double b1 = grid.verts[v][0] * inv_n;
        const double b2 = grid.verts[v][1] * inv_n;
        image[v] = interp.eval_bary(t, 1.0 - b1 - b2, b1, b2);
      }

      const bool is_planar = mesh.planar();
      std::array<Complex, 3> corners2d{};
      std::array<Eigen::Vector3d, 3> corners3d{};
      if (is_planar) {
        corners2d = mesh.planar_corners(t);
      } else {
        corners3d = {mesh.position(f[0]), mesh.position(f[1]), mesh.position(f[2])};
      }

      double face_max = 0.0, face_sum = 0.0;
      int64_t finite = 0;
      for (int k = 0; k < tris_per_face; ++k) {
        const auto& tri = grid.tris[k];
        std::array<Complex, 3> dst;
        double qc;
        for (int c = 0; c < 3; ++c) dst[c] = image[tri[c]];
        if (is_planar) {
          std::array<Complex, 3> src;
          for (int c = 0; c < 3; ++c) {
            const double b1 = grid.verts[tri[c]][0] * inv_n;
            const double b2 = grid.verts[tri[c]][1] * inv_n;
            src[c] = (1.0 - b1 - b2) * corners2d[0] + b1 * corners2d[1] + b2 * corners2d[2];
          }
          qc = face_qc_error(src, dst);
        } else {
          std::array<Eigen::Vector3d, 3> src;
          for (int c = 0; c < 3; ++c) {
            const double b1 = grid.verts[tri[c]][0] * inv_n;
            const double b2 = grid.verts[tri[c]][1] * inv_n;
            src[c] = (1.0 - b1 - b2) * corners3d[0] + b1 * corners3d[1] + b2 * corners3d[2];
          }
          qc = face_qc_error_3d(src, dst);
        }
        report.sample_qc[static_cast<size_t>(t) * tris_per_face + k] = qc;
        if (std::isfinite(qc)) {
          face_max = std::max(face_max, qc);
          face_sum += qc;
          ++finite;
        } else {
          face_max = kQcInfinity;
        }
      }
      report.face_max[t] = face_max;
      report.face_mean[t] = finite > 0 ? face_sum / static_cast<double>(finite) : kQcInfinity;

      // Discrete QC of the input map on this face: linear map to the
      // corner images.
      const std::array<Complex, 3> corner_images{
          interp.eval_bary(t, 1, 0, 0), interp.eval_bary(t, 0, 1, 0), interp.eval_bary(t, 0, 0, 1)};
      report.face_discrete[t] = is_planar ? face_qc_error(corners2d, corner_images)
                                          : face_qc_error_3d(corners3d, corner_images);
    } catch (const Error& e) {
      failures[t] = "face " + std::to_string(t) + ": " + e.what();
    }
  });
  for (const auto& fail : failures)
    if (!fail.empty()) throw Error("qc_map: " + fail);

  for (double v : report.sample_qc)
    if (!std::isfinite(v)) ++report.flipped_count;
  report.histogram = make_histogram(report.sample_qc);
  return report;
}

ContinuityReport continuity_probe(const Interpolator& interp, const TriMesh& mesh,
                                  const FaceAdjacency& adj, int samples_per_edge, Exec exec) {
  ContinuityReport report;
  report.samples_per_edge = samples_per_edge;

  std::vector<std::array<int, 2>> edges;  // (face, local edge), t < neighbor
  for (int t = 0; t < mesh.face_count(); ++t) {
    for (int e = 0; e < 3; ++e) {
      const int u = adj.neighbor(t, e);
      if (u != FaceAdjacency::kBoundary && t < u) edges.push_back({t, e});
    }
  }
  report.edges.resize(edges.size());

  parallel_for(exec, static_cast<int64_t>(edges.size()), [&](int64_t idx) {
    const auto [t, e] = edges[idx];
    const int u = adj.neighbor(t, e);
    const int eu = adj.neighbor_edge(t, e);
    double max_gap = 0.0;
    try {
      for (int k = 1; k <= samples_per_edge; ++k) {
        const double s = static_cast<double>(k) / (samples_per_edge + 1);
        double bt[3] = {0, 0, 0};
        bt[e] = 1.0 - s;
        bt[(e + 1) % 3] = s;
        // The shared edge runs in the opposite direction within u.
        double bu[3] = {0, 0, 0};
        bu[eu] = s;
        bu[(eu + 1) % 3] = 1.0 - s;
        const Complex from_t = interp.eval_bary(t, bt[0], bt[1], bt[2]);
        const Complex from_u = interp.eval_bary(u, bu[0], bu[1], bu[2]);
        max_gap = std::max(max_gap, std::abs(from_t - from_u));
      }
    } catch (const Error&) {
      max_gap = std::numeric_limits<double>::infinity();  // pole on the edge
    }
    report.edges[idx] = {t, u, max_gap};
  });

  for (const auto& edge : report.edges) report.global_max = std::max(report.global_max, edge.max_gap);
  return report;
}

std::vector<int> injectivity_probe(const Interpolator& interp, const TriMesh& mesh,
                                   int grid_density, Exec exec) {
  if (!mesh.planar()) throw DegenerateError("injectivity_probe requires a planar mesh");
  const int nf = mesh.face_count();
  const int g = std::max(grid_density, 1);
  std::vector<char> suspect(nf, 0);

  parallel_for(exec, nf, [&](int64_t ti) {
    const int t = static_cast<int>(ti);
    const auto corners = mesh.planar_corners(t);
    const double diam = std::max({std::abs(corners[1] - corners[0]),
                                  std::abs(corners[2] - corners[1]),
                                  std::abs(corners[0] - corners[2])});
    const double h = 1e-7 * diam;
    // Centroids of the grid cells stay at least ~1/(3g) of the face
    // height away from the boundary, so the stencil cannot leave the
    // face.
    auto eval_at = [&](Complex z) {
      const auto b = barycentric_planar(corners, z);
      return interp.eval_bary(t, b[0], b[1], b[2]);
    };
    try {
      for (int bi = 0; bi < g && !suspect[t]; ++bi) {
        for (int ai = 0; ai + bi < g && !suspect[t]; ++ai) {
          for (int up = 0; up < (ai + bi + 1 < g ? 2 : 1); ++up) {
            double a = ai + (up == 0 ? 1.0 / 3.0 : 2.0 / 3.0);
            double b = bi + (up == 0 ? 1.0 / 3.0 : 2.0 / 3.0);
            const double b1 = a / g, b2 = b / g;
            const Complex z = (1.0 - b1 - b2) * corners[0] + b1 * corners[1] + b2 * corners[2];
            const Complex fx = (eval_at(z + h) - eval_at(z - h)) / (2.0 * h);
            const Complex fy =
                (eval_at(z + Complex(0, h)) - eval_at(z - Complex(0, h))) / (2.0 * h);
            const double det = fx.real() * fy.imag() - fx.imag() * fy.real();
            if (det <= 0.0) suspect[t] = 1;
          }
        }
      }
    } catch (const Error&) {
      suspect[t] = 1;  // a pole inside the face certainly breaks injectivity
    }
  });

  std::vector<int> flagged;
  for (int t = 0; t < nf; ++t)
    if (suspect[t]) flagged.push_back(t);
  return flagged;
}

std::vector<ComparisonRow> compare(const std::vector<const Interpolator*>& interps,
                                   const TriMesh& mesh, const FaceAdjacency& adj, int levels,
                                   int samples_per_edge, Exec exec) {
  std::vector<ComparisonRow> rows;
  for (const Interpolator* interp : interps) {
    const QcReport qc = qc_map(*interp, mesh, levels, exec);
    const ContinuityReport cont = continuity_probe(*interp, mesh, adj, samples_per_edge, exec);
    ComparisonRow row;
    row.name = std::string(interp->name());
    row.samples = qc.sample_count();
    row.qc_max = qc.global_max();
    row.qc_mean = qc.global_mean();
    double dmax = 0.0;
    for (double v : qc.face_discrete)
      if (std::isfinite(v)) dmax = std::max(dmax, v);
    row.discrete_qc_max = dmax;
    row.flipped = qc.flipped_count;
    row.qc_bound_violations = static_cast<int64_t>(qc.bound_violations().size());
    row.continuity_max_gap = cont.global_max;
    row.edges_probed = static_cast<int>(cont.edges.size());
    rows.push_back(row);
  }
  return rows;
}

void write_qc_csv(std::ostream& out, const QcReport& report) {
  out << "face,discrete_qc,sampled_max,sampled_mean,samples,flipped\n";
  for (size_t t = 0; t < report.face_max.size(); ++t) {
    const int begin = report.face_offset[t];
    const int end = report.face_offset[t + 1];
    int64_t flipped = 0;
    for (int k = begin; k < end; ++k)
      if (!std::isfinite(report.sample_qc[k])) ++flipped;
    out << t << "," << report.face_discrete[t] << "," << report.face_max[t] << ","
        << report.face_mean[t] << "," << end - begin << "," << flipped << "\n";
  }
}

void write_continuity_csv(std::ostream& out, const ContinuityReport& report) {
  out << "face_t,face_u,max_gap\n";
  for (const auto& e : report.edges) out << e.face_t << "," << e.face_u << "," << e.max_gap << "\n";
}

void write_compare_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "method,samples,qc_max,qc_mean,discrete_qc_max,flipped,qc_bound_violations,"
         "continuity_max_gap,edges_probed\n";
  for (const auto& r : rows) {
    out << r.name << "," << r.samples << "," << r.qc_max << "," << r.qc_mean << ","
        << r.discrete_qc_max << "," << r.flipped << "," << r.qc_bound_violations << ","
        << r.continuity_max_gap << "," << r.edges_probed << "\n";
  }
}

std::string summary_text(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    out << r.name << ": qc max " << r.qc_max << ", mean " << r.qc_mean << " (discrete max "
        << r.discrete_qc_max << ", " << r.flipped << " flipped samples";
    if (r.qc_bound_violations > 0)
      out << ", " << r.qc_bound_violations << " faces above the discrete bound";
    out << "), max edge gap " << r.continuity_max_gap << " over " << r.edges_probed
        << " interior edges\n";
  }
  return out.str();
}

}  // namespace bpm
