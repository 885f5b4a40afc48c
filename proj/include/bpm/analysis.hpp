#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bpm/interpolator.hpp"
#include "bpm/mesh.hpp"
#include "bpm/parallel.hpp"

namespace bpm {

// Midpoint 1:4 subdivision lattice of a triangle, side n = 2^levels:
// vertex (a, b) has barycentric ((n-a-b)/n, a/n, b/n).
struct SubdivGrid {
  int side = 1;
  std::vector<std::array<int, 2>> verts;       // lattice coordinates (a, b)
  std::vector<std::array<int, 3>> tris;        // indices into verts
  static SubdivGrid make(int levels);
  int vertex_index(int a, int b) const;        // inverse of verts
};

struct Histogram {
  std::vector<double> edges;  // ascending; implicit last bin reaches +inf
  std::vector<int64_t> counts;
};

// Quasi-conformal distortion of an interpolator, measured by refining
// each source face and taking the QC error of the linear maps between the
// refined triangles and their images.
struct QcReport {
  int levels = 0;
  std::vector<double> sample_qc;          // per refined triangle, all faces
  std::vector<int> face_offset;           // face t owns [offset[t], offset[t+1])
  std::vector<double> face_max;           // per input face (inf marker possible)
  std::vector<double> face_mean;          // mean of the finite samples
  std::vector<double> face_discrete;      // QC of the input (linear) map per face
  Histogram histogram;
  int64_t flipped_count = 0;              // samples with the inf marker

  double global_max() const;              // max over finite samples
  double global_mean() const;
  int64_t sample_count() const { return static_cast<int64_t>(sample_qc.size()); }
  // Faces whose max sampled QC exceeds their discrete QC by more than tol.
  std::vector<int> bound_violations(double tol = 1e-6) const;
};

QcReport qc_map(const Interpolator& interp, const TriMesh& mesh, int levels = 4,
                Exec exec = Exec::Parallel);

// Two-sided evaluation gaps across interior edges.
struct ContinuityReport {
  struct Edge {
    int face_t = -1, face_u = -1;
    double max_gap = 0.0;
  };
  std::vector<Edge> edges;
  double global_max = 0.0;
  int samples_per_edge = 0;
};

ContinuityReport continuity_probe(const Interpolator& interp, const TriMesh& mesh,
                                  const FaceAdjacency& adj, int samples_per_edge,
                                  Exec exec = Exec::Parallel);

// Finite-difference Jacobian sign sampling on a per-face grid; returns the
// faces with any non-positive sample. Planar meshes only.
std::vector<int> injectivity_probe(const Interpolator& interp, const TriMesh& mesh,
                                   int grid_density, Exec exec = Exec::Parallel);

// Side-by-side summary of several interpolators on the same input.
struct ComparisonRow {
  std::string name;
  int64_t samples = 0;
  double qc_max = 0.0;
  double qc_mean = 0.0;
  double discrete_qc_max = 0.0;
  int64_t flipped = 0;
  int64_t qc_bound_violations = 0;  // faces above their discrete QC (soft check)
  double continuity_max_gap = 0.0;
  int edges_probed = 0;
};

std::vector<ComparisonRow> compare(const std::vector<const Interpolator*>& interps,
                                   const TriMesh& mesh, const FaceAdjacency& adj, int levels = 4,
                                   int samples_per_edge = 20, Exec exec = Exec::Parallel);

// Serialization: one row per input face.
void write_qc_csv(std::ostream& out, const QcReport& report);
void write_continuity_csv(std::ostream& out, const ContinuityReport& report);
void write_compare_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
std::string summary_text(const std::vector<ComparisonRow>& rows);

}  // namespace bpm
