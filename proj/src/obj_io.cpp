#include "bpm/obj_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bpm/errors.hpp"

namespace bpm {

namespace {

// "3", "3/5", "3/5/7", "3//7" -> vertex and optional vt (1-based in the
// file, converted to 0-based; negative indices count from the end).
void parse_face_corner(const std::string& token, int line_no, int vertex_count, int vt_count,
                       int& v_out, int& vt_out) {
  int fields[3] = {0, 0, 0};
  bool present[3] = {false, false, false};
  int field = 0;
  size_t pos = 0;
  while (pos < token.size()) {
    if (token[pos] == '/') {
      ++field;
      ++pos;
      if (field > 2) throw ParseError("line " + std::to_string(line_no) + ": bad face corner");
      continue;
    }
    size_t end = token.find('/', pos);
    if (end == std::string::npos) end = token.size();
    try {
      fields[field] = std::stoi(token.substr(pos, end - pos));
      present[field] = true;
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad index '" + token + "'");
    }
    pos = end;
  }
  if (!present[0]) throw ParseError("line " + std::to_string(line_no) + ": missing vertex index");

  auto resolve = [line_no](int idx, int count) {
    int r = idx > 0 ? idx - 1 : count + idx;
    if (r < 0 || r >= count)
      throw ParseError("line " + std::to_string(line_no) + ": index out of range");
    return r;
  };
  v_out = resolve(fields[0], vertex_count);
  vt_out = present[1] ? resolve(fields[1], vt_count) : -1;
}

}  // namespace

LoadedMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::vector<Eigen::Vector3d> positions;
  std::vector<Complex> texcoords;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 3>> face_vts;
  std::vector<std::string> warnings;

  std::string line;
  int line_no = 0;
  bool any_vt_ref = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      double x, y, z = 0.0;
      if (!(ss >> x >> y)) throw ParseError("line " + std::to_string(line_no) + ": bad vertex");
      ss >> z;
      positions.emplace_back(x, y, z);
    } else if (tag == "vt") {
      double u, v = 0.0;
      if (!(ss >> u)) throw ParseError("line " + std::to_string(line_no) + ": bad vt");
      ss >> v;
      texcoords.emplace_back(u, v);
    } else if (tag == "f") {
      std::vector<int> vs, vts;
      std::string tok;
      while (ss >> tok) {
        int v, vt;
        parse_face_corner(tok, line_no, static_cast<int>(positions.size()),
                          static_cast<int>(texcoords.size()), v, vt);
        vs.push_back(v);
        vts.push_back(vt);
        if (vt >= 0) any_vt_ref = true;
      }
      if (vs.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": face needs >= 3 corners");
      // triangle fan for polygons
      for (size_t c = 1; c + 1 < vs.size(); ++c) {
        faces.push_back({vs[0], vs[c], vs[c + 1]});
        face_vts.push_back({vts[0], vts[c], vts[c + 1]});
      }
    } else {
      warnings.push_back("line " + std::to_string(line_no) + ": ignored statement '" + tag + "'");
    }
  }

  LoadedMesh out{TriMesh::create(positions, faces), std::nullopt, std::move(warnings)};

  if (any_vt_ref) {
    // The map is vertex-based: every reference of a vertex must carry
    // the same single vt index.
    std::vector<int> vertex_vt(positions.size(), -1);
    for (size_t t = 0; t < faces.size(); ++t) {
      for (int c = 0; c < 3; ++c) {
        int v = faces[t][c];
        int vt = face_vts[t][c];
        if (vt < 0)
          throw ParseError("face " + std::to_string(t) + " mixes corners with and without vt");
        if (vertex_vt[v] >= 0 && vertex_vt[v] != vt)
          throw SeamError("vertex " + std::to_string(v) +
                          " referenced with two distinct vt indices (UV seam)");
        vertex_vt[v] = vt;
      }
    }
    DiscreteMap map;
    map.w.resize(positions.size(), Complex(0, 0));
    for (size_t v = 0; v < positions.size(); ++v) {
      if (vertex_vt[v] >= 0) map.w[v] = texcoords[vertex_vt[v]];
    }
    out.map = std::move(map);
  }
  return out;
}

void save_obj(const std::string& path, const TriMesh& mesh, const std::vector<Complex>& uv) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot write '" + path + "'");
  outf.precision(17);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.position(v);
    outf << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
  for (const auto& w : uv) outf << "vt " << w.real() << " " << w.imag() << "\n";
  for (int t = 0; t < mesh.face_count(); ++t) {
    const auto& f = mesh.face(t);
    if (uv.empty()) {
      outf << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    } else {
      outf << "f " << f[0] + 1 << "/" << f[0] + 1 << " " << f[1] + 1 << "/" << f[1] + 1 << " "
           << f[2] + 1 << "/" << f[2] + 1 << "\n";
    }
  }
}

}  // namespace bpm
