#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpm/mesh.hpp"
#include "bpm/pcm.hpp"

namespace bpm {

struct LoadedMesh {
  TriMesh mesh;
  // Present when the file carries `vt` coordinates referenced as f v/vt
  // with a single vt per vertex: the texture coordinates as a
  // vertex-indexed target map in the complex plane.
  std::optional<DiscreteMap> map;
  std::vector<std::string> warnings;  // ignored statements etc.
};

// OBJ subset: `v x y z`, `vt u v`, `f a/b ...`, comments `#`. Any other
// statement is skipped with a warning. Throws ParseError on malformed
// input, SeamError when a vertex is referenced with two distinct vt
// indices, NonManifoldError / DegenerateError via mesh validation.
LoadedMesh load_obj(const std::string& path);

// Writes v/vt/f v/vt statements (or plain f when uv is empty). uv, when
// given, is vertex-indexed like a DiscreteMap.
void save_obj(const std::string& path, const TriMesh& mesh, const std::vector<Complex>& uv);

}  // namespace bpm
