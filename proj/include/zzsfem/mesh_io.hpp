#pragma once

#include "zzsfem/mesh.hpp"

#include <iosfwd>
#include <string>

namespace zzsfem {

// Plain-text mesh format:
//
//   nodes <count>
//   <id> <x> <y>
//   elements <count>
//   <id> <n0> <n1> <n2> <n3>
//   boundary <count>
//   <element> <local edge> <tag>
//
// Tags are written as N<id> (Neumann) or D<id> (Dirichlet). Coordinates use
// 17 significant digits so a write/read cycle is exact.
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

std::string format_tag(const BoundaryTag& tag);
BoundaryTag parse_tag(const std::string& token);

} // namespace zzsfem
