#ifndef HDG_MESH_HPP
#define HDG_MESH_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdg/linalg.hpp"

namespace hdg
{

enum class BoundaryTag
{
  interior,
  lid,
  wall,
  inlet,
  outlet
};

std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(std::string_view name);

using Point = std::array<double, 2>;

struct Edge
{
  std::array<Index, 2> vertices; // ascending global vertex indices
  Index left = -1;               // lower-indexed adjacent element
  Index right = -1;              // -1 on the boundary
  double length = 0.0;
  Point normal{};  // unit, pointing out of `left`
  Point tangent{}; // unit, from vertices[0] to vertices[1]
  BoundaryTag tag = BoundaryTag::interior;

  bool on_boundary() const { return right < 0; }
};

using EdgeKey = std::pair<Index, Index>;

//
// Conforming triangulation with edge connectivity. Triangles are stored
// counter-clockwise; local edge i of a triangle is the edge opposite its local
// vertex i.
//
class Mesh
{
public:
  Mesh() = default;
  Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
       const std::map<EdgeKey, BoundaryTag>& boundary_tags);

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles_.size()); }

  const Point& vertex(Index v) const { return vertices_[v]; }
  const std::array<Index, 3>& triangle(Index t) const { return triangles_[t]; }
  const Edge& edge(Index e) const { return edges_[e]; }
  const std::array<Index, 3>& triangle_edges(Index t) const { return tri_edges_[t]; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  double area(Index t) const { return areas_[t]; }
  double diameter(Index t) const { return diameters_[t]; }
  double h() const { return h_max_; }
  double h_min() const { return h_min_; }

  bool has_tag(BoundaryTag tag) const;
  Index count_tag(BoundaryTag tag) const;
  std::map<EdgeKey, BoundaryTag> boundary_tags() const;

private:
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<Index, 3>> tri_edges_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  double h_max_ = 0.0;
  double h_min_ = 0.0;
};

// n x n squares on [0,1]^2, each cut along its lower-left to upper-right
// diagonal. Top edges are tagged lid, the rest wall.
Mesh unit_square(Index n);

// Backward-facing step ([0.5,4]x[0,0.5]) u ([0,4]x[0.5,1]) with n cells per unit
// length (n even). Inlet on x = 0, outlet on x = 4, walls elsewhere.
Mesh step_domain(Index n);

// Red refinement: every triangle split into four through edge midpoints.
Mesh uniform_refine(const Mesh& m);

void write_ascii(const Mesh& m, std::ostream& os);
Mesh read_ascii(std::istream& is);

} // namespace hdg

#endif // HDG_MESH_HPP
