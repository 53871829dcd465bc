#include "hdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hdg
{

std::string_view to_string(BoundaryTag tag)
{
  switch (tag)
  {
    case BoundaryTag::interior:
      return "interior";
    case BoundaryTag::lid:
      return "lid";
    case BoundaryTag::wall:
      return "wall";
    case BoundaryTag::inlet:
      return "inlet";
    case BoundaryTag::outlet:
      return "outlet";
  }
  return "interior";
}

BoundaryTag parse_boundary_tag(std::string_view name)
{
  for (auto tag : {BoundaryTag::interior, BoundaryTag::lid, BoundaryTag::wall, BoundaryTag::inlet,
                   BoundaryTag::outlet})
    if (to_string(tag) == name)
      return tag;
  throw std::invalid_argument("unknown boundary tag '" + std::string(name) + "'");
}

namespace
{

EdgeKey make_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double dist(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

} // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<Index, 3>> triangles,
           const std::map<EdgeKey, BoundaryTag>& boundary_tags)
  : vertices_(std::move(vertices)), triangles_(std::move(triangles))
{
  const Index nv = num_vertices();
  std::map<EdgeKey, Index> edge_ids;
  tri_edges_.resize(triangles_.size());
  areas_.resize(triangles_.size());
  diameters_.resize(triangles_.size());
  h_max_ = 0.0;
  h_min_ = triangles_.empty() ? 0.0 : INFINITY;

  for (Index t = 0; t < num_triangles(); ++t)
  {
    const auto& tri = triangles_[t];
    for (Index v : tri)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Mesh: triangle references a missing vertex");
    const Point& p0 = vertices_[tri[0]];
    const Point& p1 = vertices_[tri[1]];
    const Point& p2 = vertices_[tri[2]];
    const double signed_area =
      0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
    if (!(signed_area > 0.0))
      throw std::invalid_argument("Mesh: triangle " + std::to_string(t) + " is not counter-clockwise");
    areas_[t] = signed_area;
    diameters_[t] = std::max({dist(p0, p1), dist(p1, p2), dist(p2, p0)});
    h_max_ = std::max(h_max_, diameters_[t]);
    h_min_ = std::min(h_min_, diameters_[t]);

    for (int i = 0; i < 3; ++i)
    {
      const EdgeKey key = make_key(tri[(i + 1) % 3], tri[(i + 2) % 3]);
      auto [it, inserted] = edge_ids.try_emplace(key, num_edges());
      if (inserted)
      {
        Edge e;
        e.vertices = {key.first, key.second};
        e.left = t;
        edges_.push_back(e);
      }
      else
      {
        Edge& e = edges_[it->second];
        if (e.right >= 0)
          throw std::invalid_argument("Mesh: edge shared by more than two triangles");
        e.right = t;
      }
      tri_edges_[t][i] = it->second;
    }
  }

  for (auto& e : edges_)
  {
    const Point& a = vertices_[e.vertices[0]];
    const Point& b = vertices_[e.vertices[1]];
    e.length = dist(a, b);
    e.tangent = {(b[0] - a[0]) / e.length, (b[1] - a[1]) / e.length};
    e.normal = {e.tangent[1], -e.tangent[0]};
    // Orient away from the left element's opposite vertex.
    const auto& tri = triangles_[e.left];
    Index opposite = -1;
    for (Index v : tri)
      if (v != e.vertices[0] && v != e.vertices[1])
        opposite = v;
    const Point& o = vertices_[opposite];
    if ((a[0] - o[0]) * e.normal[0] + (a[1] - o[1]) * e.normal[1] < 0.0)
      e.normal = {-e.normal[0], -e.normal[1]};

    if (e.on_boundary())
    {
      const auto it = boundary_tags.find({e.vertices[0], e.vertices[1]});
      if (it == boundary_tags.end() || it->second == BoundaryTag::interior)
        throw std::invalid_argument("Mesh: boundary edge (" + std::to_string(e.vertices[0]) + "," +
                                    std::to_string(e.vertices[1]) + ") has no boundary tag");
      e.tag = it->second;
    }
  }
}

bool Mesh::has_tag(BoundaryTag tag) const { return count_tag(tag) > 0; }

Index Mesh::count_tag(BoundaryTag tag) const
{
  return std::count_if(edges_.begin(), edges_.end(), [tag](const Edge& e) { return e.tag == tag; });
}

std::map<EdgeKey, BoundaryTag> Mesh::boundary_tags() const
{
  std::map<EdgeKey, BoundaryTag> tags;
  for (const auto& e : edges_)
    if (e.on_boundary())
      tags[{e.vertices[0], e.vertices[1]}] = e.tag;
  return tags;
}

namespace
{

// Structured grid over the cells (i, j) accepted by `inside`, vertices numbered
// row by row with x running fastest.
template <typename Inside, typename Classify>
Mesh structured(Index nx, Index ny, double hx, double hy, Inside inside, Classify classify)
{
  std::vector<Index> vid((nx + 1) * (ny + 1), -1);
  auto at = [&](Index i, Index j) -> Index& { return vid[j * (nx + 1) + i]; };
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i)
      if (inside(i, j))
        at(i, j) = at(i + 1, j) = at(i, j + 1) = at(i + 1, j + 1) = 0;

  std::vector<Point> vertices;
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i)
      if (at(i, j) >= 0)
      {
        at(i, j) = static_cast<Index>(vertices.size());
        vertices.push_back({i * hx, j * hy});
      }

  std::vector<std::array<Index, 3>> triangles;
  std::map<EdgeKey, int> count;
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i)
    {
      if (!inside(i, j))
        continue;
      const Index v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k)
      ++count[make_key(t[k], t[(k + 1) % 3])];

  std::map<EdgeKey, BoundaryTag> tags;
  for (const auto& [key, c] : count)
    if (c == 1)
      tags[key] = classify(vertices[key.first], vertices[key.second]);
  return Mesh(std::move(vertices), std::move(triangles), tags);
}

} // namespace

Mesh unit_square(Index n)
{
  if (n < 1)
    throw std::invalid_argument("unit_square: n must be >= 1");
  const double h = 1.0 / static_cast<double>(n);
  return structured(
    n, n, h, h, [](Index, Index) { return true; },
    [](const Point& a, const Point& b) {
      return (a[1] == 1.0 && b[1] == 1.0) ? BoundaryTag::lid : BoundaryTag::wall;
    });
}

Mesh step_domain(Index n)
{
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("step_domain: n must be even and positive");
  const double h = 1.0 / static_cast<double>(n);
  const Index half = n / 2;
  return structured(
    4 * n, n, h, h, [half](Index i, Index j) { return j >= half || i >= half; },
    [](const Point& a, const Point& b) {
      if (a[0] == 0.0 && b[0] == 0.0)
        return BoundaryTag::inlet;
      if (a[0] == 4.0 && b[0] == 4.0)
        return BoundaryTag::outlet;
      return BoundaryTag::wall;
    });
}

Mesh uniform_refine(const Mesh& m)
{
  std::vector<Point> vertices = m.vertices();
  std::vector<Index> mid(m.num_edges());
  for (Index e = 0; e < m.num_edges(); ++e)
  {
    const auto& ed = m.edge(e);
    const Point& a = m.vertex(ed.vertices[0]);
    const Point& b = m.vertex(ed.vertices[1]);
    mid[e] = static_cast<Index>(vertices.size());
    vertices.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
  }
  std::vector<std::array<Index, 3>> triangles;
  triangles.reserve(4 * m.num_triangles());
  for (Index t = 0; t < m.num_triangles(); ++t)
  {
    const auto& v = m.triangle(t);
    const auto& te = m.triangle_edges(t);
    // m_i is the midpoint of the edge opposite local vertex i.
    const Index m0 = mid[te[0]], m1 = mid[te[1]], m2 = mid[te[2]];
    triangles.push_back({v[0], m2, m1});
    triangles.push_back({m2, v[1], m0});
    triangles.push_back({m1, m0, v[2]});
    triangles.push_back({m0, m1, m2});
  }
  std::map<EdgeKey, BoundaryTag> tags;
  for (Index e = 0; e < m.num_edges(); ++e)
  {
    const auto& ed = m.edge(e);
    if (!ed.on_boundary())
      continue;
    tags[make_key(ed.vertices[0], mid[e])] = ed.tag;
    tags[make_key(mid[e], ed.vertices[1])] = ed.tag;
  }
  return Mesh(std::move(vertices), std::move(triangles), tags);
}

void write_ascii(const Mesh& m, std::ostream& os)
{
  const auto tags = m.boundary_tags();
  os << m.num_vertices() << ' ' << tags.size() << ' ' << m.num_triangles() << '\n';
  os << std::setprecision(17);
  for (const auto& p : m.vertices())
    os << p[0] << ' ' << p[1] << '\n';
  for (const auto& t : m.triangles())
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& [key, tag] : tags)
    os << key.first << ' ' << key.second << ' ' << to_string(tag) << '\n';
}

Mesh read_ascii(std::istream& is)
{
  Index nv = 0, ne = 0, nt = 0;
  if (!(is >> nv >> ne >> nt) || nv < 0 || ne < 0 || nt < 0)
    throw std::runtime_error("read_ascii: malformed header");
  std::vector<Point> vertices(nv);
  for (auto& p : vertices)
    if (!(is >> p[0] >> p[1]))
      throw std::runtime_error("read_ascii: truncated vertex block");
  std::vector<std::array<Index, 3>> triangles(nt);
  for (auto& t : triangles)
    if (!(is >> t[0] >> t[1] >> t[2]))
      throw std::runtime_error("read_ascii: truncated triangle block");
  std::map<EdgeKey, BoundaryTag> tags;
  for (Index i = 0; i < ne; ++i)
  {
    Index a = 0, b = 0;
    std::string name;
    if (!(is >> a >> b >> name))
      throw std::runtime_error("read_ascii: truncated boundary block");
    tags[make_key(a, b)] = parse_boundary_tag(name);
  }
  return Mesh(std::move(vertices), std::move(triangles), tags);
}

} // namespace hdg
