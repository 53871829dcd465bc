#include "hdg/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/QR>

namespace hdg
{

namespace
{

const std::array<Point, 3> kRefVertices{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};

// Barycentric coordinates of the reference triangle.
std::array<Poly2, 3> barycentric()
{
  return {Poly2(1.0) - Poly2::x() - Poly2::y(), Poly2::x(), Poly2::y()};
}

double integrate(const Poly2& p, const QuadratureRuleTriangle& rule)
{
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    s += rule.weights[q] * p(rule.points[q][0], rule.points[q][1]);
  return s;
}

// Mean-zero P^{k-1} modes by modified Gram-Schmidt on the monomials.
std::vector<Poly2> pressure_modes(int k)
{
  const auto rule = triangle_rule(2 * k);
  std::vector<Poly2> out;
  const Poly2 one(1.0);
  const double area = integrate(one, rule);
  for (int d = 1; d <= k - 1; ++d)
    for (int b = 0; b <= d; ++b)
    {
      Poly2 p = Poly2::monomial(d - b, b);
      p -= one * (integrate(p, rule) / area);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : out)
          p -= q * integrate(p * q, rule);
      p *= 1.0 / std::sqrt(integrate(p * p, rule));
      out.push_back(p);
    }
  return out;
}

// Interior functions with zero normal trace whose divergences are the given
// pressure modes.
std::vector<VecPoly2> psi_functions(int k, const std::vector<Poly2>& modes)
{
  std::vector<std::array<int, 2>> mono;
  for (int d = 0; d <= k; ++d)
    for (int b = 0; b <= d; ++b)
      mono.push_back({d - b, b});
  const int nm = static_cast<int>(mono.size());
  const int nc = 2 * nm;
  auto field = [&](const Eigen::VectorXd& c) {
    VecPoly2 v;
    for (int i = 0; i < nm; ++i)
    {
      if (c[i] != 0.0)
        v.x += Poly2::monomial(mono[i][0], mono[i][1], c[i]);
      if (c[nm + i] != 0.0)
        v.y += Poly2::monomial(mono[i][0], mono[i][1], c[nm + i]);
    }
    return v;
  };

  auto col = [&](int a, int b) {
    for (int i = 0; i < nm; ++i)
      if (mono[i][0] == a && mono[i][1] == b)
        return i;
    return -1;
  };
  auto binom = [](int n, int r) {
    double c = 1.0;
    for (int i = 1; i <= r; ++i)
      c = c * (n - r + i) / i;
    return c;
  };

  // Exact coefficient equations: zero normal trace on y = 0, x = 0 and x + y = 1,
  // then div v matching a P^{k-1} target coefficient by coefficient.
  const int ndiv = k * (k + 1) / 2;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(3 * (k + 1) + ndiv, nc);
  for (int i = 0; i < nm; ++i)
  {
    const auto [a, b] = mono[i];
    if (b == 0)
      sys(a, nm + i) = 1.0;
    if (a == 0)
      sys(k + 1 + b, i) = 1.0;
    // (1-s)^a s^b expanded in powers of s
    for (int r = 0; r <= a; ++r)
    {
      const double c = binom(a, r) * (r % 2 == 0 ? 1.0 : -1.0);
      sys(2 * (k + 1) + b + r, i) += c;
      sys(2 * (k + 1) + b + r, nm + i) += c;
    }
  }
  int row = 3 * (k + 1);
  std::vector<std::array<int, 2>> div_mono;
  for (int d = 0; d <= k - 1; ++d)
    for (int b = 0; b <= d; ++b)
    {
      const int a = d - b;
      sys(row, col(a + 1, b)) = a + 1.0;
      sys(row, nm + col(a, b + 1)) = b + 1.0;
      div_mono.push_back({a, b});
      ++row;
    }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);

  std::vector<VecPoly2> out;
  for (const auto& q : modes)
  {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.rows());
    for (int i = 0; i < ndiv; ++i)
      rhs[3 * (k + 1) + i] = q.coeff(div_mono[i][0], div_mono[i][1]);
    out.push_back(field(cod.solve(rhs)));
  }
  return out;
}

} // namespace

std::array<int, 2> reference_edge_vertices(int i)
{
  switch (i)
  {
    case 0:
      return {1, 2};
    case 1:
      return {0, 2};
    case 2:
      return {0, 1};
    default:
      throw std::out_of_range("reference_edge_vertices: edge index must be 0, 1 or 2");
  }
}

ReferenceBasis build_reference_bdm(int k)
{
  if (k < kMinDegree || k > kMaxDegree)
    throw std::invalid_argument("build_reference_bdm: k must lie in [1, 4]");
  ReferenceBasis rb;
  rb.k = k;
  const auto lam = barycentric();

  for (int i = 0; i < 3; ++i)
  {
    const Point& v = kRefVertices[i];
    rb.velocity.push_back({Poly2::x() - Poly2(v[0]), Poly2::y() - Poly2(v[1])});
    const auto [a, b] = reference_edge_vertices(i);
    for (int m = 2; m <= k + 1; ++m)
      rb.velocity.push_back(VecPoly2::curl(scaled_integrated_legendre(m, lam[a], lam[b])));
  }
  const Poly2 cubic = lam[0] * lam[1] * lam[2];
  for (int d = 0; d <= k - 2; ++d)
    for (int b = 0; b <= d; ++b)
      rb.velocity.push_back(VecPoly2::curl(cubic * lam[1].pow(d - b) * lam[2].pow(b)));

  rb.pressure = pressure_modes(k);
  for (auto& psi : psi_functions(k, rb.pressure))
    rb.velocity.push_back(std::move(psi));
  for (const auto& v : rb.velocity)
    rb.divergence.push_back(v.div());
  return rb;
}

Point ElementGeometry::map(double xr, double yr) const
{
  return {origin[0] + jac(0, 0) * xr + jac(0, 1) * yr, origin[1] + jac(1, 0) * xr + jac(1, 1) * yr};
}

ElementGeometry element_geometry(const Mesh& mesh, Index t)
{
  const auto& tri = mesh.triangle(t);
  const Point& p0 = mesh.vertex(tri[0]);
  const Point& p1 = mesh.vertex(tri[1]);
  const Point& p2 = mesh.vertex(tri[2]);
  ElementGeometry g;
  g.origin = p0;
  g.jac << p1[0] - p0[0], p2[0] - p0[0], p1[1] - p0[1], p2[1] - p0[1];
  g.det = g.jac.determinant();
  if (!(g.det > 0.0))
    throw std::invalid_argument("element_geometry: degenerate or inverted element");
  g.jac_inv = g.jac.inverse();
  return g;
}

Eigen::Vector2d piola_value(const ElementGeometry& g, const Eigen::Vector2d& v) { return g.jac * v / g.det; }

Eigen::Matrix2d piola_gradient(const ElementGeometry& g, const Eigen::Matrix2d& grad)
{
  return g.jac * grad * g.jac_inv / g.det;
}

namespace
{

void eval_basis(const ReferenceBasis& rb, double x, double y, std::vector<Eigen::Vector2d>& val,
                std::vector<Eigen::Matrix2d>& grad)
{
  val.resize(rb.velocity.size());
  grad.resize(rb.velocity.size());
  for (std::size_t f = 0; f < rb.velocity.size(); ++f)
  {
    const auto& v = rb.velocity[f];
    val[f] = {v.x(x, y), v.y(x, y)};
    grad[f] << v.x.dx()(x, y), v.x.dy()(x, y), v.y.dx()(x, y), v.y.dy()(x, y);
  }
}

} // namespace

ReferenceTables build_tables(int k)
{
  ReferenceTables tab;
  tab.basis = build_reference_bdm(k);
  tab.cell_rule = triangle_rule(2 * k + 2);
  tab.edge_rule = edge_rule(2 * k + 2);
  const auto& rb = tab.basis;

  const std::size_t nq = tab.cell_rule.points.size();
  tab.cell_value.resize(nq);
  tab.cell_grad.resize(nq);
  tab.cell_div.resize(nq);
  tab.cell_pressure.resize(nq);
  for (std::size_t q = 0; q < nq; ++q)
  {
    const auto [x, y] = tab.cell_rule.points[q];
    eval_basis(rb, x, y, tab.cell_value[q], tab.cell_grad[q]);
    for (const auto& d : rb.divergence)
      tab.cell_div[q].push_back(d(x, y));
    for (const auto& p : rb.pressure)
      tab.cell_pressure[q].push_back(p(x, y));
  }

  const std::size_t ne = tab.edge_rule.points.size();
  for (int e = 0; e < 3; ++e)
  {
    const auto [a, b] = reference_edge_vertices(e);
    const Point& pa = kRefVertices[a];
    const Point& pb = kRefVertices[b];
    tab.edge_value[e].resize(ne);
    tab.edge_grad[e].resize(ne);
    for (std::size_t q = 0; q < ne; ++q)
    {
      const double s = tab.edge_rule.points[q];
      eval_basis(rb, pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]), tab.edge_value[e][q],
                 tab.edge_grad[e][q]);
    }
  }
  return tab;
}

CellValues cell_values(const ReferenceTables& tab, const ElementGeometry& geo)
{
  CellValues cv;
  const std::size_t nq = tab.cell_rule.points.size();
  const std::size_t nf = tab.basis.velocity.size();
  cv.weight.resize(nq);
  cv.point.resize(nq);
  cv.value.assign(nq, std::vector<Eigen::Vector2d>(nf));
  cv.grad.assign(nq, std::vector<Eigen::Matrix2d>(nf));
  cv.div.assign(nq, std::vector<double>(nf));
  cv.pressure = tab.cell_pressure;
  for (std::size_t q = 0; q < nq; ++q)
  {
    cv.weight[q] = tab.cell_rule.weights[q] * geo.det;
    cv.point[q] = geo.map(tab.cell_rule.points[q][0], tab.cell_rule.points[q][1]);
    for (std::size_t f = 0; f < nf; ++f)
    {
      cv.value[q][f] = piola_value(geo, tab.cell_value[q][f]);
      cv.grad[q][f] = piola_gradient(geo, tab.cell_grad[q][f]);
      cv.div[q][f] = tab.cell_div[q][f] / geo.det;
    }
  }
  return cv;
}

EdgeValues edge_values(const ReferenceTables& tab, const Mesh& mesh, const ElementGeometry& geo, Index t,
                       int local_edge)
{
  const Index e = mesh.triangle_edges(t)[local_edge];
  const Edge& edge = mesh.edge(e);
  const auto& tri = mesh.triangle(t);
  const auto [a, b] = reference_edge_vertices(local_edge);
  const bool forward = tri[a] < tri[b];
  const double side = edge.left == t ? 1.0 : -1.0;

  EdgeValues ev;
  ev.normal = {side * edge.normal[0], side * edge.normal[1]};
  ev.tangent = {edge.tangent[0], edge.tangent[1]};
  const std::size_t nq = tab.edge_rule.points.size();
  const std::size_t nf = tab.basis.velocity.size();
  ev.weight.resize(nq);
  ev.point.resize(nq);
  ev.t_global.resize(nq);
  ev.value.assign(nq, std::vector<Eigen::Vector2d>(nf));
  ev.grad.assign(nq, std::vector<Eigen::Matrix2d>(nf));
  const Point& pa = kRefVertices[a];
  const Point& pb = kRefVertices[b];
  for (std::size_t q = 0; q < nq; ++q)
  {
    const double s = tab.edge_rule.points[q];
    ev.weight[q] = tab.edge_rule.weights[q] * edge.length;
    ev.point[q] = geo.map(pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]));
    ev.t_global[q] = forward ? 2.0 * s - 1.0 : 1.0 - 2.0 * s;
    for (std::size_t f = 0; f < nf; ++f)
    {
      ev.value[q][f] = piola_value(geo, tab.edge_value[local_edge][q][f]);
      ev.grad[q][f] = piola_gradient(geo, tab.edge_grad[local_edge][q][f]);
    }
  }
  return ev;
}

bool is_essential(BoundaryTag tag)
{
  return tag == BoundaryTag::lid || tag == BoundaryTag::wall || tag == BoundaryTag::inlet;
}

Spaces build_spaces(const Mesh& mesh, int k)
{
  if (k < kMinDegree || k > kMaxDegree)
    throw std::invalid_argument("build_spaces: k must lie in [1, 4]");
  Spaces sp;
  sp.mesh = &mesh;
  sp.k = k;
  const Index ne = mesh.num_edges(), nt = mesh.num_triangles();
  sp.n_bd = (k + 1) * ne;
  sp.n_hat = k * ne;
  sp.n_int = (k * k - 1) * nt;
  sp.n_pbar = nt;
  sp.n_pint = (k * (k + 1) / 2 - 1) * nt;

  sp.elements.resize(nt);
  for (Index t = 0; t < nt; ++t)
  {
    auto& ed = sp.elements[t];
    const auto& tri = mesh.triangle(t);
    for (int i = 0; i < 3; ++i)
    {
      const Index e = mesh.triangle_edges(t)[i];
      const auto [a, b] = reference_edge_vertices(i);
      const bool forward = tri[a] < tri[b];
      for (int j = 0; j <= k; ++j)
      {
        ed.velocity.push_back(sp.bd(e, j));
        if (j == 0)
          ed.sign.push_back(mesh.edge(e).left == t ? 1.0 : -1.0);
        else
          ed.sign.push_back(forward || (j + 1) % 2 == 0 ? 1.0 : -1.0);
      }
    }
    for (int j = 0; j < k * k - 1; ++j)
    {
      ed.velocity.push_back(sp.interior(t, j));
      ed.sign.push_back(1.0);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < k; ++j)
        ed.facet.push_back(sp.hat(mesh.triangle_edges(t)[i], j));
    ed.pressure.push_back(sp.pbar(t));
    for (int j = 0; j < k * (k + 1) / 2 - 1; ++j)
      ed.pressure.push_back(sp.pint(t, j));
  }

  sp.essential_edge.assign(ne, 0);
  sp.essential.assign(sp.num_velocity(), 0);
  sp.enclosed = true;
  for (Index e = 0; e < ne; ++e)
  {
    const Edge& edge = mesh.edge(e);
    if (!edge.on_boundary())
      continue;
    if (!is_essential(edge.tag))
    {
      sp.enclosed = false;
      continue;
    }
    sp.essential_edge[e] = 1;
    for (int j = 0; j <= k; ++j)
      sp.essential[sp.bd(e, j)] = 1;
    for (int j = 0; j < k; ++j)
      sp.essential[sp.hat(e, j)] = 1;
  }
  return sp;
}

Eigen::MatrixXd normal_traces(const Spaces& sp, const EdgeValues& ev, Index t, int local_edge)
{
  const int k = sp.k;
  const Index e = sp.mesh->triangle_edges(t)[local_edge];
  const Eigen::Vector2d n(sp.mesh->edge(e).normal[0], sp.mesh->edge(e).normal[1]);
  const auto& ed = sp.elements[t];
  Eigen::MatrixXd out(k + 1, ev.weight.size());
  for (int j = 0; j <= k; ++j)
  {
    const int f = local_edge * (k + 1) + j;
    for (std::size_t q = 0; q < ev.weight.size(); ++q)
      out(j, q) = ed.sign[f] * ev.value[q][f].dot(n);
  }
  return out;
}

EssentialData interpolate_essential(const Spaces& sp, const ReferenceTables& tab, const BoundaryField& g)
{
  const Mesh& mesh = *sp.mesh;
  const int k = sp.k;
  std::vector<std::pair<Index, double>> entries;
  for (Index e = 0; e < mesh.num_edges(); ++e)
  {
    if (!sp.essential_edge[e])
      continue;
    const Edge& edge = mesh.edge(e);
    const Index t = edge.left;
    int li = 0;
    while (mesh.triangle_edges(t)[li] != e)
      ++li;
    const auto geo = element_geometry(mesh, t);
    const auto ev = edge_values(tab, mesh, geo, t, li);
    const Eigen::MatrixXd nt = normal_traces(sp, ev, t, li);
    const std::size_t nq = ev.weight.size();
    Eigen::VectorXd w(nq), gn(nq), gt(nq);
    for (std::size_t q = 0; q < nq; ++q)
    {
      const auto val = g(ev.point[q][0], ev.point[q][1], edge.tag);
      w[q] = ev.weight[q];
      gn[q] = val[0] * edge.normal[0] + val[1] * edge.normal[1];
      gt[q] = val[0] * edge.tangent[0] + val[1] * edge.tangent[1];
    }
    const Eigen::MatrixXd gram = nt * w.asDiagonal() * nt.transpose();
    const Eigen::VectorXd coef = gram.llt().solve(nt * w.cwiseProduct(gn));
    for (int j = 0; j <= k; ++j)
      entries.emplace_back(sp.bd(e, j), coef[j]);
    for (int j = 0; j < k; ++j)
    {
      double s = 0.0;
      for (std::size_t q = 0; q < nq; ++q)
        s += w[q] * gt[q] * legendre(j, ev.t_global[q]);
      entries.emplace_back(sp.hat(e, j), (2.0 * j + 1.0) / edge.length * s);
    }
  }
  std::sort(entries.begin(), entries.end());
  EssentialData out;
  for (const auto& [dof, value] : entries)
  {
    out.dofs.push_back(dof);
    out.values.push_back(value);
  }
  return out;
}

} // namespace hdg
