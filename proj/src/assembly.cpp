#include "hdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace hdg
{

void ProblemParams::validate() const
{
  if (!(mu > 0.0))
    throw std::invalid_argument("mu must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("tau must be finite and non-negative");
  if (!(inv_lambda >= 0.0) || !std::isfinite(inv_lambda))
    throw std::invalid_argument("inv_lambda must be finite and non-negative");
  if (!(alpha > 0.0))
    throw std::invalid_argument("alpha must be positive");
  if (k < kMinDegree || k > kMaxDegree)
    throw std::invalid_argument("k must lie in [1, 4]");
}

Eigen::VectorXd facet_projection(const EdgeValues& ev, int k, const Eigen::VectorXd& samples)
{
  double len = 0.0;
  for (double w : ev.weight)
    len += w;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j)
  {
    for (std::size_t q = 0; q < ev.weight.size(); ++q)
      c[j] += ev.weight[q] * samples[q] * legendre(j, ev.t_global[q]);
    c[j] *= (2.0 * j + 1.0) / len;
  }
  return c;
}

namespace
{

Eigen::Matrix2d sym(const Eigen::Matrix2d& g) { return 0.5 * (g + g.transpose()); }

enum class FacetTerm
{
  sip,   // consistency terms plus projected penalty
  norm   // unprojected (1/h_F) ||tang(u - u_hat)||^2
};

// Local matrix of the velocity form over [element velocity, element facet] DOFs,
// orientation signs already applied.
Eigen::MatrixXd element_velocity_matrix(const Spaces& sp, const ReferenceTables& tab, Index t,
                                        const ProblemParams& par, FacetTerm mode)
{
  const Mesh& mesh = *sp.mesh;
  const int k = sp.k;
  const int nv = tab.basis.dim();
  const int n = nv + 3 * k;
  const auto& sign = sp.elements[t].sign;
  const auto geo = element_geometry(mesh, t);
  const auto cv = cell_values(tab, geo);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::Vector2d> val(nv);
  std::vector<Eigen::Matrix2d> dsym(nv);
  for (std::size_t q = 0; q < cv.weight.size(); ++q)
  {
    const double w = cv.weight[q];
    for (int f = 0; f < nv; ++f)
    {
      val[f] = sign[f] * cv.value[q][f];
      dsym[f] = sign[f] * sym(cv.grad[q][f]);
    }
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j <= i; ++j)
      {
        const double v = w * (par.tau * val[i].dot(val[j]) + 2.0 * par.mu * (dsym[i].cwiseProduct(dsym[j])).sum());
        a(i, j) += v;
        if (i != j)
          a(j, i) += v;
      }
  }

  for (int li = 0; li < 3; ++li)
  {
    const auto ev = edge_values(tab, mesh, geo, t, li);
    const std::size_t nq = ev.weight.size();
    const double len = mesh.edge(mesh.triangle_edges(t)[li]).length;
    // jump(q, i) = tangential trace of u - u_hat; flux(q, i) = t.D(u)n
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(nq, n);
    Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(nq, n);
    for (std::size_t q = 0; q < nq; ++q)
    {
      for (int f = 0; f < nv; ++f)
      {
        jump(q, f) = sign[f] * ev.value[q][f].dot(ev.tangent);
        flux(q, f) = sign[f] * ev.tangent.dot(sym(ev.grad[q][f]) * ev.normal);
      }
      for (int j = 0; j < k; ++j)
        jump(q, nv + li * k + j) = -legendre(j, ev.t_global[q]);
    }
    const Eigen::Map<const Eigen::VectorXd> w(ev.weight.data(), nq);
    if (mode == FacetTerm::sip)
    {
      const Eigen::MatrixXd cons = flux.transpose() * w.asDiagonal() * jump;
      a -= 2.0 * par.mu * (cons + cons.transpose());
      // Projected jump coefficients P_{k-1}, scaled so that sum_j c_j^2 is the L2 norm.
      Eigen::MatrixXd proj(k, n);
      for (int j = 0; j < k; ++j)
      {
        Eigen::VectorXd pj(nq);
        for (std::size_t q = 0; q < nq; ++q)
          pj[q] = legendre(j, ev.t_global[q]) * ev.weight[q];
        proj.row(j) = std::sqrt((2.0 * j + 1.0) / len) * (pj.transpose() * jump);
      }
      const double pen = par.alpha * k * k / len;
      a += 2.0 * par.mu * pen * proj.transpose() * proj;
    }
    else
    {
      a += 2.0 * par.mu / len * jump.transpose() * w.asDiagonal() * jump;
    }
  }
  // Bitwise symmetric regardless of the kernel summation order.
  return 0.5 * (a + a.transpose()).eval();
}

void check_coercivity(const Eigen::MatrixXd& a, Index t)
{
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
  const double top = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  if (ev[0] < -1e-10 * top)
    throw CoercivityError("element " + std::to_string(t) + " block has eigenvalue " + std::to_string(ev[0]) +
                          "; increase alpha");
}

void scatter(std::vector<Triplet>& out, const Eigen::MatrixXd& m, const std::vector<Index>& rows,
             const std::vector<Index>& cols)
{
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0)
        out.push_back({rows[i], cols[j], m(i, j)});
}

std::vector<Index> compound_dofs(const ElementDofs& ed)
{
  std::vector<Index> d = ed.velocity;
  d.insert(d.end(), ed.facet.begin(), ed.facet.end());
  return d;
}

} // namespace

BlockSystem assemble_saddle(const Spaces& sp, const ReferenceTables& tab, const ProblemParams& params,
                            const EssentialData& essential, const VectorField& f)
{
  params.validate();
  if (params.k != sp.k || tab.basis.k != sp.k)
    throw std::invalid_argument("assemble_saddle: degree mismatch");
  const Mesh& mesh = *sp.mesh;
  const int k = sp.k;
  const int nv = tab.basis.dim();
  const int nfac = tab.basis.num_facet();
  const int npo = k * (k + 1) / 2 - 1;
  const Index nu = sp.num_velocity(), np = sp.num_pressure();

  BlockSystem sys;
  sys.spaces = &sp;
  sys.params = params;
  sys.essential = essential;
  sys.load.assign(nu, 0.0);

  std::vector<Triplet> ta, tb, tc;
  for (Index t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto& ed = sp.elements[t];
    const Eigen::MatrixXd a = element_velocity_matrix(sp, tab, t, params, FacetTerm::sip);
    check_coercivity(a, t);
    scatter(ta, a, compound_dofs(ed), compound_dofs(ed));

    const auto geo = element_geometry(mesh, t);
    const auto cv = cell_values(tab, geo);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1 + npo, nv);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1 + npo, 1 + npo);
    for (std::size_t q = 0; q < cv.weight.size(); ++q)
    {
      const double w = cv.weight[q];
      for (int fn = 0; fn < nv; ++fn)
      {
        const double d = ed.sign[fn] * cv.div[q][fn];
        b(0, fn) -= w * d;
        for (int j = 0; j < npo; ++j)
          b(1 + j, fn) -= w * cv.pressure[q][j] * d;
      }
      c(0, 0) += w;
      for (int i = 0; i < npo; ++i)
        for (int j = 0; j < npo; ++j)
          c(1 + i, 1 + j) += w * cv.pressure[q][i] * cv.pressure[q][j];
      if (f)
      {
        const auto fv = f(cv.point[q][0], cv.point[q][1]);
        for (int fn = 0; fn < nv; ++fn)
          sys.load[ed.velocity[fn]] +=
            w * ed.sign[fn] * (fv[0] * cv.value[q][fn][0] + fv[1] * cv.value[q][fn][1]);
      }
    }
    // Constant pressure only sees facet functions, mean-zero modes only interior
    // ones; the cross terms vanish up to rounding and are not stored.
    b.block(0, nfac, 1, nv - nfac).setZero();
    b.block(1, 0, npo, nfac).setZero();
    c = 0.5 * (c + c.transpose()).eval();
    c(0, 0) = mesh.area(t);
    c *= -params.inv_lambda;
    if (params.inv_lambda > 0.0)
    {
      c.block(0, 1, 1, npo).setZero();
      c.block(1, 0, npo, 1).setZero();
      scatter(tc, c, ed.pressure, ed.pressure);
    }
    scatter(tb, b, ed.pressure, ed.velocity);
  }
  sys.A = SparseMatrix::from_triplets(nu, nu, std::move(ta));
  sys.B = SparseMatrix::from_triplets(np, nu, std::move(tb));
  sys.C = SparseMatrix::from_triplets(np, np, std::move(tc));

  sys.lift.assign(nu, 0.0);
  for (std::size_t i = 0; i < essential.dofs.size(); ++i)
    sys.lift[essential.dofs[i]] = essential.values[i];
  const Vector al = spmv(sys.A, sys.lift);
  sys.rhs_u.resize(nu);
  for (Index i = 0; i < nu; ++i)
    sys.rhs_u[i] = sp.essential[i] ? 0.0 : sys.load[i] - al[i];
  sys.rhs_p = spmv(sys.B, sys.lift);
  scale(-1.0, sys.rhs_p);
  for (Index i = 0; i < nu; ++i)
    if (!sp.essential[i])
      sys.free_velocity.push_back(i);
  return sys;
}

Eigen::MatrixXd element_divdiv_interior(const Spaces& sp, const ReferenceTables& tab, Index t)
{
  const int nfac = tab.basis.num_facet();
  const int ni = tab.basis.num_interior();
  const auto cv = cell_values(tab, element_geometry(*sp.mesh, t));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ni, ni);
  for (std::size_t q = 0; q < cv.weight.size(); ++q)
    for (int i = 0; i < ni; ++i)
      for (int j = 0; j < ni; ++j)
        d(i, j) += cv.weight[q] * cv.div[q][nfac + i] * cv.div[q][nfac + j];
  return d;
}

SparseMatrix assemble_energy_norm(const Spaces& sp, const ReferenceTables& tab, const ProblemParams& params)
{
  std::vector<Triplet> trip;
  for (Index t = 0; t < sp.mesh->num_triangles(); ++t)
  {
    const auto dofs = compound_dofs(sp.elements[t]);
    scatter(trip, element_velocity_matrix(sp, tab, t, params, FacetTerm::norm), dofs, dofs);
  }
  return SparseMatrix::from_triplets(sp.num_velocity(), sp.num_velocity(), std::move(trip));
}

AuxSpace build_aux_space(const Spaces& sp)
{
  const Mesh& mesh = *sp.mesh;
  std::vector<char> constrained(mesh.num_vertices(), 0);
  for (Index e = 0; e < mesh.num_edges(); ++e)
    if (sp.essential_edge[e])
      for (Index v : mesh.edge(e).vertices)
        constrained[v] = 1;
  AuxSpace aux;
  aux.vertex_index.assign(mesh.num_vertices(), -1);
  for (Index v = 0; v < mesh.num_vertices(); ++v)
    if (!constrained[v])
    {
      aux.vertex_index[v] = static_cast<Index>(aux.free_vertices.size());
      aux.free_vertices.push_back(v);
    }
  return aux;
}

SparseMatrix assemble_aux(const Spaces& sp, const AuxSpace& aux, const ProblemParams& params)
{
  const Mesh& mesh = *sp.mesh;
  std::vector<Triplet> trip;
  for (Index t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto& tri = mesh.triangle(t);
    const auto geo = element_geometry(mesh, t);
    const double area = 0.5 * geo.det;
    // Gradients of the barycentric hats.
    Eigen::Matrix<double, 3, 2> g;
    g.row(1) = geo.jac_inv.row(0);
    g.row(2) = geo.jac_inv.row(1);
    g.row(0) = -g.row(1) - g.row(2);
    for (int i = 0; i < 3; ++i)
    {
      const Index vi = aux.vertex_index[tri[i]];
      if (vi < 0)
        continue;
      for (int j = 0; j < 3; ++j)
      {
        const Index vj = aux.vertex_index[tri[j]];
        if (vj < 0)
          continue;
        const double stiff = area * g.row(i).dot(g.row(j));
        const double mass = area / 12.0 * (i == j ? 2.0 : 1.0);
        const double v = 2.0 * params.mu * stiff + params.tau * mass;
        for (int c = 0; c < 2; ++c)
          trip.push_back({2 * vi + c, 2 * vj + c, v});
      }
    }
  }
  return SparseMatrix::from_triplets(aux.size(), aux.size(), std::move(trip));
}

PressureOps assemble_pressure_ops(const Spaces& sp)
{
  const Mesh& mesh = *sp.mesh;
  const Index nt = mesh.num_triangles();
  std::vector<Triplet> tm, tn;
  for (Index t = 0; t < nt; ++t)
    tm.push_back({t, t, mesh.area(t)});
  for (Index e = 0; e < mesh.num_edges(); ++e)
  {
    const Edge& edge = mesh.edge(e);
    const double h = edge.length;
    const double s = edge.length / h;
    if (!edge.on_boundary())
    {
      tn.push_back({edge.left, edge.left, s});
      tn.push_back({edge.left, edge.right, -s});
      tn.push_back({edge.right, edge.left, -s});
      tn.push_back({edge.right, edge.right, s});
    }
    else if (edge.tag == BoundaryTag::outlet)
    {
      tn.push_back({edge.left, edge.left, s});
    }
  }
  PressureOps ops;
  ops.M = SparseMatrix::from_triplets(nt, nt, std::move(tm));
  ops.N = SparseMatrix::from_triplets(nt, nt, std::move(tn));
  return ops;
}

} // namespace hdg
