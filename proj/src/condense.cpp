#include "hdg/condense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace hdg
{

void LocalFactor::solve(const Eigen::MatrixXd& r, const Eigen::MatrixXd& s, Eigen::MatrixXd& x,
                        Eigen::MatrixXd& y) const
{
  const Eigen::MatrixXd ar = a_oo.solve(r);
  y = s_oo.solve(b_oo * ar - s);
  x = a_oo.solve(r - b_oo.transpose() * y);
}

bool pressure_singular(const BlockSystem& block)
{
  return block.params.inv_lambda == 0.0 && block.spaces->enclosed;
}

CondensedSystem eliminate_local(const BlockSystem& block)
{
  const Spaces& sp = *block.spaces;
  const Mesh& mesh = *sp.mesh;
  const int k = sp.k;
  const int nfac = 3 * (k + 1);
  const Index nt = mesh.num_triangles();

  CondensedSystem cond;
  cond.block = &block;
  cond.to_condensed.assign(sp.num_velocity(), -1);
  for (Index i = 0; i < sp.n_bd + sp.n_hat; ++i)
    if (!sp.essential[i])
    {
      cond.to_condensed[i] = cond.n_u();
      cond.dofs.push_back(i);
      if (i < sp.n_bd)
        ++cond.n_bd;
    }

  std::vector<Index> pbar(nt);
  for (Index t = 0; t < nt; ++t)
    pbar[t] = sp.pbar(t);
  const SparseMatrix a_bb = block.A.submatrix(cond.dofs, cond.dofs);
  cond.B_g = block.B.submatrix(pbar, cond.dofs);
  cond.C_g = block.C.submatrix(pbar, pbar);
  cond.F_g.resize(cond.n_u());
  for (Index i = 0; i < cond.n_u(); ++i)
    cond.F_g[i] = block.rhs_u[cond.dofs[i]];
  cond.G_g.assign(block.rhs_p.begin(), block.rhs_p.begin() + nt);

  std::vector<Triplet> corr;
  if (k >= 2)
  {
    cond.local.resize(nt);
    for (Index t = 0; t < nt; ++t)
    {
      const auto& ed = sp.elements[t];
      LocalFactor& lf = cond.local[t];
      lf.interior_u.assign(ed.velocity.begin() + nfac, ed.velocity.end());
      lf.interior_p.assign(ed.pressure.begin() + 1, ed.pressure.end());
      std::vector<Index> bglobal;
      auto add_boundary = [&](Index g) {
        if (cond.to_condensed[g] >= 0)
        {
          bglobal.push_back(g);
          lf.boundary.push_back(cond.to_condensed[g]);
        }
      };
      for (int i = 0; i < nfac; ++i)
        add_boundary(ed.velocity[i]);
      for (Index g : ed.facet)
        add_boundary(g);

      const Eigen::MatrixXd a_oo = block.A.dense_block(lf.interior_u, lf.interior_u);
      const Eigen::MatrixXd c_oo = block.C.dense_block(lf.interior_p, lf.interior_p);
      lf.b_oo = block.B.dense_block(lf.interior_p, lf.interior_u);
      lf.a_bo = block.A.dense_block(bglobal, lf.interior_u);
      lf.a_oo.compute(a_oo);
      if (lf.a_oo.info() != Eigen::Success)
        throw SingularLocalBlock("interior velocity block of element " + std::to_string(t) + " is not SPD");
      const Eigen::MatrixXd s_oo = lf.b_oo * lf.a_oo.solve(lf.b_oo.transpose()) - c_oo;
      lf.s_oo.compute(0.5 * (s_oo + s_oo.transpose()));
      if (lf.s_oo.info() != Eigen::Success)
        throw SingularLocalBlock("interior pressure Schur block of element " + std::to_string(t) + " is singular");

      Eigen::MatrixXd x, y;
      lf.solve(lf.a_bo.transpose(), Eigen::MatrixXd::Zero(lf.interior_p.size(), bglobal.size()), x, y);
      Eigen::MatrixXd c = lf.a_bo * x;
      c = 0.5 * (c + c.transpose()).eval();
      for (std::size_t i = 0; i < bglobal.size(); ++i)
        for (std::size_t j = 0; j < bglobal.size(); ++j)
          corr.push_back({lf.boundary[i], lf.boundary[j], -c(i, j)});

      Eigen::VectorXd ro(lf.interior_u.size()), so(lf.interior_p.size());
      for (std::size_t i = 0; i < lf.interior_u.size(); ++i)
        ro[i] = block.rhs_u[lf.interior_u[i]];
      for (std::size_t i = 0; i < lf.interior_p.size(); ++i)
        so[i] = block.rhs_p[lf.interior_p[i]];
      lf.solve(ro, so, x, y);
      const Eigen::VectorXd fb = lf.a_bo * x;
      for (std::size_t i = 0; i < bglobal.size(); ++i)
        cond.F_g[lf.boundary[i]] -= fb[i];
    }
  }
  cond.A_g = add(a_bb, SparseMatrix::from_triplets(cond.n_u(), cond.n_u(), std::move(corr)));
  return cond;
}

FullSolution back_substitute(const CondensedSystem& cond, std::span<const double> x_u, std::span<const double> x_p)
{
  if (static_cast<Index>(x_u.size()) != cond.n_u() || static_cast<Index>(x_p.size()) != cond.n_p())
    throw DimensionError("back_substitute: size mismatch");
  const BlockSystem& block = *cond.block;
  const Spaces& sp = *block.spaces;
  FullSolution sol;
  sol.u = block.lift;
  sol.p.assign(sp.num_pressure(), 0.0);
  for (Index i = 0; i < cond.n_u(); ++i)
    sol.u[cond.dofs[i]] = x_u[i];
  for (Index t = 0; t < cond.n_p(); ++t)
    sol.p[sp.pbar(t)] = x_p[t];

  for (const auto& lf : cond.local)
  {
    Eigen::VectorXd ro(lf.interior_u.size()), so(lf.interior_p.size()), xb(lf.boundary.size());
    for (std::size_t i = 0; i < lf.interior_u.size(); ++i)
      ro[i] = block.rhs_u[lf.interior_u[i]];
    for (std::size_t i = 0; i < lf.interior_p.size(); ++i)
      so[i] = block.rhs_p[lf.interior_p[i]];
    for (std::size_t i = 0; i < lf.boundary.size(); ++i)
      xb[i] = x_u[lf.boundary[i]];
    ro -= lf.a_bo.transpose() * xb;
    Eigen::MatrixXd x, y;
    lf.solve(ro, so, x, y);
    for (std::size_t i = 0; i < lf.interior_u.size(); ++i)
      sol.u[lf.interior_u[i]] = x(i, 0);
    for (std::size_t i = 0; i < lf.interior_p.size(); ++i)
      sol.p[lf.interior_p[i]] = y(i, 0);
  }
  return sol;
}

Monolithic build_monolithic(const BlockSystem& block)
{
  const Spaces& sp = *block.spaces;
  const auto& fv = block.free_velocity;
  const Index nu = static_cast<Index>(fv.size());
  const Index np = sp.num_pressure();
  std::vector<Index> pall(np);
  for (Index i = 0; i < np; ++i)
    pall[i] = i;
  const SparseMatrix a = block.A.submatrix(fv, fv);
  const SparseMatrix b = block.B.submatrix(pall, fv);

  std::vector<Triplet> t;
  auto append = [&t](const SparseMatrix& m, Index r0, Index c0, bool transpose) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p)
      {
        const Index j = m.col_idx()[p];
        if (transpose)
          t.push_back({c0 + j, r0 + i, m.values()[p]});
        else
          t.push_back({r0 + i, c0 + j, m.values()[p]});
      }
  };
  append(a, 0, 0, false);
  append(b, nu, 0, false);
  append(b, nu, 0, true);
  append(block.C, nu, nu, false);

  Monolithic mono;
  mono.n_u = nu;
  mono.K = SparseMatrix::from_triplets(nu + np, nu + np, std::move(t));
  mono.rhs.resize(nu + np);
  for (Index i = 0; i < nu; ++i)
    mono.rhs[i] = block.rhs_u[fv[i]];
  for (Index i = 0; i < np; ++i)
    mono.rhs[nu + i] = block.rhs_p[i];
  return mono;
}

namespace
{

// Sparse LU solve; when `border` is non-empty the system is augmented with the
// constraint sum_{i in border} x_i = 0 and a matching multiplier column.
Vector sparse_lu_solve(const SparseMatrix& k, const Vector& rhs, const std::vector<Index>& border)
{
  const Index n = k.rows();
  const Index m = n + (border.empty() ? 0 : 1);
  std::vector<Eigen::Triplet<double>> t;
  for (Index i = 0; i < n; ++i)
    for (Index p = k.row_ptr()[i]; p < k.row_ptr()[i + 1]; ++p)
      t.emplace_back(static_cast<int>(i), static_cast<int>(k.col_idx()[p]), k.values()[p]);
  for (Index i : border)
  {
    t.emplace_back(static_cast<int>(n), static_cast<int>(i), 1.0);
    t.emplace_back(static_cast<int>(i), static_cast<int>(n), 1.0);
  }
  Eigen::SparseMatrix<double> mat(m, m);
  mat.setFromTriplets(t.begin(), t.end());
  mat.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("sparse LU failed: " + lu.lastErrorMessage());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < n; ++i)
    b[i] = rhs[i];
  const Eigen::VectorXd x = lu.solve(b);
  return Vector(x.data(), x.data() + n);
}

} // namespace

FullSolution solve_monolithic(const BlockSystem& block)
{
  const Spaces& sp = *block.spaces;
  const Monolithic mono = build_monolithic(block);
  std::vector<Index> border;
  if (pressure_singular(block))
    for (Index t = 0; t < sp.n_pbar; ++t)
      border.push_back(mono.n_u + sp.pbar(t));
  const Vector x = sparse_lu_solve(mono.K, mono.rhs, border);
  FullSolution sol;
  sol.u = block.lift;
  for (Index i = 0; i < mono.n_u; ++i)
    sol.u[block.free_velocity[i]] = x[i];
  sol.p.assign(x.begin() + mono.n_u, x.end());
  return sol;
}

FullSolution solve_condensed_direct(const CondensedSystem& cond)
{
  const Index nu = cond.n_u(), np = cond.n_p();
  std::vector<Triplet> t;
  for (Index i = 0; i < nu; ++i)
    for (Index p = cond.A_g.row_ptr()[i]; p < cond.A_g.row_ptr()[i + 1]; ++p)
      t.push_back({i, cond.A_g.col_idx()[p], cond.A_g.values()[p]});
  for (Index i = 0; i < np; ++i)
    for (Index p = cond.B_g.row_ptr()[i]; p < cond.B_g.row_ptr()[i + 1]; ++p)
    {
      t.push_back({nu + i, cond.B_g.col_idx()[p], cond.B_g.values()[p]});
      t.push_back({cond.B_g.col_idx()[p], nu + i, cond.B_g.values()[p]});
    }
  for (Index i = 0; i < np; ++i)
    for (Index p = cond.C_g.row_ptr()[i]; p < cond.C_g.row_ptr()[i + 1]; ++p)
      t.push_back({nu + i, nu + cond.C_g.col_idx()[p], cond.C_g.values()[p]});
  const SparseMatrix k = SparseMatrix::from_triplets(nu + np, nu + np, std::move(t));
  Vector rhs(cond.F_g);
  rhs.insert(rhs.end(), cond.G_g.begin(), cond.G_g.end());
  std::vector<Index> border;
  if (pressure_singular(*cond.block))
    for (Index i = 0; i < np; ++i)
      border.push_back(nu + i);
  const Vector x = sparse_lu_solve(k, rhs, border);
  return back_substitute(cond, std::span<const double>(x.data(), nu), std::span<const double>(x.data() + nu, np));
}

double block_residual(const BlockSystem& block, const FullSolution& sol)
{
  const Spaces& sp = *block.spaces;
  const Vector au = spmv(block.A, sol.u);
  Vector btp(sp.num_velocity(), 0.0);
  block.B.multiply_transpose(sol.p, btp);
  const Vector bu = spmv(block.B, sol.u);
  const Vector cp = spmv(block.C, sol.p);
  double res = 0.0, ref = 0.0;
  for (Index i : block.free_velocity)
  {
    const double r = block.load[i] - au[i] - btp[i];
    res += r * r;
    ref += block.load[i] * block.load[i];
  }
  for (Index i = 0; i < sp.num_pressure(); ++i)
  {
    const double r = -bu[i] - cp[i];
    res += r * r;
  }
  for (double v : block.rhs_u)
    ref += v * v;
  for (double v : block.rhs_p)
    ref += v * v;
  return std::sqrt(res) / std::max(std::sqrt(ref), 1e-300);
}

Eigen::MatrixXd schur_monolithic(const BlockSystem& block, Index cap)
{
  const Spaces& sp = *block.spaces;
  const Monolithic mono = build_monolithic(block);
  const Index n = mono.K.rows();
  if (n > cap)
    throw CapExceededError("schur_monolithic: dimension " + std::to_string(n) + " exceeds cap");
  std::vector<Index> pb, rest;
  for (Index i = 0; i < n; ++i)
  {
    const bool is_pbar = i >= mono.n_u && i - mono.n_u < sp.n_pbar;
    (is_pbar ? pb : rest).push_back(i);
  }
  const Eigen::MatrixXd krr = mono.K.dense_block(rest, rest);
  const Eigen::MatrixXd krp = mono.K.dense_block(rest, pb);
  const Eigen::MatrixXd kpp = mono.K.dense_block(pb, pb);
  const Eigen::MatrixXd s = krp.transpose() * krr.partialPivLu().solve(krp) - kpp;
  return 0.5 * (s + s.transpose());
}

Eigen::MatrixXd schur_condensed(const CondensedSystem& cond)
{
  const SpdFactor fa(cond.A_g);
  const Index nu = cond.n_u(), np = cond.n_p();
  const SparseMatrix bt = cond.B_g.transpose();
  Eigen::MatrixXd s(np, np);
  Vector col(nu), e(np, 0.0), y(np);
  for (Index j = 0; j < np; ++j)
  {
    e[j] = 1.0;
    bt.multiply(e, col);
    const Vector z = fa.solve(col);
    cond.B_g.multiply(z, y);
    for (Index i = 0; i < np; ++i)
      s(i, j) = y[i] - cond.C_g.coeff(i, j);
    e[j] = 0.0;
  }
  return 0.5 * (s + s.transpose());
}

} // namespace hdg
