#include "hdg/precond.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hdg/polynomial.hpp"

namespace hdg
{

std::string_view to_string(SmootherKind s)
{
  return s == SmootherKind::patch_sgs ? "patch-sgs" : "jacobi";
}

SmootherKind parse_smoother(std::string_view name)
{
  if (name == "patch-sgs")
    return SmootherKind::patch_sgs;
  if (name == "jacobi")
    return SmootherKind::jacobi;
  throw std::invalid_argument("unknown smoother: " + std::string(name));
}

std::string_view to_string(SchurMode s)
{
  return s == SchurMode::exact ? "exact" : "approx";
}

SchurMode parse_schur_mode(std::string_view name)
{
  if (name == "exact")
    return SchurMode::exact;
  if (name == "approx")
    return SchurMode::approx;
  throw std::invalid_argument("unknown schur mode: " + std::string(name));
}

SparseMatrix build_transfer(const CondensedSystem& cond, const ReferenceTables& tab, const AuxSpace& aux)
{
  const Spaces& sp = *cond.block->spaces;
  const Mesh& mesh = *sp.mesh;
  const int k = sp.k;
  std::vector<Triplet> trip;
  for (Index e = 0; e < mesh.num_edges(); ++e)
  {
    if (sp.essential_edge[e])
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
    Eigen::VectorXd w(nq);
    for (std::size_t q = 0; q < nq; ++q)
      w[q] = ev.weight[q];
    const Eigen::LLT<Eigen::MatrixXd> gram(nt * w.asDiagonal() * nt.transpose());

    for (Index v : edge.vertices)
    {
      const Index iv = aux.vertex_index[v];
      if (iv < 0)
        continue;
      const Point& xv = mesh.vertex(v);
      Eigen::VectorXd hat(nq);
      for (std::size_t q = 0; q < nq; ++q)
        hat[q] = 1.0 - std::hypot(ev.point[q][0] - xv[0], ev.point[q][1] - xv[1]) / edge.length;
      for (int c = 0; c < 2; ++c)
      {
        const Index col = 2 * iv + c;
        const Eigen::VectorXd gn = hat * edge.normal[c];
        const Eigen::VectorXd coef = gram.solve(nt * w.cwiseProduct(gn));
        for (int j = 0; j <= k; ++j)
          trip.push_back({cond.to_condensed[sp.bd(e, j)], col, coef[j]});
        for (int j = 0; j < k; ++j)
        {
          double s = 0.0;
          for (std::size_t q = 0; q < nq; ++q)
            s += w[q] * hat[q] * edge.tangent[c] * legendre(j, ev.t_global[q]);
          trip.push_back({cond.to_condensed[sp.hat(e, j)], col, (2.0 * j + 1.0) / edge.length * s});
        }
      }
    }
  }
  return SparseMatrix::from_triplets(cond.n_u(), aux.size(), std::move(trip));
}

// ---------------------------------------------------------------------------

PatchSmoother::PatchSmoother(const CondensedSystem& cond, SmootherKind kind) : a_(&cond.A_g), kind_(kind)
{
  const Spaces& sp = *cond.block->spaces;
  const Mesh& mesh = *sp.mesh;
  const Index n = cond.n_u();

  inv_diag_.resize(n);
  for (Index i = 0; i < n; ++i)
  {
    const double d = a_->coeff(i, i);
    if (!(d > 0.0))
      throw NotSpdError("PatchSmoother: non-positive diagonal");
    inv_diag_[i] = 1.0 / d;
  }
  if (kind_ == SmootherKind::jacobi)
    return;

  std::vector<std::vector<Index>> vertex_edges(mesh.num_vertices());
  for (Index e = 0; e < mesh.num_edges(); ++e)
    for (Index v : mesh.edge(e).vertices)
      vertex_edges[v].push_back(e);

  for (Index v = 0; v < mesh.num_vertices(); ++v)
  {
    std::vector<Index> patch;
    for (Index e : vertex_edges[v])
    {
      for (int j = 0; j <= sp.k; ++j)
        if (const Index c = cond.to_condensed[sp.bd(e, j)]; c >= 0)
          patch.push_back(c);
      for (int j = 0; j < sp.k; ++j)
        if (const Index c = cond.to_condensed[sp.hat(e, j)]; c >= 0)
          patch.push_back(c);
    }
    if (patch.empty())
      continue;
    std::sort(patch.begin(), patch.end());
    Eigen::LLT<Eigen::MatrixXd> llt(a_->dense_block(patch, patch));
    if (llt.info() != Eigen::Success)
      throw NotSpdError("PatchSmoother: patch block not SPD");
    patches_.push_back(std::move(patch));
    factors_.push_back(std::move(llt));
  }
}

void PatchSmoother::sweep_patch(std::size_t p, std::span<double> res, std::span<double> z) const
{
  const auto& patch = patches_[p];
  const Index m = static_cast<Index>(patch.size());
  Eigen::VectorXd rl(m);
  for (Index i = 0; i < m; ++i)
    rl[i] = res[patch[i]];
  const Eigen::VectorXd d = factors_[p].solve(rl);
  const auto rp = a_->row_ptr();
  const auto ci = a_->col_idx();
  const auto va = a_->values();
  // A is symmetric: column patch[i] is read from row patch[i].
  for (Index i = 0; i < m; ++i)
  {
    const Index r = patch[i];
    z[r] += d[i];
    for (Index q = rp[r]; q < rp[r + 1]; ++q)
      res[ci[q]] -= va[q] * d[i];
  }
}

void PatchSmoother::apply(std::span<const double> r, std::span<double> z) const
{
  const Index n = size();
  if (static_cast<Index>(r.size()) != n || static_cast<Index>(z.size()) != n)
    throw DimensionError("PatchSmoother::apply: size mismatch");
  if (kind_ == SmootherKind::jacobi)
  {
    for (Index i = 0; i < n; ++i)
      z[i] = inv_diag_[i] * r[i];
    return;
  }
  Vector res(r.begin(), r.end());
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t p = 0; p < patches_.size(); ++p)
    sweep_patch(p, res, z);
  for (std::size_t p = patches_.size(); p-- > 0;)
    sweep_patch(p, res, z);
}

// ---------------------------------------------------------------------------

AspPrecond::AspPrecond(const CondensedSystem& cond, const ReferenceTables& tab, const ProblemParams& params,
                       SmootherKind kind)
  : smoother_(cond, kind), aux_(build_aux_space(*cond.block->spaces))
{
  pi_ = build_transfer(cond, tab, aux_);
  pi_t_ = pi_.transpose();
  a0_ = assemble_aux(*cond.block->spaces, aux_, params);
  if (aux_.size() > 0)
    a0_factor_.emplace(a0_);
}

void AspPrecond::apply(std::span<const double> r, std::span<double> z) const
{
  smoother_.apply(r, z);
  if (!a0_factor_)
    return;
  Vector y(aux_.size());
  pi_t_.multiply(r, y);
  const Vector w = a0_factor_->solve(y);
  Vector c(size());
  pi_.multiply(w, c);
  axpy(1.0, c, z);
}

// ---------------------------------------------------------------------------

void project_mean_zero(std::span<double> x)
{
  if (x.empty())
    return;
  double s = 0.0;
  for (double v : x)
    s += v;
  s /= static_cast<double>(x.size());
  for (double& v : x)
    v -= s;
}

SchurPrecond::SchurPrecond(const Spaces& sp, const ProblemParams& params, SchurMode mode)
  : ops_(assemble_pressure_ops(sp))
{
  const double mu2 = 2.0 * params.mu;
  const double il = params.inv_lambda;
  const double tau = params.tau;
  deflate_ = il == 0.0 && sp.enclosed;
  if (mode == SchurMode::exact)
  {
    // Written with 1/lambda so that lambda = infinity is the il = 0 case.
    const double d = 1.0 + mu2 * il;
    c1_ = mu2 / d;
    c2_ = tau / (d * d);
    shift_ = tau * il / d;
  }
  else
  {
    c1_ = mu2 / (1.0 + mu2 * il);
    c2_ = tau;
    shift_ = tau * il;
  }
  const Index n = ops_.M.rows();
  inv_mass_.resize(n);
  for (Index i = 0; i < n; ++i)
    inv_mass_[i] = 1.0 / ops_.M.coeff(i, i);
  if (mode == SchurMode::exact && tau == 0.0 && il > 0.0 && sp.enclosed)
  {
    // tau -> 0 limit of the second term: N is singular here and the limit
    // keeps a rank-one part on the constants.
    double vol = 0.0;
    for (Index i = 0; i < n; ++i)
      vol += ops_.M.coeff(i, i);
    const_weight_ = 1.0 / ((1.0 + mu2 * il) * il * vol);
  }
  if (c2_ == 0.0)
    return;
  const SparseMatrix op = add(ops_.N, ops_.M, shift_);
  if (deflate_ && shift_ == 0.0)
    deflated_ = std::make_unique<DeflatedSolver>(op, Vector(n, 1.0));
  else
    factor_.emplace(op);
}

void SchurPrecond::apply(std::span<const double> r, std::span<double> z) const
{
  const Index n = size();
  if (static_cast<Index>(r.size()) != n || static_cast<Index>(z.size()) != n)
    throw DimensionError("SchurPrecond::apply: size mismatch");
  Vector rr(r.begin(), r.end());
  if (deflate_)
    project_mean_zero(rr);
  for (Index i = 0; i < n; ++i)
    z[i] = c1_ * inv_mass_[i] * rr[i];
  if (c2_ != 0.0)
  {
    const Vector s = deflated_ ? deflated_->solve(rr) : factor_->solve(rr);
    axpy(c2_, s, z);
  }
  if (const_weight_ != 0.0)
  {
    double sum = 0.0;
    for (double v : rr)
      sum += v;
    for (Index i = 0; i < n; ++i)
      z[i] += const_weight_ * sum;
  }
  if (deflate_)
    project_mean_zero(z);
}

// ---------------------------------------------------------------------------

BlockPreconditioner::BlockPreconditioner(const CondensedSystem& cond, const ReferenceTables& tab,
                                         const ProblemParams& params, SchurMode mode, SmootherKind smoother)
  : asp_(cond, tab, params, smoother), schur_(*cond.block->spaces, params, mode)
{
}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const
{
  const Index nu = asp_.size();
  if (static_cast<Index>(r.size()) != size() || static_cast<Index>(z.size()) != size())
    throw DimensionError("BlockPreconditioner::apply: size mismatch");
  asp_.apply(r.subspan(0, nu), z.subspan(0, nu));
  schur_.apply(r.subspan(nu), z.subspan(nu));
}

} // namespace hdg
