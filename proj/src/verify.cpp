#include "hdg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hdg/krylov.hpp"

namespace hdg
{

namespace
{

double rel_diff(const Vector& a, const Vector& b)
{
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    n += b[i] * b[i];
  }
  return std::sqrt(d) / std::max(std::sqrt(n), 1e-300);
}

Eigen::MatrixXd restrict_mean_zero(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q)
{
  return q.transpose() * a * q;
}

double min_gen_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized eigensolver failed");
  return es.eigenvalues().minCoeff();
}

ProblemParams make_params(int k, double tau, double il)
{
  ProblemParams p;
  p.k = k;
  p.tau = tau;
  p.inv_lambda = il;
  return p;
}

std::string num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

} // namespace

Eigen::MatrixXd dense_schur_tilde(const Spaces& sp, const ProblemParams& params)
{
  const PressureOps ops = assemble_pressure_ops(sp);
  const Eigen::MatrixXd m = ops.M.to_dense();
  const Eigen::MatrixXd n = ops.N.to_dense();
  const Index np = m.rows();
  const double mu2 = 2.0 * params.mu;
  Eigen::MatrixXd s = params.inv_lambda * m;
  if (params.tau > 0.0)
    s += m * (params.tau * m + mu2 * n).partialPivLu().solve(n);
  else if (sp.enclosed)
  {
    // (tau M + 2mu N)^-1 N -> (I - 1 1^T M / |Omega|) / 2mu
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(np);
    const Eigen::VectorXd mw = m * ones;
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(np, np) - ones * mw.transpose() / mw.sum();
    s += m * q / mu2;
  }
  else
    s += m / mu2;
  return s;
}

double woodbury_roundtrip_error(const Spaces& sp, const ProblemParams& params, int nvec, std::uint64_t seed)
{
  const SchurPrecond pre(sp, params, SchurMode::exact);
  const Eigen::MatrixXd s = dense_schur_tilde(sp, params);
  const Index n = pre.size();
  double worst = 0.0;
  Vector z(n);
  for (int v = 0; v < nvec; ++v)
  {
    Vector r = random_vector(n, seed + static_cast<std::uint64_t>(v));
    if (pre.deflated())
      project_mean_zero(r);
    pre.apply(r, z);
    const Eigen::VectorXd sz = s * Eigen::Map<const Eigen::VectorXd>(z.data(), n);
    Vector out(sz.data(), sz.data() + n);
    if (pre.deflated())
      project_mean_zero(out);
    worst = std::max(worst, rel_diff(out, r));
  }
  return worst;
}

double schur_condition(const Discretization& d, SchurMode mode)
{
  const SchurPrecond pre(d.spaces, d.block.params, mode);
  const Eigen::MatrixXd s = schur_condensed(d.condensed);
  const Eigen::MatrixXd p =
    materialize([&pre](std::span<const double> r, std::span<double> z) { pre.apply(r, z); }, pre.size());
  if (pre.deflated())
  {
    const Eigen::MatrixXd q = mean_zero_basis(pre.size());
    return gen_spectrum(s, p, &q).condition();
  }
  return gen_spectrum(s, p).condition();
}

double asp_condition(const Discretization& d, SmootherKind smoother)
{
  const AspPrecond pre(d.condensed, d.tables, d.block.params, smoother);
  return gen_condition(d.condensed.A_g,
                       [&pre](std::span<const double> r, std::span<double> z) { pre.apply(r, z); });
}

double condensation_error(const Discretization& d)
{
  const FullSolution mono = solve_monolithic(d.block);
  const FullSolution cond = solve_condensed_direct(d.condensed);
  return std::max(rel_diff(cond.u, mono.u), rel_diff(cond.p, mono.p));
}

double schur_invariance_error(const Discretization& d)
{
  const Eigen::MatrixXd s1 = schur_monolithic(d.block);
  const Eigen::MatrixXd s2 = schur_condensed(d.condensed);
  return (s1 - s2).norm() / s1.norm();
}

std::pair<double, double> energy_ratio_range(const Discretization& d, int nvec, std::uint64_t seed)
{
  const SparseMatrix e = assemble_energy_norm(d.spaces, d.tables, d.block.params);
  const auto& free = d.block.free_velocity;
  const SparseMatrix a = d.block.A.submatrix(free, free);
  const SparseMatrix en = e.submatrix(free, free);
  double lo = INFINITY, hi = 0.0;
  for (int v = 0; v < nvec; ++v)
  {
    const Vector x = random_vector(a.rows(), seed + static_cast<std::uint64_t>(v));
    const double ratio = dot(x, spmv(a, x)) / dot(x, spmv(en, x));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

std::pair<double, double> energy_equivalence_constants(const Discretization& d)
{
  const SparseMatrix e = assemble_energy_norm(d.spaces, d.tables, d.block.params);
  const auto& free = d.block.free_velocity;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(d.block.A.dense_block(free, free),
                                                               e.dense_block(free, free), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized eigensolver failed");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double infsup_viscous(const Discretization& d)
{
  const Eigen::MatrixXd s = schur_condensed(d.condensed);
  const Eigen::MatrixXd m = assemble_pressure_ops(d.spaces).M.to_dense();
  if (!d.spaces.enclosed)
    return min_gen_eig(s, m);
  const Eigen::MatrixXd q = mean_zero_basis(s.rows());
  return min_gen_eig(restrict_mean_zero(s, q), restrict_mean_zero(m, q));
}

double infsup_mass(const Discretization& d)
{
  ProblemParams p1 = d.block.params, p0 = d.block.params;
  p1.tau = 1.0;
  p0.tau = 0.0;
  const BlockSystem b1 = assemble_saddle(d.spaces, d.tables, p1, d.essential);
  const BlockSystem b0 = assemble_saddle(d.spaces, d.tables, p0, d.essential);
  const auto& free = d.block.free_velocity;
  const Eigen::MatrixXd v = add(b1.A, b0.A, -1.0).dense_block(free, free);
  std::vector<Index> pbar(d.spaces.n_pbar);
  for (Index t = 0; t < d.spaces.n_pbar; ++t)
    pbar[t] = d.spaces.pbar(t);
  const Eigen::MatrixXd b = d.block.B.dense_block(pbar, free);
  const Eigen::MatrixXd s = b * v.ldlt().solve(b.transpose());
  const Eigen::MatrixXd n = assemble_pressure_ops(d.spaces).N.to_dense();
  if (!d.spaces.enclosed)
    return min_gen_eig(s, n);
  const Eigen::MatrixXd q = mean_zero_basis(s.rows());
  return min_gen_eig(restrict_mean_zero(s, q), restrict_mean_zero(n, q));
}

// ---------------------------------------------------------------------------

VerifyLevel parse_verify_level(std::string_view name)
{
  if (name == "small")
    return VerifyLevel::small;
  if (name == "full")
    return VerifyLevel::full;
  throw std::invalid_argument("unknown verification level: " + std::string(name));
}

bool VerificationReport::all_pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

VerificationReport run_verification(VerifyLevel level, std::ostream* log)
{
  const bool full = level == VerifyLevel::full;
  VerificationReport rep;
  auto record = [&](std::string name, bool pass, std::string detail) {
    if (log)
      *log << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << std::endl;
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  auto cavity = [](Index n, const ProblemParams& p) { return discretize(ProblemKind::cavity, n, p); };

  {
    double worst = 0.0;
    for (int k : {2, 3})
      for (double tau : {0.0, 1.0})
        for (double il : {0.0, 1.0})
          worst = std::max(worst, condensation_error(*cavity(2, make_params(k, tau, il))));
    record("condensation equivalence", worst <= 1e-9, "max rel diff " + num(worst) + " (bound 1e-9)");
  }
  {
    double worst = 0.0;
    for (int k : {2, 3})
      worst = std::max(worst, schur_invariance_error(*cavity(2, make_params(k, 1.0, 1.0))));
    record("schur invariance", worst <= 1e-10, "max rel diff " + num(worst) + " (bound 1e-10)");
  }
  {
    const Index n = full ? 4 : 2;
    const Mesh mesh = unit_square(n);
    double worst = 0.0;
    for (double tau : {0.0, 1.0, 1e4})
      for (double il : {0.0, 1e-4, 1.0})
      {
        const Spaces sp = build_spaces(mesh, 2);
        worst = std::max(worst, woodbury_roundtrip_error(sp, make_params(2, tau, il), 100, 1));
      }
    record("woodbury roundtrip", worst <= 1e-10, "max rel err " + num(worst) + " (bound 1e-10)");
  }
  {
    std::vector<Index> ns = full ? std::vector<Index>{2, 4, 8} : std::vector<Index>{2};
    double growth = 0.0, lo = INFINITY, hi = 0.0;
    std::string detail;
    for (double tau : {0.0, 1.0, 100.0})
      for (double il : {0.0, 1e-4, 1.0})
      {
        double prev = 0.0;
        detail += "\n    tau=" + num(tau) + " 1/lambda=" + num(il) + ":";
        for (Index n : ns)
        {
          const double kappa = schur_condition(*cavity(n, make_params(2, tau, il)));
          detail += " " + num(kappa);
          if (prev > 0.0)
            growth = std::max(growth, kappa / prev - 1.0);
          prev = kappa;
          lo = std::min(lo, kappa);
          hi = std::max(hi, kappa);
        }
      }
    const bool pass = hi / lo <= 10.0 && (!full || growth <= 0.25);
    record("schur spectral equivalence", pass,
           "spread " + num(hi / lo) + " (bound 10), growth " + num(growth) + " (bound 0.25)" + detail);
  }
  {
    std::vector<Index> ns = full ? std::vector<Index>{4, 8} : std::vector<Index>{2};
    double growth = 0.0;
    std::string detail;
    for (double tau : {0.0, 100.0})
      for (double il : {0.0, 1.0})
      {
        double prev = 0.0;
        detail += "\n    tau=" + num(tau) + " 1/lambda=" + num(il) + ":";
        for (Index n : ns)
        {
          const double kappa = asp_condition(*cavity(n, make_params(2, tau, il)));
          detail += " " + num(kappa);
          if (prev > 0.0)
            growth = std::max(growth, kappa / prev - 1.0);
          prev = kappa;
        }
      }
    record("asp condition", growth <= 0.25, "growth " + num(growth) + " (bound 0.25)" + detail);
  }
  {
    auto d2 = cavity(2, make_params(2, 0.0, 0.0));
    const auto c2 = energy_equivalence_constants(*d2);
    const auto r2 = energy_ratio_range(*d2, 200, 7);
    const double slack = 1e-12 * c2.second;
    bool pass = c2.first > 0.0 && r2.first >= c2.first - slack && r2.second <= c2.second + slack;
    std::string detail = "c1=" + num(c2.first) + " c2=" + num(c2.second) + " c2/c1=" + num(c2.second / c2.first) +
                         ", random ratios in [" + num(r2.first) + ", " + num(r2.second) + "]";
    if (full)
    {
      const auto c4 = energy_equivalence_constants(*cavity(4, make_params(2, 0.0, 0.0)));
      const double change = std::abs((c4.second / c4.first) / (c2.second / c2.first) - 1.0);
      detail += "; refined c2/c1=" + num(c4.second / c4.first) + " change " + num(change) + " (bound 0.1)";
      pass = pass && change <= 0.1;
    }
    record("energy norm equivalence", pass, detail);
  }
  if (full)
  {
    const double v4 = infsup_viscous(*cavity(4, make_params(2, 0.0, 0.0)));
    const double v8 = infsup_viscous(*cavity(8, make_params(2, 0.0, 0.0)));
    record("inf-sup (viscous)", v8 >= 0.8 * v4, "beta^2 " + num(v4) + " -> " + num(v8) + " (decrease <= 20%)");
    const double m4 = infsup_mass(*cavity(4, make_params(2, 1.0, 0.0)));
    const double m8 = infsup_mass(*cavity(8, make_params(2, 1.0, 0.0)));
    record("inf-sup (mass)", m8 >= 0.8 * m4, "beta^2 " + num(m4) + " -> " + num(m8) + " (decrease <= 20%)");
  }
  return rep;
}

} // namespace hdg
