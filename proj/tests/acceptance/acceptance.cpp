// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "hdg/fespace.hpp"
#include "hdg/krylov.hpp"
#include "hdg/precond.hpp"
#include "hdg/problem.hpp"
#include "hdg/verify.hpp"

using namespace hdg;

namespace
{

// Pinned tolerances.
constexpr double kCondensationTol = 1e-9;
constexpr double kInvarianceTol = 1e-10;
constexpr double kWoodburyTol = 1e-10;
constexpr int kWoodburyVectors = 100;
constexpr double kSchurGrowth = 0.25;
constexpr double kSchurSpread = 10.0;
constexpr double kAspGrowth = 0.25;
constexpr double kStokesFlat = 1.15;
constexpr double kSteadyFlat = 1.2;
constexpr double kUnsteadySpread = 3.5;
constexpr double kReferenceBand = 1.5;
constexpr double kBasisTol = 1e-11;
constexpr double kMinresTol = 1e-8;
constexpr int kMinresMaxit = 1000;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail)
{
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ProblemParams params(int k, double tau, double il)
{
  ProblemParams p;
  p.k = k;
  p.tau = tau;
  p.inv_lambda = il;
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void condensation()
{
  double worst = 0.0;
  for (int k : {2, 3})
    for (double tau : {0.0, 1.0})
      for (double il : {0.0, 1.0})
        worst = std::max(worst, condensation_error(*discretize(ProblemKind::cavity, 2, params(k, tau, il))));
  report(1, "condensation equivalence", worst <= kCondensationTol,
         "max rel diff " + fmt("%.3e", worst) + " (bound " + fmt("%.0e", kCondensationTol) + ")");
}

void invariance()
{
  double worst = 0.0;
  for (int k : {2, 3})
    for (double tau : {0.0, 1.0})
      for (double il : {0.0, 1.0})
        worst = std::max(worst, schur_invariance_error(*discretize(ProblemKind::cavity, 2, params(k, tau, il))));
  report(2, "schur invariance", worst <= kInvarianceTol,
         "max rel Frobenius diff " + fmt("%.3e", worst) + " (bound " + fmt("%.0e", kInvarianceTol) + ")");
}

// Dense (1/lambda) M + M (tau M + 2mu N)^-1 N from the pressure operators, with
// the tau -> 0 limit when N has the constants in its kernel.
Eigen::MatrixXd schur_tilde(const Spaces& sp, const ProblemParams& p)
{
  const PressureOps ops = assemble_pressure_ops(sp);
  const Eigen::MatrixXd m = ops.M.to_dense(), n = ops.N.to_dense();
  const Index np = m.rows();
  Eigen::MatrixXd s = p.inv_lambda * m;
  if (p.tau > 0.0)
    return s + m * (p.tau * m + 2.0 * p.mu * n).fullPivLu().solve(n);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(np, np);
  if (sp.enclosed)
    proj -= Eigen::VectorXd::Ones(np) * m.diagonal().transpose() / m.diagonal().sum();
  return s + m * proj / (2.0 * p.mu);
}

void woodbury()
{
  const Mesh mesh = unit_square(4);
  const Spaces sp = build_spaces(mesh, 2);
  double worst = 0.0;
  std::uint64_t seed = 1000;
  for (double tau : {0.0, 1.0, 1e4})
    for (double il : {0.0, 1e-4, 1.0})
    {
      const ProblemParams p = params(2, tau, il);
      const SchurPrecond pre(sp, p);
      const Eigen::MatrixXd s = schur_tilde(sp, p);
      for (int v = 0; v < kWoodburyVectors; ++v)
      {
        Vector r = random_vector(pre.size(), seed++);
        if (pre.deflated())
          project_mean_zero(r);
        Vector z(pre.size());
        pre.apply(r, z);
        const Eigen::Map<const Eigen::VectorXd> rv(r.data(), r.size()), zv(z.data(), z.size());
        worst = std::max(worst, (s * zv - rv).norm() / rv.norm());
      }
    }
  report(3, "woodbury exactness", worst <= kWoodburyTol,
         "max roundtrip err " + fmt("%.3e", worst) + " over 9 points x 100 vectors (bound " +
           fmt("%.0e", kWoodburyTol) + ")");
}

void schur_equivalence()
{
  double kmin = 1e300, kmax = 0.0, growth = 0.0;
  std::string rows;
  for (double tau : {0.0, 1.0, 100.0})
    for (double il : {0.0, 1e-4, 1.0})
    {
      std::vector<double> ks;
      for (Index n : {2, 4, 8})
        ks.push_back(schur_condition(*discretize(ProblemKind::cavity, n, params(2, tau, il))));
      for (std::size_t i = 1; i < ks.size(); ++i)
        growth = std::max(growth, ks[i] / ks[i - 1] - 1.0);
      kmin = std::min(kmin, *std::min_element(ks.begin(), ks.end()));
      kmax = std::max(kmax, *std::max_element(ks.begin(), ks.end()));
      rows += " [tau=" + fmt("%g", tau) + " 1/lambda=" + fmt("%g", il) + ":" + fmt(" %.3f", ks[0]) +
              fmt(" %.3f", ks[1]) + fmt(" %.3f", ks[2]) + "]";
    }
  const double spread = kmax / kmin;
  report(4, "schur spectral equivalence", growth <= kSchurGrowth && spread <= kSchurSpread,
         "max growth " + fmt("%.4f", growth) + " (bound " + fmt("%.2f", kSchurGrowth) + "), spread " +
           fmt("%.3f", spread) + " (bound " + fmt("%g", kSchurSpread) + ");" + rows);
}

void asp_equivalence()
{
  double growth = 0.0;
  std::string rows;
  for (double tau : {0.0, 100.0})
    for (double il : {0.0, 1.0})
    {
      const double kc = asp_condition(*discretize(ProblemKind::cavity, 4, params(2, tau, il)));
      const double kf = asp_condition(*discretize(ProblemKind::cavity, 8, params(2, tau, il)));
      growth = std::max(growth, kf / kc - 1.0);
      rows += " [tau=" + fmt("%g", tau) + " 1/lambda=" + fmt("%g", il) + ":" + fmt(" %.3f", kc) + fmt(" %.3f", kf) +
              "]";
    }
  report(5, "asp equivalence", growth <= kAspGrowth,
         "max growth " + fmt("%.4f", growth) + " (bound " + fmt("%.2f", kAspGrowth) + ");" + rows);
}

// ---------------------------------------------------------------------------
// Iteration tables. Every solve is kept for the MINRES criterion.

struct Run
{
  ProblemKind problem;
  Index inv_h;
  ProblemParams params;
  SolveReport rep;
};

std::vector<Run> runs;

SolveReport solve(ProblemKind pk, Index n, const ProblemParams& p)
{
  auto d = discretize(pk, n, p);
  const BlockPreconditioner pre(d->condensed, d->tables, p);
  Vector x = initial_guess(d->condensed, 0);
  MinresOptions opt;
  opt.tol = kMinresTol;
  opt.maxit = kMinresMaxit;
  return minres(operator_condensed(d->condensed), [&pre](auto r, auto z) { pre.apply(r, z); },
                rhs_condensed(d->condensed), x, opt);
}

int iterations(ProblemKind pk, Index n, const ProblemParams& p)
{
  runs.push_back({pk, n, p, solve(pk, n, p)});
  return runs.back().rep.converged ? runs.back().rep.iterations : -1;
}

void stokes_cavity()
{
  const std::vector<Index> hs{8, 16, 32, 64};
  const std::map<double, std::vector<int>> reference{{0.0, {57, 58, 57, 58}}, {1.0, {60, 60, 61, 61}},
                                                 {100.0, {54, 56, 57, 58}}};
  bool pass = true;
  std::string detail;
  for (const auto& [tau, ref] : reference)
  {
    std::vector<int> it;
    bool band = true;
    for (std::size_t i = 0; i < hs.size(); ++i)
    {
      it.push_back(iterations(ProblemKind::cavity, hs[i], params(2, tau, 0.0)));
      band &= it.back() > 0 && it.back() <= kReferenceBand * ref[i];
    }
    const double flat = static_cast<double>(*std::max_element(it.begin(), it.end())) /
                        *std::min_element(it.begin(), it.end());
    const bool ok = band && flat <= kStokesFlat;
    pass &= ok;
    detail += " [tau=" + fmt("%g", tau) + ":";
    for (int v : it)
      detail += " " + std::to_string(v);
    detail += " max/min " + fmt("%.3f", flat) + (ok ? "" : " out of bounds") + "]";
  }
  report(6, "generalized stokes cavity table", pass,
         "flatness bound " + fmt("%.2f", kStokesFlat) + ", band x" + fmt("%.1f", kReferenceBand) + ";" + detail);
}

void steady_elasticity()
{
  const std::vector<Index> hs{8, 16, 32};
  const std::vector<std::pair<double, std::vector<int>>> reference{
    {1e-4, {89, 90, 61}}, {1e-1, {57, 57, 59}}, {1.0, {38, 38, 38}}};
  bool pass = true;
  std::string detail;
  std::vector<std::vector<int>> cols;
  for (const auto& [il, ref] : reference)
  {
    std::vector<int> it;
    bool band = true;
    for (std::size_t i = 0; i < hs.size(); ++i)
    {
      it.push_back(iterations(ProblemKind::elast_steady, hs[i], params(2, 0.0, il)));
      band &= it.back() > 0 && it.back() <= kReferenceBand * ref[i];
    }
    const double flat = static_cast<double>(*std::max_element(it.begin(), it.end())) /
                        *std::min_element(it.begin(), it.end());
    const bool ok = band && flat <= kSteadyFlat;
    pass &= ok;
    detail += " [1/lambda=" + fmt("%g", il) + ":";
    for (int v : it)
      detail += " " + std::to_string(v);
    detail += " max/min " + fmt("%.3f", flat) + (ok ? "" : " out of bounds") + "]";
    cols.push_back(it);
  }
  bool monotone = true;
  for (std::size_t c = 1; c < cols.size(); ++c)
    for (std::size_t i = 0; i < hs.size(); ++i)
      monotone &= cols[c][i] <= cols[c - 1][i];
  pass &= monotone;
  report(7, "steady elasticity table", pass,
         "flatness bound " + fmt("%.2f", kSteadyFlat) + ", band x" + fmt("%.1f", kReferenceBand) +
           ", non-increasing in 1/lambda " + (monotone ? "yes" : "no") + ";" + detail);
}

void unsteady_elasticity()
{
  const std::vector<double> taus{10.0, 1e2, 1e3, 1e4};
  const std::vector<double> ils{1e-4, 1e-1, 1.0, 10.0};
  const int reference[4][4] = {{60, 53, 36, 29}, {59, 52, 38, 28}, {57, 51, 35, 27}, {50, 42, 30, 23}};
  bool converged = true, band = true;
  int lo = 1 << 30, hi = 0;
  std::string detail;
  for (std::size_t i = 0; i < taus.size(); ++i)
  {
    detail += " [tau=" + fmt("%g", taus[i]) + ":";
    for (std::size_t j = 0; j < ils.size(); ++j)
    {
      const int it = iterations(ProblemKind::elast_unsteady, 32, params(2, taus[i], ils[j]));
      converged &= it > 0;
      band &= it > 0 && it <= kReferenceBand * reference[i][j];
      lo = std::min(lo, it);
      hi = std::max(hi, it);
      detail += " " + std::to_string(it);
    }
    detail += "]";
  }
  const double spread = lo > 0 ? static_cast<double>(hi) / lo : INFINITY;
  report(8, "unsteady elasticity robustness", converged && band && spread <= kUnsteadySpread,
         std::string("all converged ") + (converged ? "yes" : "no") + ", within band " + (band ? "yes" : "no") +
           ", spread " + fmt("%.3f", spread) + " (bound " + fmt("%g", kUnsteadySpread) + ");" + detail);
}

// ---------------------------------------------------------------------------

double max_abs_coeff(const Poly2& p, int deg)
{
  double m = 0.0;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      m = std::max(m, std::abs(p.coeff(a, b)));
  return m;
}

// Outward normal trace on reference edge e at parameter s.
double ref_normal_trace(const VecPoly2& v, int e, double s)
{
  static const Point ref[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  const auto [a, b] = reference_edge_vertices(e);
  double nx = ref[b][1] - ref[a][1], ny = ref[a][0] - ref[b][0];
  const double len = std::hypot(nx, ny);
  nx /= len;
  ny /= len;
  if ((ref[a][0] - ref[e][0]) * nx + (ref[a][1] - ref[e][1]) * ny < 0.0)
  {
    nx = -nx;
    ny = -ny;
  }
  const auto val = v(ref[a][0] + s * (ref[b][0] - ref[a][0]), ref[a][1] + s * (ref[b][1] - ref[a][1]));
  return len * (val[0] * nx + val[1] * ny);
}

void basis_invariants()
{
  double worst = 0.0;
  bool dims = true;
  for (int k = 1; k <= 4; ++k)
  {
    const ReferenceBasis rb = build_reference_bdm(k);
    dims &= static_cast<int>(rb.velocity.size()) == (k + 1) * (k + 2) &&
            static_cast<int>(rb.pressure.size()) == k * (k + 1) / 2 - 1;
    // Divergence groups: lowest order edge functions have divergence 2, facet
    // and interior bubbles are solenoidal, psi functions map onto the modes.
    for (int i = 0; i < 3; ++i)
    {
      worst = std::max(worst, max_abs_coeff(rb.divergence[i * (k + 1)] - Poly2(2.0), k));
      for (int j = 1; j <= k; ++j)
        worst = std::max(worst, max_abs_coeff(rb.divergence[i * (k + 1) + j], k));
    }
    for (int j = 0; j < rb.num_divfree_interior(); ++j)
      worst = std::max(worst, max_abs_coeff(rb.divergence[rb.num_facet() + j], k));
    for (int j = 0; j < rb.num_psi(); ++j)
      worst = std::max(worst, max_abs_coeff(rb.divergence[rb.first_psi() + j] - rb.pressure[j], k));

    // Pressure modes orthonormal and mean zero.
    const auto rule = triangle_rule(2 * k);
    const int np = rb.num_psi();
    for (int i = 0; i < np; ++i)
      for (int j = 0; j <= i; ++j)
      {
        double g = 0.0, mean = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
        {
          const auto [x, y] = rule.points[q];
          g += rule.weights[q] * rb.pressure[i](x, y) * rb.pressure[j](x, y);
          mean += rule.weights[q] * rb.pressure[i](x, y);
        }
        worst = std::max({worst, std::abs(g - (i == j ? 1.0 : 0.0)), std::abs(mean)});
      }

    // Normal traces: unit flux for the lowest order function on its edge,
    // zero flux for the bubbles, nothing on the other edges.
    const auto gl = gauss_legendre(k + 2);
    for (int f = 0; f < rb.dim(); ++f)
      for (int e = 0; e < 3; ++e)
      {
        const bool own = f < rb.num_facet() && f / (k + 1) == e;
        double flux = 0.0;
        for (std::size_t q = 0; q < gl.points.size(); ++q)
        {
          const double v = ref_normal_trace(rb.velocity[f], e, gl.points[q]);
          flux += gl.weights[q] * v;
          if (!own)
            worst = std::max(worst, std::abs(v));
        }
        if (own)
          worst = std::max(worst, std::abs(flux - (f % (k + 1) == 0 ? 1.0 : 0.0)));
      }
  }

  // Mapped divergences: facet functions piecewise constant, interior ones mean zero.
  const Mesh m = step_domain(2);
  for (int k = 1; k <= 4; ++k)
  {
    const ReferenceTables tab = build_tables(k);
    for (Index t = 0; t < m.num_triangles(); ++t)
    {
      const CellValues cv = cell_values(tab, element_geometry(m, t));
      for (int f = 0; f < tab.basis.dim(); ++f)
      {
        double mean = 0.0, lo = 1e300, hi = -1e300;
        for (std::size_t q = 0; q < cv.weight.size(); ++q)
        {
          mean += cv.weight[q] * cv.div[q][f];
          lo = std::min(lo, cv.div[q][f]);
          hi = std::max(hi, cv.div[q][f]);
        }
        const double scale = std::max(1.0, std::abs(hi));
        worst = std::max(worst, (f < tab.basis.num_facet() ? hi - lo : std::abs(mean)) / scale);
      }
    }
  }
  report(9, "basis and space invariants", dims && worst <= kBasisTol,
         std::string("dimensions ") + (dims ? "ok" : "wrong") + ", max deviation " + fmt("%.3e", worst) +
           " (bound " + fmt("%.0e", kBasisTol) + ") for k=1..4");
}

void minres_properties()
{
  bool converged = true, monotone = true, identical = true;
  int worst_it = 0;
  for (const Run& r : runs)
  {
    converged &= r.rep.converged && r.rep.iterations <= kMinresMaxit;
    worst_it = std::max(worst_it, r.rep.iterations);
    for (std::size_t i = 1; i < r.rep.residuals.size(); ++i)
      monotone &= r.rep.residuals[i] <= r.rep.residuals[i - 1];
    const SolveReport again = solve(r.problem, r.inv_h, r.params);
    identical &= again.iterations == r.rep.iterations && again.residuals == r.rep.residuals;
  }
  report(10, "minres determinism and monotonicity", converged && monotone && identical,
         std::to_string(runs.size()) + " runs, all converged " + (converged ? "yes" : "no") + " (max " +
           std::to_string(worst_it) + " iterations), monotone " + (monotone ? "yes" : "no") +
           ", bit-identical rerun " + (identical ? "yes" : "no"));
}

} // namespace

int main()
{
  const auto t0 = std::chrono::steady_clock::now();
  auto timed = [](void (*f)()) {
    const auto t = std::chrono::steady_clock::now();
    f();
    std::printf("    (%.1f s)\n", seconds_since(t));
  };
  timed(condensation);
  timed(invariance);
  timed(woodbury);
  timed(schur_equivalence);
  timed(asp_equivalence);
  timed(stokes_cavity);
  timed(steady_elasticity);
  timed(unsteady_elasticity);
  timed(basis_invariants);
  timed(minres_properties);
  std::printf("%d of 10 criteria failed, %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
