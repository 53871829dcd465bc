#include "hdg/krylov.hpp"

#include <cmath>

#include "hdg/precond.hpp"

namespace hdg
{

namespace
{

std::uint64_t splitmix64(std::uint64_t& s)
{
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed)
{
  std::uint64_t s = seed;
  state_ = splitmix64(s);
  if (state_ == 0)
    state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Rng::next()
{
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double Rng::uniform_pm1()
{
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

Vector random_vector(Index n, std::uint64_t seed)
{
  Rng rng(seed);
  Vector v(n);
  for (double& x : v)
    x = rng.uniform_pm1();
  return v;
}

SolveReport minres(const LinearOperator& apply_k, const LinearOperator& apply_pinv, std::span<const double> b,
                   std::span<double> x, const MinresOptions& opt)
{
  const std::size_t n = b.size();
  if (x.size() != n)
    throw DimensionError("minres: size mismatch");
  SolveReport rep;

  Vector v_old(n, 0.0), v(n), v_new(n), z(n), z_new(n), kz(n);
  Vector w_old(n, 0.0), w(n, 0.0), w_new(n);
  apply_k(x, kz);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = b[i] - kz[i];
  apply_pinv(v, z);
  double g2 = dot(z, v);
  if (g2 < 0.0)
  {
    rep.breakdown = true;
    return rep;
  }
  double gamma = std::sqrt(g2);
  const double gamma1 = gamma;
  double gamma_old = 1.0;
  rep.residuals.push_back(1.0);
  if (gamma1 == 0.0)
  {
    rep.converged = true;
    rep.final_relres = 0.0;
    rep.residuals.back() = 0.0;
    return rep;
  }
  double eta = gamma;
  double s_old = 0.0, s = 0.0, c_old = 1.0, c = 1.0;

  while (rep.iterations < opt.maxit)
  {
    scale(1.0 / gamma, z);
    apply_k(z, kz);
    const double delta = dot(kz, z);
    for (std::size_t i = 0; i < n; ++i)
      v_new[i] = kz[i] - (delta / gamma) * v[i] - (gamma / gamma_old) * v_old[i];
    apply_pinv(v_new, z_new);
    const double gn2 = dot(z_new, v_new);
    if (gn2 < 0.0)
    {
      rep.breakdown = true;
      break;
    }
    const double gamma_new = std::sqrt(gn2);
    const double a0 = c * delta - c_old * s * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_new * gamma_new);
    const double a2 = s * delta + c_old * c * gamma;
    const double a3 = s_old * gamma;
    if (a1 == 0.0)
    {
      rep.breakdown = true;
      break;
    }
    c_old = c;
    s_old = s;
    c = a0 / a1;
    s = gamma_new / a1;
    for (std::size_t i = 0; i < n; ++i)
      w_new[i] = (z[i] - a3 * w_old[i] - a2 * w[i]) / a1;
    axpy(c * eta, w_new, x);
    eta = -s * eta;
    ++rep.iterations;
    rep.final_relres = std::abs(eta) / gamma1;
    rep.residuals.push_back(rep.final_relres);
    if (rep.final_relres <= opt.tol)
    {
      rep.converged = true;
      break;
    }
    if (gamma_new == 0.0)
      break;
    v_old.swap(v);
    v.swap(v_new);
    z.swap(z_new);
    w_old.swap(w);
    w.swap(w_new);
    gamma_old = gamma;
    gamma = gamma_new;
  }
  return rep;
}

LinearOperator operator_condensed(const CondensedSystem& cond)
{
  const bool deflate = pressure_singular(*cond.block);
  const bool has_c = cond.C_g.nnz() > 0;
  return [&cond, deflate, has_c](std::span<const double> in, std::span<double> out) {
    const Index nu = cond.n_u(), np = cond.n_p();
    if (static_cast<Index>(in.size()) != nu + np || static_cast<Index>(out.size()) != nu + np)
      throw DimensionError("operator_condensed: size mismatch");
    std::span<const double> xu = in.subspan(0, nu);
    Vector xp(in.begin() + nu, in.end());
    if (deflate)
      project_mean_zero(xp);
    std::span<double> yu = out.subspan(0, nu), yp = out.subspan(nu);
    cond.A_g.multiply(xu, yu);
    Vector t(nu);
    cond.B_g.multiply_transpose(xp, t);
    axpy(1.0, t, yu);
    cond.B_g.multiply(xu, yp);
    if (has_c)
    {
      Vector c(np);
      cond.C_g.multiply(xp, c);
      axpy(1.0, c, yp);
    }
    if (deflate)
      project_mean_zero(yp);
  };
}

Vector rhs_condensed(const CondensedSystem& cond)
{
  Vector b(cond.F_g.begin(), cond.F_g.end());
  b.insert(b.end(), cond.G_g.begin(), cond.G_g.end());
  if (pressure_singular(*cond.block))
    project_mean_zero(std::span<double>(b).subspan(cond.n_u()));
  return b;
}

Vector initial_guess(const CondensedSystem& cond, std::uint64_t seed)
{
  Vector x = random_vector(cond.size(), seed);
  if (pressure_singular(*cond.block))
    project_mean_zero(std::span<double>(x).subspan(cond.n_u()));
  return x;
}

} // namespace hdg
