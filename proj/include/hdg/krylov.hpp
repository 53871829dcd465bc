#ifndef HDG_KRYLOV_HPP
#define HDG_KRYLOV_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hdg/condense.hpp"
#include "hdg/linalg.hpp"

namespace hdg
{

// xorshift64* seeded through splitmix64. Fixed so that runs are reproducible
// across standard libraries.
class Rng
{
public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  // Uniform on [-1, 1) from the top 53 bits.
  double uniform_pm1();

private:
  std::uint64_t state_;
};

Vector random_vector(Index n, std::uint64_t seed);

struct MinresOptions
{
  double tol = 1e-8;
  int maxit = 1000;
};

struct SolveReport
{
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  double final_relres = 1.0;
  // Preconditioned residual norm relative to the initial one, entry j after j
  // iterations.
  std::vector<double> residuals;
  double setup_ms = 0.0;
  double solve_ms = 0.0;
};

//
// Preconditioned MINRES for symmetric K and SPD P^-1. `x` holds the initial
// guess on entry and the iterate on exit.
//
SolveReport minres(const LinearOperator& apply_k, const LinearOperator& apply_pinv, std::span<const double> b,
                   std::span<double> x, const MinresOptions& opt = {});

//
// Action of [[A_g, B_g^T], [B_g, C_g]]. When the pressure is only defined up to
// constants the pressure part of input and output is projected to zero sum.
//
LinearOperator operator_condensed(const CondensedSystem& cond);
Vector rhs_condensed(const CondensedSystem& cond);

// Seeded uniform(-1, 1) start vector, projected like the operator.
Vector initial_guess(const CondensedSystem& cond, std::uint64_t seed);

} // namespace hdg

#endif // HDG_KRYLOV_HPP
