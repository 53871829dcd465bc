#ifndef HDG_VERIFY_HPP
#define HDG_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hdg/precond.hpp"
#include "hdg/problem.hpp"

namespace hdg
{

// ---------------------------------------------------------------------------
// Dense oracles. All of them materialize matrices and are meant for small
// meshes only.
// ---------------------------------------------------------------------------

// (1/lambda) M + M (tau M + 2mu N)^-1 N, with the tau -> 0 limit taken when N
// is singular.
Eigen::MatrixXd dense_schur_tilde(const Spaces& sp, const ProblemParams& params);

// max over random r of ||S~ (S~^-1 r) - r|| / ||r||, with S~^-1 the
// preconditioner application. Mean-zero vectors when the pressure is singular.
double woodbury_roundtrip_error(const Spaces& sp, const ProblemParams& params, int nvec, std::uint64_t seed);

// kappa(P S) on p_bar, P the Schur preconditioner.
double schur_condition(const Discretization& d, SchurMode mode = SchurMode::exact);
// kappa(P A_g), P the auxiliary space preconditioner.
double asp_condition(const Discretization& d, SmootherKind smoother = SmootherKind::patch_sgs);

// Relative coefficient difference between condensed and monolithic solves.
double condensation_error(const Discretization& d);
// ||S' - S_g||_F / ||S'||_F.
double schur_invariance_error(const Discretization& d);

// Range of a(u,u) / |||u|||^2 over random free velocity vectors.
std::pair<double, double> energy_ratio_range(const Discretization& d, int nvec, std::uint64_t seed);

// Extreme generalized eigenvalues of (A, energy norm matrix) on the free
// velocity DOFs: the sharp equivalence constants.
std::pair<double, double> energy_equivalence_constants(const Discretization& d);

// Smallest generalized eigenvalue of (B_g A_g^-1 B_g^T, M) on mean-zero
// pressures, Stokes data (tau = 0, lambda = infinity).
double infsup_viscous(const Discretization& d);
// Smallest generalized eigenvalue of (B V^-1 B^T, N) on mean-zero p_bar, V the
// full velocity mass matrix.
double infsup_mass(const Discretization& d);

// ---------------------------------------------------------------------------

enum class VerifyLevel
{
  small,
  full
};

VerifyLevel parse_verify_level(std::string_view name);

struct CheckResult
{
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationReport
{
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

VerificationReport run_verification(VerifyLevel level, std::ostream* log = nullptr);

} // namespace hdg

#endif // HDG_VERIFY_HPP
