#ifndef HDG_CONDENSE_HPP
#define HDG_CONDENSE_HPP

#include <vector>

#include <Eigen/Dense>

#include "hdg/assembly.hpp"
#include "hdg/linalg.hpp"

namespace hdg
{

// Block LDL^T of one element's interior saddle [[A_oo, B_oo^T], [B_oo, C_oo]].
struct LocalFactor
{
  std::vector<Index> interior_u; // global velocity DOFs
  std::vector<Index> interior_p; // global pressure DOFs
  std::vector<Index> boundary;   // condensed indices of the element's free facet DOFs
  Eigen::MatrixXd a_bo;          // boundary x interior_u
  Eigen::MatrixXd b_oo;          // interior_p x interior_u
  Eigen::LLT<Eigen::MatrixXd> a_oo;
  Eigen::LLT<Eigen::MatrixXd> s_oo; // B A^-1 B^T - C

  // Solves the local saddle; returns the velocity part in x and pressure in y.
  void solve(const Eigen::MatrixXd& r, const Eigen::MatrixXd& s, Eigen::MatrixXd& x, Eigen::MatrixXd& y) const;
};

//
// Condensed system on (free u_bd, free u_hat) x p_bar. Condensed velocity index
// i corresponds to global velocity DOF `dofs[i]`.
//
struct CondensedSystem
{
  const BlockSystem* block = nullptr;
  std::vector<Index> dofs;
  std::vector<Index> to_condensed; // global velocity -> condensed, -1 otherwise
  Index n_bd = 0;                  // leading condensed DOFs that are u_bd
  SparseMatrix A_g;
  SparseMatrix B_g; // p_bar x condensed velocity
  SparseMatrix C_g;
  Vector F_g;
  Vector G_g;
  std::vector<LocalFactor> local;

  Index n_u() const { return static_cast<Index>(dofs.size()); }
  Index n_p() const { return B_g.rows(); }
  Index size() const { return n_u() + n_p(); }
};

class SingularLocalBlock : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

CondensedSystem eliminate_local(const BlockSystem& block);

struct FullSolution
{
  Vector u; // full velocity, essential values included
  Vector p; // full pressure
};

FullSolution back_substitute(const CondensedSystem& cond, std::span<const double> x_u, std::span<const double> x_p);

// True when the pressure is determined only up to a constant.
bool pressure_singular(const BlockSystem& block);

//
// Monolithic system on (free velocity) x (all pressure).
//
struct Monolithic
{
  SparseMatrix K;
  Vector rhs;
  Index n_u = 0;
};

Monolithic build_monolithic(const BlockSystem& block);

FullSolution solve_monolithic(const BlockSystem& block);
FullSolution solve_condensed_direct(const CondensedSystem& cond);

// Residual of the full block equations for a full solution, relative to the
// right-hand side norm.
double block_residual(const BlockSystem& block, const FullSolution& sol);

// Dense Schur complement onto p_bar of the monolithic system.
Eigen::MatrixXd schur_monolithic(const BlockSystem& block, Index cap = kDenseCap);
// Dense -C_g + B_g A_g^-1 B_g^T.
Eigen::MatrixXd schur_condensed(const CondensedSystem& cond);

} // namespace hdg

#endif // HDG_CONDENSE_HPP
