#ifndef HDG_PRECOND_HPP
#define HDG_PRECOND_HPP

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hdg/assembly.hpp"
#include "hdg/condense.hpp"
#include "hdg/linalg.hpp"

namespace hdg
{

// Facet L2 projection of continuous P1 vector fields onto the condensed
// velocity space: rows are condensed DOFs, columns auxiliary DOFs.
SparseMatrix build_transfer(const CondensedSystem& cond, const ReferenceTables& tab, const AuxSpace& aux);

enum class SmootherKind
{
  patch_sgs,
  jacobi
};

std::string_view to_string(SmootherKind s);
SmootherKind parse_smoother(std::string_view name);

//
// Symmetric block Gauss-Seidel over vertex patches (all free condensed DOFs on
// the edges touching a vertex), forward sweep then backward sweep.
//
class PatchSmoother
{
public:
  PatchSmoother(const CondensedSystem& cond, SmootherKind kind = SmootherKind::patch_sgs);

  void apply(std::span<const double> r, std::span<double> z) const;
  Index size() const { return a_->rows(); }
  SmootherKind kind() const { return kind_; }
  const std::vector<std::vector<Index>>& patches() const { return patches_; }

private:
  void sweep_patch(std::size_t p, std::span<double> res, std::span<double> z) const;

  const SparseMatrix* a_;
  SmootherKind kind_;
  std::vector<std::vector<Index>> patches_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  Vector inv_diag_;
};

//
// Auxiliary space preconditioner R + Pi A0^-1 Pi^T for the condensed stiffness.
//
class AspPrecond
{
public:
  AspPrecond(const CondensedSystem& cond, const ReferenceTables& tab, const ProblemParams& params,
             SmootherKind kind = SmootherKind::patch_sgs);

  void apply(std::span<const double> r, std::span<double> z) const;
  Index size() const { return smoother_.size(); }

  const PatchSmoother& smoother() const { return smoother_; }
  const SparseMatrix& transfer() const { return pi_; }
  const SparseMatrix& aux_matrix() const { return a0_; }
  const AuxSpace& aux_space() const { return aux_; }

private:
  PatchSmoother smoother_;
  AuxSpace aux_;
  SparseMatrix pi_;
  SparseMatrix pi_t_;
  SparseMatrix a0_;
  std::optional<SpdFactor> a0_factor_;
};

enum class SchurMode
{
  exact,
  approx
};

std::string_view to_string(SchurMode s);
SchurMode parse_schur_mode(std::string_view name);

//
// Inverse of the Schur complement approximation
//   c1 M^-1 + c2 (s M + N)^-1,
// c1 = 2mu lambda/(2mu+lambda), c2 = tau (lambda/(2mu+lambda))^2, s = tau/(2mu+lambda)
// in exact mode. For tau = 0 on an enclosed domain with finite lambda the
// second term is replaced by its limit, a multiple of the constant projector.
// When the pressure is only defined up to constants the operator
// acts on mean-zero vectors (input and output projected).
//
class SchurPrecond
{
public:
  SchurPrecond(const Spaces& sp, const ProblemParams& params, SchurMode mode = SchurMode::exact);

  void apply(std::span<const double> r, std::span<double> z) const;
  Index size() const { return ops_.M.rows(); }

  const PressureOps& ops() const { return ops_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double mass_shift() const { return shift_; }
  bool deflated() const { return deflate_; }

private:
  PressureOps ops_;
  double c1_ = 0.0, c2_ = 0.0, shift_ = 0.0;
  double const_weight_ = 0.0;
  bool deflate_ = false;
  Vector inv_mass_;
  std::optional<SpdFactor> factor_;
  std::unique_ptr<DeflatedSolver> deflated_;
};

// Euclidean projection onto vectors with zero sum.
void project_mean_zero(std::span<double> x);

//
// diag(ASP, Schur inverse) on [condensed velocity; p_bar].
//
class BlockPreconditioner
{
public:
  BlockPreconditioner(const CondensedSystem& cond, const ReferenceTables& tab, const ProblemParams& params,
                      SchurMode mode = SchurMode::exact, SmootherKind smoother = SmootherKind::patch_sgs);

  void apply(std::span<const double> r, std::span<double> z) const;
  Index size() const { return asp_.size() + schur_.size(); }
  const AspPrecond& asp() const { return asp_; }
  const SchurPrecond& schur() const { return schur_; }

private:
  AspPrecond asp_;
  SchurPrecond schur_;
};

} // namespace hdg

#endif // HDG_PRECOND_HPP
