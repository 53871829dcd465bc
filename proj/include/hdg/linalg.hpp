#ifndef HDG_LINALG_HPP
#define HDG_LINALG_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hdg
{

using Index = std::int64_t;
using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a factorization meets a pivot that is not safely positive.
class NotSpdError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class CapExceededError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Largest dimension accepted by the dense verification kernels.
inline constexpr Index kDenseCap = 6000;

// ---------------------------------------------------------------------------
// Small vector helpers. All loops run in index order so results are
// reproducible bit for bit.
// ---------------------------------------------------------------------------
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);

struct Triplet
{
  Index row;
  Index col;
  double value;
};

//
// Compressed sparse row matrix. Column indices are sorted and unique within each
// row. Square symmetric instances hold every assembled operator (A, A_g, A_0, M,
// N); rectangular ones hold B and the transfer operator.
//
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values);

  // Duplicates are summed in insertion order (stable), which keeps assembly
  // deterministic.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(Index n);
  static SparseMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  // Entry (i, j), zero when not stored.
  double coeff(Index i, Index j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrix transpose() const;
  bool is_structurally_symmetric() const;
  // max |a_ij - a_ji| over stored entries.
  double max_asymmetry() const;

  // Principal or general submatrix selected by index lists.
  SparseMatrix submatrix(std::span<const Index> row_ids, std::span<const Index> col_ids) const;
  Eigen::MatrixXd dense_block(std::span<const Index> row_ids, std::span<const Index> col_ids) const;
  Eigen::MatrixXd to_dense() const;

private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);

// Sum of two matrices with identical shape (a + s * b).
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double s = 1.0);

//
// Sparse LDL^T factorization with an approximate minimum degree ordering.
//
class SpdFactor
{
public:
  static constexpr double kPivotTol = 1e-12;

  explicit SpdFactor(const SparseMatrix& a, double pivot_tol = kPivotTol);
  ~SpdFactor();
  SpdFactor(SpdFactor&&) noexcept;
  SpdFactor& operator=(SpdFactor&&) noexcept;

  Index size() const { return n_; }
  Vector solve(std::span<const double> b) const;
  void solve(std::span<const double> b, std::span<double> x) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index n_ = 0;
};

SpdFactor factor_spd(const SparseMatrix& a);

//
// Minimum-norm solver for a symmetric positive semi-definite matrix with a
// one-dimensional nullspace (e.g. a connected graph Laplacian). The right-hand
// side is projected onto the complement of the nullspace and the result is
// orthogonal to it.
//
class DeflatedSolver
{
public:
  DeflatedSolver(const SparseMatrix& a, Vector nullspace);

  Index size() const { return static_cast<Index>(null_.size()); }
  Vector solve(std::span<const double> b) const;
  void project(std::span<double> x) const;

private:
  Vector null_;
  double null_norm2_ = 0.0;
  Index pinned_ = 0;
  std::vector<Index> kept_;
  SpdFactor factor_;
};

Vector solve_deflated(const SparseMatrix& a, std::span<const double> b, std::span<const double> nullspace);

// ---------------------------------------------------------------------------
// Dense verification kernels.
// ---------------------------------------------------------------------------
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

// Eigenvalues in ascending order.
Eigen::VectorXd dense_eig_sym(const Eigen::MatrixXd& a, Index cap = kDenseCap);

// Column-by-column materialization of a linear operator.
Eigen::MatrixXd materialize(const LinearOperator& op, Index n, Index cap = kDenseCap);

// Extreme eigenvalues of P^{-1} A for SPD A and SPD P^{-1}. When `subspace` is
// given (orthonormal columns), the pencil is restricted to that subspace.
struct SpectrumBounds
{
  double lambda_min;
  double lambda_max;
  double condition() const { return lambda_max / lambda_min; }
};

SpectrumBounds gen_spectrum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& pinv,
                            const Eigen::MatrixXd* subspace = nullptr);

double gen_condition(const SparseMatrix& a, const LinearOperator& apply_pinv,
                     const Eigen::MatrixXd* subspace = nullptr);

// Orthonormal basis of the complement of the constant vector in R^n.
Eigen::MatrixXd mean_zero_basis(Index n);

} // namespace hdg

#endif // HDG_LINALG_HPP
