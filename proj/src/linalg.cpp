#include "hdg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace hdg
{

double dot(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y)
{
  if (x.size() != y.size())
    throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] += a * x[i];
}

void scale(double a, std::span<double> x)
{
  for (auto& v : x)
    v *= a;
}

// ---------------------------------------------------------------------------
// SparseMatrix
// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                           std::vector<Index> col_idx, std::vector<double> values)
  : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
    values_(std::move(values))
{
  if (rows_ < 0 || cols_ < 0)
    throw DimensionError("SparseMatrix: negative dimension");
  if (static_cast<Index>(row_ptr_.size()) != rows_ + 1 || row_ptr_.front() != 0)
    throw DimensionError("SparseMatrix: bad row pointer array");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<Index>(values_.size()))
    throw DimensionError("SparseMatrix: index/value length mismatch");
  for (Index i = 0; i < rows_; ++i)
  {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      if (col_idx_[p] < 0 || col_idx_[p] >= cols_)
        throw DimensionError("SparseMatrix: column index out of range");
      if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
        throw DimensionError("SparseMatrix: column indices must be sorted and unique");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> triplets)
{
  for (const auto& t : triplets)
  {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw DimensionError("from_triplets: index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> row_ptr(rows + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t p = 0; p < triplets.size();)
  {
    const Index r = triplets[p].row, c = triplets[p].col;
    double s = 0.0;
    while (p < triplets.size() && triplets[p].row == r && triplets[p].col == c)
      s += triplets[p++].value;
    col_idx.push_back(c);
    values.push_back(s);
    ++row_ptr[r + 1];
  }
  std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::identity(Index n)
{
  std::vector<Index> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), Index{0});
  std::iota(ci.begin(), ci.end(), Index{0});
  return SparseMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol)
{
  std::vector<Triplet> t;
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < dense.cols(); ++j)
      if (std::abs(dense(i, j)) > drop_tol)
        t.push_back({i, j, dense(i, j)});
  return from_triplets(dense.rows(), dense.cols(), std::move(t));
}

double SparseMatrix::coeff(Index i, Index j) const
{
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
    return 0.0;
  return values_[it - col_idx_.begin()];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_)
    throw DimensionError("spmv: dimension mismatch");
  for (Index i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      s += values_[p] * x[col_idx_[p]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const
{
  if (static_cast<Index>(x.size()) != rows_ || static_cast<Index>(y.size()) != cols_)
    throw DimensionError("spmv^T: dimension mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      y[col_idx_[p]] += values_[p] * x[i];
}

SparseMatrix SparseMatrix::transpose() const
{
  std::vector<Index> rp(cols_ + 1, 0);
  for (Index p = 0; p < nnz(); ++p)
    ++rp[col_idx_[p] + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<Index> next(rp.begin(), rp.end() - 1);
  std::vector<Index> ci(nnz());
  std::vector<double> v(nnz());
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      const Index q = next[col_idx_[p]]++;
      ci[q] = i;
      v[q] = values_[p];
    }
  return SparseMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(v));
}

bool SparseMatrix::is_structurally_symmetric() const
{
  if (rows_ != cols_)
    return false;
  const SparseMatrix t = transpose();
  return t.row_ptr_ == row_ptr_ && t.col_idx_ == col_idx_;
}

double SparseMatrix::max_asymmetry() const
{
  if (rows_ != cols_)
    throw DimensionError("max_asymmetry: matrix not square");
  double m = 0.0;
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      m = std::max(m, std::abs(values_[p] - coeff(col_idx_[p], i)));
  return m;
}

SparseMatrix SparseMatrix::submatrix(std::span<const Index> row_ids, std::span<const Index> col_ids) const
{
  std::vector<Index> col_map(cols_, -1);
  for (std::size_t j = 0; j < col_ids.size(); ++j)
    col_map[col_ids[j]] = static_cast<Index>(j);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < row_ids.size(); ++i)
  {
    const Index r = row_ids[i];
    for (Index p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
      if (col_map[col_idx_[p]] >= 0)
        t.push_back({static_cast<Index>(i), col_map[col_idx_[p]], values_[p]});
  }
  return from_triplets(static_cast<Index>(row_ids.size()), static_cast<Index>(col_ids.size()),
                       std::move(t));
}

Eigen::MatrixXd SparseMatrix::dense_block(std::span<const Index> row_ids,
                                          std::span<const Index> col_ids) const
{
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(row_ids.size(), col_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    for (std::size_t j = 0; j < col_ids.size(); ++j)
      out(i, j) = coeff(row_ids[i], col_ids[j]);
  return out;
}

Eigen::MatrixXd SparseMatrix::to_dense() const
{
  if (rows_ > kDenseCap || cols_ > kDenseCap)
    throw CapExceededError("to_dense: matrix exceeds the dense verification cap");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i)
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      d(i, col_idx_[p]) = values_[p];
  return d;
}

Vector spmv(const SparseMatrix& a, std::span<const double> x)
{
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double s)
{
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("add: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows(); ++i)
  {
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      t.push_back({i, a.col_idx()[p], a.values()[p]});
    for (Index p = b.row_ptr()[i]; p < b.row_ptr()[i + 1]; ++p)
      t.push_back({i, b.col_idx()[p], s * b.values()[p]});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

// ---------------------------------------------------------------------------
// SpdFactor
// ---------------------------------------------------------------------------

struct SpdFactor::Impl
{
  using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

SpdFactor::SpdFactor(const SparseMatrix& a, double pivot_tol) : impl_(std::make_unique<Impl>()), n_(a.rows())
{
  if (a.rows() != a.cols())
    throw DimensionError("factor_spd: matrix not square");
  double max_diag = 0.0;
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(a.nnz());
  for (Index i = 0; i < a.rows(); ++i)
  {
    for (Index p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
    {
      const Index j = a.col_idx()[p];
      if (j == i)
        max_diag = std::max(max_diag, a.values()[p]);
      t.emplace_back(static_cast<int>(i), static_cast<int>(j), a.values()[p]);
    }
  }
  if (n_ == 0)
    return;
  Impl::EigenSparse m(n_, n_);
  m.setFromTriplets(t.begin(), t.end());
  impl_->ldlt.compute(m);
  if (impl_->ldlt.info() != Eigen::Success)
    throw NotSpdError("factor_spd: factorization failed");
  const Eigen::VectorXd d = impl_->ldlt.vectorD();
  const double floor = pivot_tol * max_diag;
  for (Index i = 0; i < d.size(); ++i)
  {
    if (!(d[i] > floor))
      throw NotSpdError("factor_spd: pivot " + std::to_string(d[i]) + " below tolerance " +
                        std::to_string(floor));
  }
}

SpdFactor::~SpdFactor() = default;
SpdFactor::SpdFactor(SpdFactor&&) noexcept = default;
SpdFactor& SpdFactor::operator=(SpdFactor&&) noexcept = default;

void SpdFactor::solve(std::span<const double> b, std::span<double> x) const
{
  if (static_cast<Index>(b.size()) != n_ || static_cast<Index>(x.size()) != n_)
    throw DimensionError("SpdFactor::solve: dimension mismatch");
  if (n_ == 0)
    return;
  Eigen::Map<const Eigen::VectorXd> bb(b.data(), n_);
  Eigen::Map<Eigen::VectorXd> xx(x.data(), n_);
  xx = impl_->ldlt.solve(bb);
}

Vector SpdFactor::solve(std::span<const double> b) const
{
  Vector x(n_);
  solve(b, x);
  return x;
}

SpdFactor factor_spd(const SparseMatrix& a) { return SpdFactor(a); }

// ---------------------------------------------------------------------------
// DeflatedSolver
// ---------------------------------------------------------------------------

namespace
{

Index argmax_abs(std::span<const double> v)
{
  if (v.empty())
    throw DimensionError("DeflatedSolver: empty nullspace vector");
  Index best = 0;
  for (Index i = 1; i < static_cast<Index>(v.size()); ++i)
    if (std::abs(v[i]) > std::abs(v[best]))
      best = i;
  return best;
}

std::vector<Index> all_but(Index n, Index skip)
{
  std::vector<Index> ids;
  ids.reserve(n - 1);
  for (Index i = 0; i < n; ++i)
    if (i != skip)
      ids.push_back(i);
  return ids;
}

} // namespace

DeflatedSolver::DeflatedSolver(const SparseMatrix& a, Vector nullspace)
  : null_(std::move(nullspace)), null_norm2_(dot(null_, null_)), pinned_(argmax_abs(null_)),
    kept_(all_but(a.rows(), pinned_)), factor_(a.submatrix(kept_, kept_))
{
  if (a.rows() != static_cast<Index>(null_.size()))
    throw DimensionError("DeflatedSolver: nullspace length mismatch");
}

void DeflatedSolver::project(std::span<double> x) const
{
  axpy(-dot(null_, x) / null_norm2_, null_, x);
}

Vector DeflatedSolver::solve(std::span<const double> b) const
{
  Vector pb(b.begin(), b.end());
  project(pb);
  Vector rhs(kept_.size());
  for (std::size_t i = 0; i < kept_.size(); ++i)
    rhs[i] = pb[kept_[i]];
  const Vector xr = factor_.solve(rhs);
  Vector x(null_.size(), 0.0);
  for (std::size_t i = 0; i < kept_.size(); ++i)
    x[kept_[i]] = xr[i];
  project(x);
  return x;
}

Vector solve_deflated(const SparseMatrix& a, std::span<const double> b, std::span<const double> nullspace)
{
  return DeflatedSolver(a, Vector(nullspace.begin(), nullspace.end())).solve(b);
}

// ---------------------------------------------------------------------------
// Dense kernels
// ---------------------------------------------------------------------------

Eigen::VectorXd dense_eig_sym(const Eigen::MatrixXd& a, Index cap)
{
  if (a.rows() != a.cols())
    throw DimensionError("dense_eig_sym: matrix not square");
  if (a.rows() > cap)
    throw CapExceededError("dense_eig_sym: dimension " + std::to_string(a.rows()) +
                           " exceeds verification cap " + std::to_string(cap));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::MatrixXd materialize(const LinearOperator& op, Index n, Index cap)
{
  if (n > cap)
    throw CapExceededError("materialize: dimension exceeds verification cap");
  Eigen::MatrixXd out(n, n);
  Vector e(n, 0.0), col(n);
  for (Index j = 0; j < n; ++j)
  {
    e[j] = 1.0;
    op(e, col);
    e[j] = 0.0;
    out.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  return out;
}

SpectrumBounds gen_spectrum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& pinv,
                            const Eigen::MatrixXd* subspace)
{
  Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  Eigen::MatrixXd ps = 0.5 * (pinv + pinv.transpose());
  if (subspace)
  {
    as = subspace->transpose() * as * (*subspace);
    ps = subspace->transpose() * ps * (*subspace);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(ps);
  if (llt.info() != Eigen::Success)
    throw NotSpdError("gen_condition: preconditioner is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd c = l.transpose() * as * l;
  const Eigen::VectorXd ev = dense_eig_sym(0.5 * (c + c.transpose()));
  if (!(ev[0] > 0.0))
    throw NotSpdError("gen_condition: non-positive smallest eigenvalue " + std::to_string(ev[0]));
  return {ev[0], ev[ev.size() - 1]};
}

double gen_condition(const SparseMatrix& a, const LinearOperator& apply_pinv, const Eigen::MatrixXd* subspace)
{
  const Eigen::MatrixXd ad = a.to_dense();
  const Eigen::MatrixXd pd = materialize(apply_pinv, a.rows());
  return gen_spectrum(ad, pd, subspace).condition();
}

Eigen::MatrixXd mean_zero_basis(Index n)
{
  // Householder reflector mapping e_0 to the normalized ones vector; its
  // remaining columns span the complement.
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v[0] -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 0.0)
    h -= 2.0 * v * v.transpose() / vv;
  return h.rightCols(n - 1);
}

} // namespace hdg
