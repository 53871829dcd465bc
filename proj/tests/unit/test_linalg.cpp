#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hdg/krylov.hpp"
#include "hdg/linalg.hpp"
#include "hdg/precond.hpp"

using namespace hdg;

namespace
{

SparseMatrix tridiag(Index n)
{
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
  {
    t.push_back({i, i, 2.0});
    if (i + 1 < n)
    {
      t.push_back({i, i + 1, -1.0});
      t.push_back({i + 1, i, -1.0});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

Eigen::MatrixXd random_spd(Index n, std::uint64_t seed, double shift)
{
  Rng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      g(i, j) = rng.uniform_pm1();
  return g * g.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

// Laplacian of a ring plus random chords: connected by construction.
SparseMatrix graph_laplacian(Index n, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<Triplet> t;
  auto edge = [&t](Index a, Index b, double w) {
    t.push_back({a, a, w});
    t.push_back({b, b, w});
    t.push_back({a, b, -w});
    t.push_back({b, a, -w});
  };
  for (Index i = 0; i < n; ++i)
    edge(i, (i + 1) % n, 1.0 + 0.5 * rng.uniform_pm1());
  for (int c = 0; c < 10; ++c)
  {
    const Index a = static_cast<Index>(rng.next() % n), b = static_cast<Index>(rng.next() % n);
    if (a != b)
      edge(a, b, 1.0);
  }
  return SparseMatrix::from_triplets(n, n, t);
}

} // namespace

TEST(Spmv, Identity)
{
  const Vector y = spmv(SparseMatrix::identity(3), Vector{1, 2, 3});
  EXPECT_EQ(y, (Vector{1, 2, 3}));
}

TEST(Spmv, RowSums)
{
  const Vector y = spmv(tridiag(2), Vector{1, 1});
  EXPECT_EQ(y, (Vector{1, 1}));
}

TEST(Spmv, MatchesDenseProduct)
{
  const Eigen::MatrixXd a = random_spd(50, 3, 1.0);
  const SparseMatrix s = SparseMatrix::from_dense(a);
  const Vector x = random_vector(50, 4);
  const Vector y = spmv(s, x);
  const Eigen::VectorXd yd = a * Eigen::Map<const Eigen::VectorXd>(x.data(), 50);
  for (Index i = 0; i < 50; ++i)
    EXPECT_LE(std::abs(y[i] - yd[i]), 1e-13 * std::max(1.0, std::abs(yd[i])));
}

TEST(Spmv, DimensionMismatchThrows)
{
  Vector y(3);
  EXPECT_THROW(SparseMatrix::identity(3).multiply(Vector{1, 2}, y), DimensionError);
}

TEST(SparseMatrix, TripletsSortedUniqueAndSummed)
{
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{1, 1, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}, {0, 0, 1.0}});
  EXPECT_EQ(a.nnz(), 3);
  EXPECT_EQ(a.coeff(1, 1), 4.0);
  EXPECT_EQ(a.coeff(1, 0), 0.0);
  EXPECT_EQ(a.col_idx()[0], 0);
  EXPECT_EQ(a.col_idx()[1], 1);
}

TEST(SparseMatrix, TransposeAndSubmatrix)
{
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, {{0, 2, 5.0}, {1, 0, -1.0}});
  const SparseMatrix t = a.transpose();
  EXPECT_EQ(t.rows(), 3);
  EXPECT_EQ(t.coeff(2, 0), 5.0);
  EXPECT_EQ(t.coeff(0, 1), -1.0);
  const std::vector<Index> r{1}, c{0, 2};
  const SparseMatrix s = a.submatrix(r, c);
  EXPECT_EQ(s.coeff(0, 0), -1.0);
  EXPECT_EQ(s.coeff(0, 1), 0.0);
}

TEST(SpdFactor, Diagonal)
{
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 4.0}, {1, 1, 9.0}});
  const Vector x = factor_spd(a).solve(Vector{4, 9});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(SpdFactor, LaplacianMatchesDense)
{
  const SparseMatrix a = tridiag(10);
  const Vector b(10, 1.0);
  const Vector x = factor_spd(a).solve(b);
  const Eigen::VectorXd xd = a.to_dense().ldlt().solve(Eigen::VectorXd::Ones(10));
  for (Index i = 0; i < 10; ++i)
    EXPECT_NEAR(x[i], xd[i], 1e-12 * xd.cwiseAbs().maxCoeff());
}

TEST(SpdFactor, SingularLaplacianRejected)
{
  EXPECT_THROW(factor_spd(graph_laplacian(12, 1)), NotSpdError);
}

TEST(SpdFactor, RoundtripOnRandomSpd)
{
  for (std::uint64_t seed : {1, 2, 3})
  {
    // Eigenvalues from 1e-6 to about 120: condition below 1e8.
    const Eigen::MatrixXd a = random_spd(40, seed, 1e-6);
    const SparseMatrix s = SparseMatrix::from_dense(a);
    const Vector b = random_vector(40, seed + 10);
    const Vector x = factor_spd(s).solve(b);
    const Vector ax = spmv(s, x);
    Vector r(40);
    for (Index i = 0; i < 40; ++i)
      r[i] = ax[i] - b[i];
    EXPECT_LE(norm2(r) / norm2(b), 1e-10);
  }
}

TEST(Deflated, TwoByTwoHandSolve)
{
  const SparseMatrix n = SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}});
  const Vector x = solve_deflated(n, Vector{1, -1}, Vector{1, 1});
  EXPECT_NEAR(x[0], 0.5, 1e-15);
  EXPECT_NEAR(x[1], -0.5, 1e-15);
  const Vector z = solve_deflated(n, Vector{1, 1}, Vector{1, 1});
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 0.0);
}

TEST(Deflated, GraphLaplacianAgainstPseudoInverse)
{
  const SparseMatrix l = graph_laplacian(20, 5);
  const Vector b = random_vector(20, 6);
  const Vector x = solve_deflated(l, b, Vector(20, 1.0));
  Vector pb = b;
  project_mean_zero(pb);
  const Vector lx = spmv(l, x);
  Vector r(20);
  for (Index i = 0; i < 20; ++i)
    r[i] = lx[i] - pb[i];
  EXPECT_LE(norm2(r), 1e-10);
  double sum = 0.0;
  for (double v : x)
    sum += v;
  EXPECT_LE(std::abs(sum), 1e-12);
  const Eigen::MatrixXd pinv = l.to_dense().completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::VectorXd xd = pinv * Eigen::Map<const Eigen::VectorXd>(b.data(), 20);
  for (Index i = 0; i < 20; ++i)
    EXPECT_NEAR(x[i], xd[i], 1e-10);
}

TEST(DenseEig, SmallExamples)
{
  Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const Eigen::VectorXd e = dense_eig_sym(d);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], 2.0);
  EXPECT_DOUBLE_EQ(e[2], 3.0);
  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const Eigen::VectorXd f = dense_eig_sym(a);
  EXPECT_NEAR(f[0], 1.0, 1e-14);
  EXPECT_NEAR(f[1], 3.0, 1e-14);
}

TEST(DenseEig, LaplacianClosedForm)
{
  const Eigen::VectorXd e = dense_eig_sym(tridiag(8).to_dense());
  for (int j = 1; j <= 8; ++j)
  {
    const double s = std::sin(j * std::numbers::pi / 18.0);
    EXPECT_NEAR(e[j - 1], 4.0 * s * s, 1e-10);
  }
}

TEST(DenseEig, CapExceeded)
{
  EXPECT_THROW(dense_eig_sym(Eigen::MatrixXd::Identity(5, 5), 4), CapExceededError);
}

TEST(GenCondition, Examples)
{
  const SparseMatrix a = tridiag(12);
  const SpdFactor f = factor_spd(a);
  const double k1 = gen_condition(a, [&f](std::span<const double> r, std::span<double> z) { f.solve(r, z); });
  EXPECT_NEAR(k1, 1.0, 1e-8);
  const double k2 = gen_condition(a, [&f](std::span<const double> r, std::span<double> z) {
    f.solve(r, z);
    scale(0.5, z);
  });
  EXPECT_NEAR(k2, 1.0, 1e-8);
  const SparseMatrix d = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 100.0}});
  const double k3 =
    gen_condition(d, [](std::span<const double> r, std::span<double> z) { std::copy(r.begin(), r.end(), z.begin()); });
  EXPECT_NEAR(k3, 100.0, 1e-10);
}

TEST(GenCondition, IndefinitePreconditionerRejected)
{
  const SparseMatrix a = SparseMatrix::identity(3);
  EXPECT_THROW(gen_condition(a,
                             [](std::span<const double> r, std::span<double> z) {
                               for (std::size_t i = 0; i < r.size(); ++i)
                                 z[i] = i == 0 ? -r[i] : r[i];
                             }),
               NotSpdError);
}

TEST(MeanZeroBasis, OrthonormalAndOrthogonalToConstants)
{
  const Eigen::MatrixXd q = mean_zero_basis(7);
  EXPECT_EQ(q.cols(), 6);
  EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-13);
  EXPECT_LE((q.transpose() * Eigen::VectorXd::Ones(7)).norm(), 1e-13);
}
