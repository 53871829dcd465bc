#include "hdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hdg
{

// Golub-Welsch: nodes are the eigenvalues of the Legendre Jacobi matrix.
QuadratureRule1D gauss_legendre(int n)
{
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: n must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i)
  {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jac(i, i - 1) = b;
    jac(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i)
  {
    const double v0 = es.eigenvectors()(0, i);
    rule.points[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    rule.weights[i] = v0 * v0; // 2 v0^2 on [-1,1], halved for [0,1]
  }
  return rule;
}

QuadratureRule1D edge_rule(int degree) { return gauss_legendre(degree / 2 + 1); }

QuadratureRuleTriangle triangle_rule(int degree)
{
  // The Duffy factor (1 - u) raises the degree in u by one.
  const int n = (degree + 3) / 2;
  const QuadratureRule1D g = gauss_legendre(n);
  QuadratureRuleTriangle rule;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      const double u = g.points[i], v = g.points[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return rule;
}

} // namespace hdg
