#ifndef HDG_QUADRATURE_HPP
#define HDG_QUADRATURE_HPP

#include <array>
#include <vector>

namespace hdg
{

struct QuadratureRule1D
{
  std::vector<double> points;  // on [0, 1]
  std::vector<double> weights; // sum to 1
};

struct QuadratureRuleTriangle
{
  std::vector<std::array<double, 2>> points; // reference triangle (0,0),(1,0),(0,1)
  std::vector<double> weights;               // sum to 1/2
};

// Gauss-Legendre rule with n points on [0, 1]; exact for degree 2n - 1.
QuadratureRule1D gauss_legendre(int n);

// Collapsed (Duffy) Gauss rule on the reference triangle exact for polynomials
// of total degree <= degree.
QuadratureRuleTriangle triangle_rule(int degree);

// Edge rule exact for polynomials of degree <= degree.
QuadratureRule1D edge_rule(int degree);

} // namespace hdg

#endif // HDG_QUADRATURE_HPP
