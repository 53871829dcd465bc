#include "hdg/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdg
{

Poly2 Poly2::monomial(int a, int b, double coeff)
{
  Poly2 p;
  p.grow(a + 1, b + 1);
  p.c_(a, b) = coeff;
  return p;
}

void Poly2::grow(int rows, int cols)
{
  if (rows <= c_.rows() && cols <= c_.cols())
    return;
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(std::max<int>(rows, c_.rows()), std::max<int>(cols, c_.cols()));
  n.topLeftCorner(c_.rows(), c_.cols()) = c_;
  c_ = std::move(n);
}

int Poly2::degree() const
{
  int d = 0;
  for (int a = 0; a < c_.rows(); ++a)
    for (int b = 0; b < c_.cols(); ++b)
      if (c_(a, b) != 0.0)
        d = std::max(d, a + b);
  return d;
}

double Poly2::coeff(int a, int b) const
{
  if (a >= c_.rows() || b >= c_.cols())
    return 0.0;
  return c_(a, b);
}

double Poly2::operator()(double x, double y) const
{
  // Horner in y for every power of x, then in x.
  double s = 0.0;
  for (int a = static_cast<int>(c_.rows()) - 1; a >= 0; --a)
  {
    double row = 0.0;
    for (int b = static_cast<int>(c_.cols()) - 1; b >= 0; --b)
      row = row * y + c_(a, b);
    s = s * x + row;
  }
  return s;
}

Poly2 Poly2::dx() const
{
  Poly2 p;
  if (c_.rows() < 2)
    return p;
  p.grow(c_.rows() - 1, c_.cols());
  for (int a = 1; a < c_.rows(); ++a)
    for (int b = 0; b < c_.cols(); ++b)
      p.c_(a - 1, b) = a * c_(a, b);
  return p;
}

Poly2 Poly2::dy() const
{
  Poly2 p;
  if (c_.cols() < 2)
    return p;
  p.grow(c_.rows(), c_.cols() - 1);
  for (int a = 0; a < c_.rows(); ++a)
    for (int b = 1; b < c_.cols(); ++b)
      p.c_(a, b - 1) = b * c_(a, b);
  return p;
}

Poly2& Poly2::operator+=(const Poly2& o)
{
  grow(o.c_.rows(), o.c_.cols());
  c_.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  return *this;
}

Poly2& Poly2::operator-=(const Poly2& o)
{
  grow(o.c_.rows(), o.c_.cols());
  c_.topLeftCorner(o.c_.rows(), o.c_.cols()) -= o.c_;
  return *this;
}

Poly2& Poly2::operator*=(double s)
{
  c_ *= s;
  return *this;
}

Poly2 operator*(const Poly2& a, const Poly2& b)
{
  Poly2 p;
  p.grow(a.c_.rows() + b.c_.rows() - 1, a.c_.cols() + b.c_.cols() - 1);
  for (int i = 0; i < a.c_.rows(); ++i)
    for (int j = 0; j < a.c_.cols(); ++j)
    {
      if (a.c_(i, j) == 0.0)
        continue;
      for (int k = 0; k < b.c_.rows(); ++k)
        for (int l = 0; l < b.c_.cols(); ++l)
          p.c_(i + k, j + l) += a.c_(i, j) * b.c_(k, l);
    }
  return p;
}

Poly2 Poly2::pow(int n) const
{
  Poly2 p(1.0);
  for (int i = 0; i < n; ++i)
    p = p * (*this);
  return p;
}

std::vector<double> legendre_coefficients(int n)
{
  if (n < 0)
    throw std::invalid_argument("legendre_coefficients: negative degree");
  std::vector<double> p0{1.0}, p1{0.0, 1.0};
  if (n == 0)
    return p0;
  for (int m = 1; m < n; ++m)
  {
    // (m+1) P_{m+1} = (2m+1) t P_m - m P_{m-1}
    std::vector<double> p2(m + 2, 0.0);
    for (int i = 0; i <= m; ++i)
      p2[i + 1] += (2.0 * m + 1.0) * p1[i];
    for (int i = 0; i < m; ++i)
      p2[i] -= m * p0[i];
    for (auto& c : p2)
      c /= (m + 1.0);
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  return p1;
}

std::vector<double> integrated_legendre_coefficients(int n)
{
  if (n < 2)
    throw std::invalid_argument("integrated_legendre_coefficients: n must be >= 2");
  const std::vector<double> p = legendre_coefficients(n - 1);
  std::vector<double> l(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    l[i + 1] = p[i] / (i + 1.0);
  // Fix the constant so that L_n(-1) = 0.
  double at_minus_one = 0.0;
  for (int i = n; i >= 0; --i)
    at_minus_one = at_minus_one * -1.0 + l[i];
  l[0] = -at_minus_one;
  return l;
}

double legendre(int n, double t)
{
  if (n == 0)
    return 1.0;
  double p0 = 1.0, p1 = t;
  for (int m = 1; m < n; ++m)
  {
    const double p2 = ((2.0 * m + 1.0) * t * p1 - m * p0) / (m + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

Poly2 scaled_integrated_legendre(int n, const Poly2& a, const Poly2& b)
{
  const std::vector<double> l = integrated_legendre_coefficients(n);
  const Poly2 diff = b - a, sum = a + b;
  Poly2 out;
  for (int j = 0; j <= n; ++j)
    if (l[j] != 0.0)
      out += diff.pow(j) * sum.pow(n - j) * l[j];
  return out;
}

} // namespace hdg
