#ifndef HDG_POLYNOMIAL_HPP
#define HDG_POLYNOMIAL_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace hdg
{

// Bivariate polynomial sum c(a,b) x^a y^b stored densely.
class Poly2
{
public:
  Poly2() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit Poly2(double constant) : c_(Eigen::MatrixXd::Constant(1, 1, constant)) {}

  static Poly2 monomial(int a, int b, double coeff = 1.0);
  static Poly2 x() { return monomial(1, 0); }
  static Poly2 y() { return monomial(0, 1); }

  int degree() const;
  double coeff(int a, int b) const;
  double operator()(double x, double y) const;

  Poly2 dx() const;
  Poly2 dy() const;

  Poly2& operator+=(const Poly2& o);
  Poly2& operator-=(const Poly2& o);
  Poly2& operator*=(double s);
  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  friend Poly2 operator*(Poly2 a, double s) { return a *= s; }
  friend Poly2 operator*(double s, Poly2 a) { return a *= s; }
  friend Poly2 operator*(const Poly2& a, const Poly2& b);

  Poly2 pow(int n) const;

private:
  void grow(int rows, int cols);
  Eigen::MatrixXd c_;
};

struct VecPoly2
{
  Poly2 x, y;

  std::array<double, 2> operator()(double px, double py) const { return {x(px, py), y(px, py)}; }
  Poly2 div() const { return x.dx() + y.dy(); }
  // Scalar curl (d_y s, -d_x s).
  static VecPoly2 curl(const Poly2& s) { return {s.dy(), s.dx() * -1.0}; }
};

// Monomial coefficients (ascending powers) of the Legendre polynomial P_n on [-1, 1].
std::vector<double> legendre_coefficients(int n);
// Integrated Legendre L_n(t) = int_{-1}^t P_{n-1}, n >= 2.
std::vector<double> integrated_legendre_coefficients(int n);
double legendre(int n, double t);

// Homogenized L_n((b - a)/(a + b)) (a + b)^n for barycentric polynomials a, b.
Poly2 scaled_integrated_legendre(int n, const Poly2& a, const Poly2& b);

} // namespace hdg

#endif // HDG_POLYNOMIAL_HPP
