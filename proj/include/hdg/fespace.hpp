#ifndef HDG_FESPACE_HPP
#define HDG_FESPACE_HPP

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hdg/linalg.hpp"
#include "hdg/mesh.hpp"
#include "hdg/polynomial.hpp"
#include "hdg/quadrature.hpp"

namespace hdg
{

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 4;

// Local endpoints (ascending) of reference edge i, the edge opposite vertex i.
std::array<int, 2> reference_edge_vertices(int i);

//
// Hierarchical BDM_k basis on the reference triangle (0,0),(1,0),(0,1).
// Local numbering: edge i owns functions i*(k+1) + j, j = 0 the lowest order
// Raviart-Thomas function, j >= 1 divergence-free facet bubbles of order j+1.
// Interior functions follow: divergence-free bubbles, then the psi functions
// whose divergences are the pressure modes.
//
struct ReferenceBasis
{
  int k = 0;
  std::vector<VecPoly2> velocity;
  std::vector<Poly2> divergence;
  // Mean-zero P^{k-1} modes, orthonormal in L2 of the reference triangle.
  std::vector<Poly2> pressure;

  int num_per_edge() const { return k + 1; }
  int num_facet() const { return 3 * (k + 1); }
  int num_divfree_interior() const { return k * (k - 1) / 2; }
  int num_psi() const { return k * (k + 1) / 2 - 1; }
  int num_interior() const { return k * k - 1; }
  int dim() const { return (k + 1) * (k + 2); }
  int first_psi() const { return num_facet() + num_divfree_interior(); }
};

ReferenceBasis build_reference_bdm(int k);

// Affine element map x = x0 + J xhat.
struct ElementGeometry
{
  Point origin{};
  Eigen::Matrix2d jac;
  Eigen::Matrix2d jac_inv;
  double det = 0.0;

  Point map(double xr, double yr) const;
};

ElementGeometry element_geometry(const Mesh& mesh, Index t);

// Contravariant Piola map of a reference value and gradient.
Eigen::Vector2d piola_value(const ElementGeometry& g, const Eigen::Vector2d& v);
Eigen::Matrix2d piola_gradient(const ElementGeometry& g, const Eigen::Matrix2d& grad);

//
// Reference values of the basis at the element and edge quadrature points.
// Gradients are stored as rows = components, columns = derivatives.
//
struct ReferenceTables
{
  ReferenceBasis basis;
  QuadratureRuleTriangle cell_rule;
  QuadratureRule1D edge_rule;
  // [q][f]
  std::vector<std::vector<Eigen::Vector2d>> cell_value;
  std::vector<std::vector<Eigen::Matrix2d>> cell_grad;
  std::vector<std::vector<double>> cell_div;
  std::vector<std::vector<double>> cell_pressure;
  // [edge][q][f], points parametrized from the first to the second local endpoint.
  std::array<std::vector<std::vector<Eigen::Vector2d>>, 3> edge_value;
  std::array<std::vector<std::vector<Eigen::Matrix2d>>, 3> edge_grad;
};

ReferenceTables build_tables(int k);

// Physical quantities at the element quadrature points.
struct CellValues
{
  std::vector<double> weight;  // physical quadrature weight
  std::vector<Point> point;
  std::vector<std::vector<Eigen::Vector2d>> value; // [q][f]
  std::vector<std::vector<Eigen::Matrix2d>> grad;
  std::vector<std::vector<double>> div;
  std::vector<std::vector<double>> pressure;
};

CellValues cell_values(const ReferenceTables& tab, const ElementGeometry& geo);

// Physical quantities at the quadrature points of local edge i.
struct EdgeValues
{
  std::vector<double> weight; // physical, sums to |F|
  std::vector<Point> point;
  std::vector<double> t_global; // in [-1, 1], from the lower to the higher global vertex
  Eigen::Vector2d normal;       // outward for this element
  Eigen::Vector2d tangent;      // global edge tangent
  std::vector<std::vector<Eigen::Vector2d>> value; // [q][f]
  std::vector<std::vector<Eigen::Matrix2d>> grad;
};

EdgeValues edge_values(const ReferenceTables& tab, const Mesh& mesh, const ElementGeometry& geo, Index t,
                       int local_edge);

//
// Global numbering. Velocity: u_bd (edge-wise, k+1 per edge), then u_hat (k per
// edge), then u_int (k^2-1 per element). Pressure: p_bar (one per element), then
// p_int (k(k+1)/2-1 per element).
//
struct ElementDofs
{
  std::vector<Index> velocity; // facet functions then interior, local basis order
  std::vector<double> sign;    // orientation of each velocity function
  std::vector<Index> facet;    // u_hat, 3k entries edge by edge
  std::vector<Index> pressure; // p_bar then p_int
};

struct Spaces
{
  const Mesh* mesh = nullptr;
  int k = 0;
  Index n_bd = 0, n_hat = 0, n_int = 0, n_pbar = 0, n_pint = 0;
  std::vector<ElementDofs> elements;
  std::vector<char> essential_edge;   // per edge
  std::vector<char> essential;        // per velocity DOF
  bool enclosed = false;              // every boundary edge essential

  Index num_velocity() const { return n_bd + n_hat + n_int; }
  Index num_pressure() const { return n_pbar + n_pint; }
  Index bd(Index e, int j) const { return e * (k + 1) + j; }
  Index hat(Index e, int j) const { return n_bd + e * k + j; }
  Index interior(Index t, int j) const { return n_bd + n_hat + t * (k * k - 1) + j; }
  Index pbar(Index t) const { return t; }
  Index pint(Index t, int j) const { return n_pbar + t * (k * (k + 1) / 2 - 1) + j; }
};

// Boundary tags whose edges carry essential velocity data.
bool is_essential(BoundaryTag tag);

Spaces build_spaces(const Mesh& mesh, int k);

// Normal traces (global normal) of the k+1 facet functions of edge e at the
// quadrature points of `ev`, evaluated from element t. Rows = functions.
Eigen::MatrixXd normal_traces(const Spaces& sp, const EdgeValues& ev, Index t, int local_edge);

using VectorField = std::function<std::array<double, 2>(double, double)>;
// Dirichlet data evaluated on an edge carrying the given tag.
using BoundaryField = std::function<std::array<double, 2>(double, double, BoundaryTag)>;

struct EssentialData
{
  std::vector<Index> dofs; // ascending
  Vector values;
};

// L2 projection of g onto the essential facet DOFs (normal traces onto P^k(F),
// tangential traces onto the facet space).
EssentialData interpolate_essential(const Spaces& sp, const ReferenceTables& tab, const BoundaryField& g);

} // namespace hdg

#endif // HDG_FESPACE_HPP
