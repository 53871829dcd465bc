#ifndef HDG_ASSEMBLY_HPP
#define HDG_ASSEMBLY_HPP

#include <vector>

#include <Eigen/Dense>

#include "hdg/fespace.hpp"
#include "hdg/linalg.hpp"
#include "hdg/mesh.hpp"

namespace hdg
{

struct ProblemParams
{
  double mu = 1.0;
  double tau = 0.0;
  double inv_lambda = 0.0; // 0 encodes lambda = infinity
  double alpha = 4.0;
  int k = 2;

  void validate() const;
};

class CoercivityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//
// Assembled saddle point system over the full DOF numbering of `Spaces`.
// Essential DOFs stay in A and B; the lifted right-hand side has them zeroed.
//
struct BlockSystem
{
  const Spaces* spaces = nullptr;
  ProblemParams params;
  SparseMatrix A; // velocity x velocity
  SparseMatrix B; // pressure x velocity
  SparseMatrix C; // pressure x pressure
  Vector load;    // (f, v) before lifting
  EssentialData essential;
  Vector lift;    // full velocity vector holding the essential values
  Vector rhs_u;   // load - A lift, zero on essential DOFs
  Vector rhs_p;   // -B lift
  std::vector<Index> free_velocity;
};

BlockSystem assemble_saddle(const Spaces& sp, const ReferenceTables& tab, const ProblemParams& params,
                            const EssentialData& essential, const VectorField& f = nullptr);

// Legendre coefficients (degree < k) of the L2 projection of sampled edge data.
Eigen::VectorXd facet_projection(const EdgeValues& ev, int k, const Eigen::VectorXd& samples);

// Per-element (div u, div v) over the interior velocity functions.
Eigen::MatrixXd element_divdiv_interior(const Spaces& sp, const ReferenceTables& tab, Index t);

// Matrix of tau||u||^2 + 2mu(||D(u)||^2 + sum_F |F|^-1 ||tang(u - u_hat)||^2_F).
SparseMatrix assemble_energy_norm(const Spaces& sp, const ReferenceTables& tab, const ProblemParams& params);

//
// Continuous vector P1 space on vertices not touching an essential edge.
// DOF 2*i + c is component c at free vertex `free_vertices[i]`.
//
struct AuxSpace
{
  std::vector<Index> free_vertices;
  std::vector<Index> vertex_index; // -1 for constrained vertices
  Index size() const { return 2 * static_cast<Index>(free_vertices.size()); }
};

AuxSpace build_aux_space(const Spaces& sp);
SparseMatrix assemble_aux(const Spaces& sp, const AuxSpace& aux, const ProblemParams& params);

struct PressureOps
{
  SparseMatrix M; // diag(|K|)
  SparseMatrix N; // (1/h_F) facet jumps, trace terms on outlet edges
};

PressureOps assemble_pressure_ops(const Spaces& sp);

} // namespace hdg

#endif // HDG_ASSEMBLY_HPP
