#ifndef HDG_PROBLEM_HPP
#define HDG_PROBLEM_HPP

#include <memory>
#include <string>
#include <string_view>

#include "hdg/assembly.hpp"
#include "hdg/condense.hpp"
#include "hdg/fespace.hpp"
#include "hdg/mesh.hpp"

namespace hdg
{

enum class ProblemKind
{
  cavity,
  step,
  elast_steady,
  elast_unsteady
};

std::string_view to_string(ProblemKind p);
ProblemKind parse_problem(std::string_view name);

// Elasticity runs reuse the cavity domain and boundary data.
Mesh make_mesh(ProblemKind p, Index inv_h);
BoundaryField boundary_data(ProblemKind p);

//
// Everything between the mesh and the condensed system, owned in one place so
// that the internal back-pointers stay valid.
//
struct Discretization
{
  Mesh mesh;
  ReferenceTables tables;
  Spaces spaces;
  EssentialData essential;
  BlockSystem block;
  CondensedSystem condensed;

  Discretization() = default;
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;
};

std::unique_ptr<Discretization> discretize(Mesh mesh, const BoundaryField& g, const ProblemParams& params,
                                           const VectorField& f = nullptr);
std::unique_ptr<Discretization> discretize(ProblemKind p, Index inv_h, const ProblemParams& params);

} // namespace hdg

#endif // HDG_PROBLEM_HPP
