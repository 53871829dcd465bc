#include "hdg/problem.hpp"

#include <stdexcept>

namespace hdg
{

std::string_view to_string(ProblemKind p)
{
  switch (p)
  {
    case ProblemKind::cavity:
      return "cavity";
    case ProblemKind::step:
      return "step";
    case ProblemKind::elast_steady:
      return "elast-steady";
    case ProblemKind::elast_unsteady:
      return "elast-unsteady";
  }
  return "cavity";
}

ProblemKind parse_problem(std::string_view name)
{
  for (auto p : {ProblemKind::cavity, ProblemKind::step, ProblemKind::elast_steady, ProblemKind::elast_unsteady})
    if (to_string(p) == name)
      return p;
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

Mesh make_mesh(ProblemKind p, Index inv_h)
{
  return p == ProblemKind::step ? step_domain(inv_h) : unit_square(inv_h);
}

BoundaryField boundary_data(ProblemKind p)
{
  if (p == ProblemKind::step)
    return [](double, double y, BoundaryTag tag) {
      if (tag == BoundaryTag::inlet)
        return std::array<double, 2>{16.0 * (1.0 - y) * (y - 0.5), 0.0};
      return std::array<double, 2>{0.0, 0.0};
    };
  return [](double x, double, BoundaryTag tag) {
    if (tag == BoundaryTag::lid)
      return std::array<double, 2>{4.0 * x * (1.0 - x), 0.0};
    return std::array<double, 2>{0.0, 0.0};
  };
}

std::unique_ptr<Discretization> discretize(Mesh mesh, const BoundaryField& g, const ProblemParams& params,
                                           const VectorField& f)
{
  params.validate();
  auto d = std::make_unique<Discretization>();
  d->mesh = std::move(mesh);
  d->tables = build_tables(params.k);
  d->spaces = build_spaces(d->mesh, params.k);
  d->essential = interpolate_essential(d->spaces, d->tables, g);
  d->block = assemble_saddle(d->spaces, d->tables, params, d->essential, f);
  d->condensed = eliminate_local(d->block);
  return d;
}

std::unique_ptr<Discretization> discretize(ProblemKind p, Index inv_h, const ProblemParams& params)
{
  return discretize(make_mesh(p, inv_h), boundary_data(p), params);
}

} // namespace hdg
