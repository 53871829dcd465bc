#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hdg/fespace.hpp"
#include "hdg/quadrature.hpp"

using namespace hdg;

namespace
{

const std::array<Point, 3> kRef{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};

double max_coeff(const Poly2& p, int deg)
{
  double m = 0.0;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      m = std::max(m, std::abs(p.coeff(a, b)));
  return m;
}

// Normal trace (outward, reference element) of v at parameter s on edge e.
double ref_normal_trace(const VecPoly2& v, int e, double s)
{
  const auto [a, b] = reference_edge_vertices(e);
  const Point& pa = kRef[a];
  const Point& pb = kRef[b];
  const Point& opp = kRef[e];
  double nx = pb[1] - pa[1], ny = pa[0] - pb[0];
  const double len = std::hypot(nx, ny);
  nx /= len;
  ny /= len;
  if ((pa[0] - opp[0]) * nx + (pa[1] - opp[1]) * ny < 0.0)
  {
    nx = -nx;
    ny = -ny;
  }
  const auto val = v(pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1]));
  return val[0] * nx + val[1] * ny;
}

double edge_length(int e)
{
  const auto [a, b] = reference_edge_vertices(e);
  return std::hypot(kRef[b][0] - kRef[a][0], kRef[b][1] - kRef[a][1]);
}

class BasisInvariants : public ::testing::TestWithParam<int>
{
};

} // namespace

TEST_P(BasisInvariants, GroupDimensions)
{
  const int k = GetParam();
  const auto rb = build_reference_bdm(k);
  EXPECT_EQ(static_cast<int>(rb.velocity.size()), (k + 1) * (k + 2));
  EXPECT_EQ(rb.num_facet(), 3 * (k + 1));
  EXPECT_EQ(rb.num_divfree_interior(), k * (k - 1) / 2);
  EXPECT_EQ(rb.num_psi(), k * (k + 1) / 2 - 1);
  EXPECT_EQ(static_cast<int>(rb.pressure.size()), rb.num_psi());
}

TEST_P(BasisInvariants, DivergenceStructure)
{
  const int k = GetParam();
  const auto rb = build_reference_bdm(k);
  for (int i = 0; i < 3; ++i)
  {
    const Poly2& d0 = rb.divergence[i * (k + 1)];
    EXPECT_NEAR(d0.coeff(0, 0), 2.0, 1e-12);
    EXPECT_LE(max_coeff(d0 - Poly2(2.0), k), 1e-12);
    for (int j = 1; j <= k; ++j)
      EXPECT_LE(max_coeff(rb.divergence[i * (k + 1) + j], k), 1e-12) << "facet bubble " << i << "," << j;
  }
  for (int j = 0; j < rb.num_divfree_interior(); ++j)
    EXPECT_LE(max_coeff(rb.divergence[rb.num_facet() + j], k), 1e-12);
  for (int j = 0; j < rb.num_psi(); ++j)
    EXPECT_LE(max_coeff(rb.divergence[rb.first_psi() + j] - rb.pressure[j], k), 1e-11);
}

TEST_P(BasisInvariants, PressureModesOrthonormalMeanZero)
{
  const int k = GetParam();
  const auto rb = build_reference_bdm(k);
  const auto rule = triangle_rule(2 * k);
  const int n = rb.num_psi();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (std::size_t q = 0; q < rule.points.size(); ++q)
  {
    const auto [x, y] = rule.points[q];
    for (int i = 0; i < n; ++i)
    {
      mean[i] += rule.weights[q] * rb.pressure[i](x, y);
      for (int j = 0; j < n; ++j)
        gram(i, j) += rule.weights[q] * rb.pressure[i](x, y) * rb.pressure[j](x, y);
    }
  }
  if (n > 0)
  {
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LE(mean.cwiseAbs().maxCoeff(), 1e-11);
  }
  // rank of the divergence map of the psi group
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.points.size(); ++q)
  {
    const auto [x, y] = rule.points[q];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d(i, j) += rule.weights[q] * rb.divergence[rb.first_psi() + j](x, y) * rb.pressure[i](x, y);
  }
  if (n > 0)
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(d).rank(), n);
}

TEST_P(BasisInvariants, NormalTraces)
{
  const int k = GetParam();
  const auto rb = build_reference_bdm(k);
  const auto gl = gauss_legendre(k + 2);
  for (int f = 0; f < rb.dim(); ++f)
  {
    const int owner = f < rb.num_facet() ? f / (k + 1) : -1;
    const int j = f < rb.num_facet() ? f % (k + 1) : -1;
    for (int e = 0; e < 3; ++e)
    {
      double integral = 0.0;
      double minv = 1e300, maxv = -1e300;
      for (std::size_t q = 0; q < gl.points.size(); ++q)
      {
        const double v = ref_normal_trace(rb.velocity[f], e, gl.points[q]);
        integral += gl.weights[q] * edge_length(e) * v;
        minv = std::min(minv, v);
        maxv = std::max(maxv, v);
      }
      if (e != owner)
      {
        EXPECT_LE(std::max(std::abs(minv), std::abs(maxv)), 1e-11) << "f=" << f << " e=" << e;
      }
      else if (j == 0)
      {
        EXPECT_NEAR(integral, 1.0, 1e-12);
        EXPECT_LE(maxv - minv, 1e-12);
      }
      else
      {
        EXPECT_LE(std::abs(integral), 1e-12);
        EXPECT_GT(maxv - minv, 1e-3);
      }
    }
  }
}

TEST_P(BasisInvariants, FacetBubbleTracesSpanMeanZeroPk)
{
  const int k = GetParam();
  const auto rb = build_reference_bdm(k);
  const auto gl = gauss_legendre(k + 1);
  for (int e = 0; e < 3; ++e)
  {
    // k bubble traces sampled at k+1 points together with the constant have rank k+1.
    Eigen::MatrixXd m(k + 1, k + 1);
    for (std::size_t q = 0; q <= static_cast<std::size_t>(k); ++q)
    {
      m(q, 0) = 1.0;
      for (int j = 1; j <= k; ++j)
        m(q, j) = ref_normal_trace(rb.velocity[e * (k + 1) + j], e, gl.points[q]);
    }
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank(), k + 1);
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, BasisInvariants, ::testing::Values(1, 2, 3, 4));

TEST(ReferenceBasis, DimensionExamples)
{
  EXPECT_EQ(build_reference_bdm(1).dim(), 6);
  EXPECT_EQ(build_reference_bdm(1).num_interior(), 0);
  const auto k2 = build_reference_bdm(2);
  EXPECT_EQ(k2.num_facet(), 9);
  EXPECT_EQ(k2.num_divfree_interior(), 1);
  EXPECT_EQ(k2.num_psi(), 2);
  const auto k3 = build_reference_bdm(3);
  EXPECT_EQ(k3.num_facet(), 12);
  EXPECT_EQ(k3.num_divfree_interior(), 3);
  EXPECT_EQ(k3.num_psi(), 5);
  EXPECT_THROW(build_reference_bdm(0), std::invalid_argument);
  EXPECT_THROW(build_reference_bdm(5), std::invalid_argument);
}

TEST(Piola, IdentityGeometryLeavesValuesUnchanged)
{
  Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
         {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}, {{0, 2}, BoundaryTag::wall}});
  const auto geo = element_geometry(m, 0);
  const auto tab = build_tables(2);
  const auto cv = cell_values(tab, geo);
  for (std::size_t q = 0; q < cv.weight.size(); ++q)
    for (int f = 0; f < tab.basis.dim(); ++f)
    {
      EXPECT_DOUBLE_EQ(cv.value[q][f][0], tab.cell_value[q][f][0]);
      EXPECT_DOUBLE_EQ(cv.value[q][f][1], tab.cell_value[q][f][1]);
    }
}

TEST(Piola, ScaledRt0Divergence)
{
  // RT0 function x - v0 on the scaled triangle: mapped field (x - s v0)/s^2, divergence 2/s^2.
  const double s = 0.25;
  Mesh m({{0, 0}, {s, 0}, {0, s}}, {{0, 1, 2}},
         {{{0, 1}, BoundaryTag::wall}, {{1, 2}, BoundaryTag::wall}, {{0, 2}, BoundaryTag::wall}});
  const auto geo = element_geometry(m, 0);
  const auto tab = build_tables(1);
  const auto cv = cell_values(tab, geo);
  for (std::size_t q = 0; q < cv.weight.size(); ++q)
  {
    EXPECT_NEAR(cv.div[q][0], 2.0 / (s * s), 1e-10);
    EXPECT_NEAR(cv.value[q][0][0], cv.point[q][0] / (s * s), 1e-10);
    EXPECT_NEAR(cv.value[q][0][1], cv.point[q][1] / (s * s), 1e-10);
  }
}

TEST(Piola, SharedEdgeNormalTracesAgree)
{
  // Two skewed elements sharing the edge (1,2).
  Mesh m({{0.0, 0.0}, {1.0, 0.1}, {0.2, 0.9}, {1.3, 1.1}}, {{0, 1, 2}, {1, 3, 2}},
         {{{0, 1}, BoundaryTag::wall},
          {{0, 2}, BoundaryTag::wall},
          {{1, 3}, BoundaryTag::wall},
          {{2, 3}, BoundaryTag::wall}});
  for (int k = 1; k <= 4; ++k)
  {
    const auto tab = build_tables(k);
    const auto sp = build_spaces(m, k);
    Index shared = -1;
    for (Index e = 0; e < m.num_edges(); ++e)
      if (!m.edge(e).on_boundary())
        shared = e;
    ASSERT_GE(shared, 0);
    auto traces = [&](Index t) {
      int li = 0;
      while (m.triangle_edges(t)[li] != shared)
        ++li;
      const auto ev = edge_values(tab, m, element_geometry(m, t), t, li);
      Eigen::MatrixXd nt = normal_traces(sp, ev, t, li);
      // order columns by the global edge parameter
      std::vector<int> order(ev.weight.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return ev.t_global[a] < ev.t_global[b]; });
      Eigen::MatrixXd out(nt.rows(), nt.cols());
      for (std::size_t i = 0; i < order.size(); ++i)
        out.col(i) = nt.col(order[i]);
      return out;
    };
    const Eigen::MatrixXd left = traces(0), right = traces(1);
    EXPECT_LE((left - right).cwiseAbs().maxCoeff(), 1e-13) << "k=" << k;
  }
}

TEST(Spaces, DofCountsUnitSquare2)
{
  const Mesh m = unit_square(2);
  const auto sp = build_spaces(m, 2);
  EXPECT_EQ(sp.n_bd, 48);
  EXPECT_EQ(sp.n_hat, 32);
  EXPECT_EQ(sp.n_int, 24);
  EXPECT_EQ(sp.n_pbar, 8);
  EXPECT_EQ(sp.n_pint, 16);
  EXPECT_TRUE(sp.enclosed);
  const auto sp1 = build_spaces(m, 1);
  EXPECT_EQ(sp1.n_int, 0);
  EXPECT_EQ(sp1.n_pint, 0);
}

TEST(Spaces, InteriorEdgeDofsSharedByTwoElements)
{
  const Mesh m = unit_square(3);
  const auto sp = build_spaces(m, 2);
  std::vector<int> count(sp.num_velocity(), 0);
  for (const auto& ed : sp.elements)
    for (Index d : ed.velocity)
      ++count[d];
  for (Index e = 0; e < m.num_edges(); ++e)
    for (int j = 0; j <= 2; ++j)
      EXPECT_EQ(count[sp.bd(e, j)], m.edge(e).on_boundary() ? 1 : 2);
  for (Index i = 0; i < sp.n_int; ++i)
    EXPECT_EQ(count[sp.n_bd + sp.n_hat + i], 1);
}

TEST(Spaces, PhysicalDivergenceIdentities)
{
  const Mesh m = step_domain(2);
  for (int k = 1; k <= 4; ++k)
  {
    const auto tab = build_tables(k);
    const auto& rb = tab.basis;
    for (Index t = 0; t < m.num_triangles(); t += 7)
    {
      const auto cv = cell_values(tab, element_geometry(m, t));
      for (int f = 0; f < rb.dim(); ++f)
      {
        double mean = 0.0, minv = 1e300, maxv = -1e300;
        for (std::size_t q = 0; q < cv.weight.size(); ++q)
        {
          mean += cv.weight[q] * cv.div[q][f];
          minv = std::min(minv, cv.div[q][f]);
          maxv = std::max(maxv, cv.div[q][f]);
        }
        const double scale = std::max(1.0, std::abs(maxv));
        if (f < rb.num_facet())
          EXPECT_LE((maxv - minv) / scale, 1e-11);
        else
          EXPECT_LE(std::abs(mean) / scale, 1e-11);
      }
    }
  }
}

TEST(Essential, CavityLidData)
{
  const Index n = 4;
  const Mesh m = unit_square(n);
  const auto tab = build_tables(2);
  const auto sp = build_spaces(m, 2);
  const auto data = interpolate_essential(sp, tab, [](double x, double, BoundaryTag tag) {
    if (tag != BoundaryTag::lid)
      return std::array<double, 2>{0.0, 0.0};
    return std::array<double, 2>{4.0 * x * (1.0 - x), 0.0};
  });
  ASSERT_TRUE(std::is_sorted(data.dofs.begin(), data.dofs.end()));
  for (std::size_t i = 0; i < data.dofs.size(); ++i)
  {
    const Index d = data.dofs[i];
    if (d < sp.n_bd)
    {
      EXPECT_NEAR(data.values[i], 0.0, 1e-14); // g.n = 0 everywhere on the boundary
      continue;
    }
    const Index e = (d - sp.n_bd) / 2;
    const int j = static_cast<int>((d - sp.n_bd) % 2);
    const Edge& edge = m.edge(e);
    if (edge.tag != BoundaryTag::lid)
    {
      EXPECT_EQ(data.values[i], 0.0);
      continue;
    }
    if (j == 0)
    {
      const double a = m.vertex(edge.vertices[0])[0], b = m.vertex(edge.vertices[1])[0];
      auto prim = [](double x) { return 2.0 * x * x - 4.0 * x * x * x / 3.0; };
      EXPECT_NEAR(data.values[i], (prim(b) - prim(a)) / edge.length, 1e-13);
    }
  }
}

TEST(Essential, CavityBoundaryFluxBalance)
{
  const Mesh m = unit_square(4);
  const auto tab = build_tables(3);
  const auto sp = build_spaces(m, 3);
  // A field with nonzero normal traces but zero net flux (divergence free).
  const auto data = interpolate_essential(sp, tab, [](double x, double y, BoundaryTag) {
    return std::array<double, 2>{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y) + 0.0};
  });
  double flux = 0.0;
  for (std::size_t i = 0; i < data.dofs.size(); ++i)
  {
    const Index d = data.dofs[i];
    if (d >= sp.n_bd || d % 4 != 0)
      continue;
    const Index e = d / 4;
    // RT0 coefficient is the flux through the edge along the global normal; turn it outward.
    const Edge& edge = m.edge(e);
    const double cx = 0.5 * (m.vertex(edge.vertices[0])[0] + m.vertex(edge.vertices[1])[0]);
    const double cy = 0.5 * (m.vertex(edge.vertices[0])[1] + m.vertex(edge.vertices[1])[1]);
    const double out = (cx - 0.5) * edge.normal[0] + (cy - 0.5) * edge.normal[1] > 0 ? 1.0 : -1.0;
    flux += out * data.values[i];
  }
  EXPECT_NEAR(flux, 0.0, 1e-13);
}
