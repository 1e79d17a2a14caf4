#include <gtest/gtest.h>

#include <cmath>

#include "qpml/geometry.hpp"
#include "qpml/numerics.hpp"

using namespace qpml;

namespace {

// Area of one period of 0.2·sin(2πx)cos(2πy) by tensor Gauss–Legendre,
// with the derivatives written out by hand.
double reference_area(int nodes) {
  auto [x, w] = gauss_legendre(nodes, -0.5, 0.5);
  double a = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const double gx = 0.4 * pi * std::cos(2 * pi * x[i]) * std::cos(2 * pi * x[j]);
      const double gy = -0.4 * pi * std::sin(2 * pi * x[i]) * std::sin(2 * pi * x[j]);
      a += w[i] * w[j] * std::sqrt(1.0 + gx * gx + gy * gy);
    }
  return a;
}

StackConfig table1_stack(int interfaces) {
  StackConfig c;
  for (int i = 0; i < interfaces; ++i) c.interfaces.push_back(Surface::sincos(0.2, -i));
  for (int j = 0; j <= interfaces; ++j) c.k.push_back(j % 2 ? 20.0 : 10.0);
  c.N = 16 * 16;
  c.M_w = c.M = 8 * 8;
  c.P = 200;
  c.K = 3;
  return c;
}

}  // namespace

TEST(Surface, SincosMatchesClosedForm) {
  const Surface s = Surface::sincos(0.2, -1.0);
  for (double x : {-0.4, 0.0, 0.13, 0.37})
    for (double y : {-0.21, 0.0, 0.44}) {
      const auto h = s.sample(x, y, 1.0);
      EXPECT_NEAR(h.g, 0.2 * std::sin(2 * pi * x) * std::cos(2 * pi * y) - 1.0, 1e-15);
      EXPECT_NEAR(h.gx, 0.4 * pi * std::cos(2 * pi * x) * std::cos(2 * pi * y), 1e-14);
      EXPECT_NEAR(h.gy, -0.4 * pi * std::sin(2 * pi * x) * std::sin(2 * pi * y), 1e-14);
    }
}

TEST(Surface, HeightDifferenceKeepsRelativeAccuracy) {
  const Surface s = Surface::sincos(0.2, 0.0);
  const double x0 = 0.1, y0 = 0.2, dx = 1e-9;
  const double exact = -0.2 * 2 * pi * std::cos(2 * pi * x0) * std::cos(2 * pi * y0) * dx;
  EXPECT_NEAR(s.height_difference(x0, y0, x0 + dx, y0, 1.0) / exact, 1.0, 1e-6);
}

TEST(Surface, ExtremesOfSincos) {
  const Surface s = Surface::sincos(0.2, -2.0);
  EXPECT_NEAR(s.max_height(1.0), -1.8, 1e-12);
  EXPECT_NEAR(s.min_height(1.0), -2.2, 1e-12);
}

TEST(SurfaceGrid, NormalsAreUnitAndOrthogonalToTangents) {
  const SurfaceGrid g = build_surface(Surface::sincos(0.2, 0.0), 24, 1.0);
  for (int i = 0; i < g.size(); ++i) {
    const Vec3 rx(1.0, 0.0, g.gx[i]), ry(0.0, 1.0, g.gy[i]);
    EXPECT_NEAR(g.normals[i].norm(), 1.0, 1e-14);
    EXPECT_NEAR(g.normals[i].dot(rx), 0.0, 1e-12);
    EXPECT_NEAR(g.normals[i].dot(ry), 0.0, 1e-12);
    EXPECT_GT(g.normals[i].z(), 0.0);
  }
}

TEST(SurfaceGrid, NormalAtQuarterPeriodIsVertical) {
  const SurfaceGrid g = build_surface(Surface::sincos(0.2, 0.0), 8, 1.0);
  // x = −0.5 + 6/8 = 0.25, y = −0.5 + 4/8 = 0
  const int idx = g.index(4, 6);
  EXPECT_DOUBLE_EQ(g.nodes[idx].x(), 0.25);
  EXPECT_DOUBLE_EQ(g.nodes[idx].y(), 0.0);
  EXPECT_NEAR((g.normals[idx] - Vec3::UnitZ()).norm(), 0.0, 1e-15);
}

TEST(SurfaceGrid, FlatWeightsAreUniform) {
  const SurfaceGrid g = build_surface(Surface::flat(0.3), 8, 1.0);
  for (double w : g.w) EXPECT_DOUBLE_EQ(w, 1.0 / 64.0);
}

TEST(SurfaceGrid, WeightSumConvergesToArea) {
  const double ref = reference_area(160);
  EXPECT_NEAR(ref, reference_area(200), 1e-13);
  double prev = 1.0;
  for (int n : {8, 16, 32, 64}) {
    const SurfaceGrid g = build_surface(Surface::sincos(0.2, 0.0), n, 1.0);
    double sum = 0.0;
    for (double w : g.w) sum += w;
    const double err = std::abs(sum - ref);
    EXPECT_LE(err, prev);
    prev = err;
    if (n >= 32) {
      EXPECT_LT(err, 1e-10);
    }
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(Walls, PairsAreExactTranslates) {
  const StackConfig c = table1_stack(2);
  const WallGrids w = build_walls(c);
  ASSERT_EQ(w.layers.size(), 3u);
  for (const auto& lw : w.layers) {
    ASSERT_EQ(lw.L.size(), static_cast<std::size_t>(c.M_w));
    for (std::size_t m = 0; m < lw.L.size(); ++m) {
      EXPECT_EQ(lw.R[m] - lw.L[m], Vec3(1.0, 0.0, 0.0));
      EXPECT_EQ(lw.F[m] - lw.B[m], Vec3(0.0, 1.0, 0.0));
    }
  }
}

TEST(Walls, RadiationPlanesAreUniformGrids) {
  StackConfig c = table1_stack(1);
  c.M = 4;
  c.z_u = 0.5;
  const WallGrids w = build_walls(c);
  ASSERT_EQ(w.U.size(), 4u);
  for (const auto& p : w.U) EXPECT_EQ(p.z(), 0.5);
  EXPECT_EQ(w.U[0], Vec3(-0.25, -0.25, 0.5));
  EXPECT_EQ(w.U[3], Vec3(0.25, 0.25, 0.5));
}

TEST(Walls, MiddleLayerSpansNeighbouringInterfaces) {
  const StackConfig c = table1_stack(3);
  const auto [lo, hi] = layer_extent(c, 2);
  EXPECT_LE(lo, c.interfaces[2].min_height(1.0));
  EXPECT_GE(hi, c.interfaces[1].max_height(1.0));
  EXPECT_NEAR(lo, -2.2 - 0.1, 1e-12);
  EXPECT_NEAR(hi, -0.8 + 0.1, 1e-12);
}

TEST(Proxy, OctahedronLikeGrid) {
  const ProxyGrid pg = build_proxy_sphere(Vec3(0.1, -0.2, 0.3), 1.5, 2, 3);
  ASSERT_EQ(pg.size(), 6);
  for (int p = 0; p < pg.size(); ++p) {
    EXPECT_NEAR((pg.points[p] - pg.center).norm(), 1.5, 1e-14);
    EXPECT_NEAR((pg.points[p] - pg.center - 1.5 * pg.normals[p]).norm(), 0.0, 1e-14);
  }
}

TEST(Proxy, DefaultSphereEnclosesCellCorners) {
  StackConfig c = table1_stack(3);
  c.P = 2380;
  for (int j = 0; j <= 3; ++j) {
    const ProxyGrid pg = build_proxy_sphere(c, j);
    EXPECT_EQ(pg.size(), 2380);
    const auto [lo, hi] = layer_extent(c, j);
    EXPECT_NEAR(pg.center.z(), 0.5 * (lo + hi), 1e-15);
    EXPECT_EQ(pg.center.x(), 0.0);
    EXPECT_EQ(pg.center.y(), 0.0);
    for (double x : {-0.5, 0.5})
      for (double y : {-0.5, 0.5})
        for (double z : {lo, hi}) EXPECT_LT((Vec3(x, y, z) - pg.center).norm(), 1.5);
    for (const auto& p : pg.points) EXPECT_NEAR(std::abs((p - pg.center).norm() - 1.5), 0.0, 1e-14);
  }
}

TEST(Proxy, CountFactorization) {
  for (int P : {6, 300, 1740, 2380, 3120}) {
    const auto [nt, np] = factor_proxy_count(P);
    EXPECT_EQ(nt * np, P);
    EXPECT_GE(np, nt);
  }
}

TEST(StackConfig, RejectsInvalidInput) {
  StackConfig good = table1_stack(2);
  EXPECT_NO_THROW(good.validate());

  StackConfig c = good;
  c.k[1] = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = good;
  c.k.pop_back();
  EXPECT_THROW(c.validate(), ConfigError);
  c = good;
  c.phi_inc = 0.3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = good;
  c.N = 200;
  EXPECT_THROW(c.validate(), ConfigError);
  c = good;
  c.interfaces[1] = Surface::sincos(0.9, -1.0);  // crest at −0.1 above the trough of Γ_0
  EXPECT_THROW(c.validate(), ConfigError);
  c = good;
  c.K = 10;
  c.M = 100;  // 200 radiation rows for 441 orders
  EXPECT_THROW(c.validate(), ConfigError);
  c.M = 400;
  EXPECT_NO_THROW(c.validate());
}
