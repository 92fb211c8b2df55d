// Copyright 2026 The stepopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "stepopt/errors.h"
#include "stepopt/terrain.h"

namespace stepopt {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double slope_deg(const TerrainPlane& p) {
  return std::atan(std::hypot(p.alpha, p.beta)) / kDeg;
}

Foothold at(double x, double y) {
  Foothold f;
  f.xy = {x, y};
  return f;
}

TEST(HeightMap, FlatFootprintIsConstant) {
  const HeightMap m = make_flat({}, 0.3);
  for (double x : {-0.5, 0.0, 0.77, 2.5}) {
    EXPECT_NEAR(query_footprint_height(m, {x, 0.1}, 0.09), 0.3, 1e-12);
  }
}

TEST(HeightMap, RampMatchesCellAverage) {
  const HeightMap m = make_ramp({}, 8.0, 30.0);
  const double s = std::tan(8.0 * kDeg);
  const Eigen::Vector2d dir(std::cos(30.0 * kDeg), std::sin(30.0 * kDeg));
  // Symmetric footprint on a linear surface: the mean is the center height.
  const Eigen::Vector2d c(0.4, 0.2);
  EXPECT_NEAR(query_footprint_height(m, c, 0.09), s * dir.dot(c), 1e-12);
}

TEST(HeightMap, MissingDataRaises) {
  MapExtent e;
  HeightMap flat = make_flat(e);
  Eigen::MatrixXd g = flat.grid();
  g.setConstant(std::numeric_limits<double>::quiet_NaN());
  const HeightMap empty(flat.origin(), flat.resolution(), g);
  EXPECT_THROW(query_footprint_height(empty, {0.0, 0.0}, 0.09), NoDataError);
  // Outside the grid.
  EXPECT_THROW(query_footprint_height(flat, {10.0, 0.0}, 0.09), NoDataError);
  // Partial coverage below the threshold.
  g = flat.grid();
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      if (flat.cell_center(r, c).x() > -0.07) {
        g(r, c) = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  const HeightMap sparse(flat.origin(), flat.resolution(), g);
  EXPECT_THROW(query_footprint_height(sparse, {0.0, 0.0}, 0.09), NoDataError);
  EXPECT_NO_THROW(query_footprint_height(sparse, {0.0, 0.0}, 0.09, 0.05));
}

TEST(HeightMap, RejectsBadConstruction) {
  EXPECT_THROW(HeightMap({0, 0}, 0.0, Eigen::MatrixXd::Zero(2, 2)),
               InvalidInputError);
  EXPECT_THROW(HeightMap({0, 0}, 0.1, Eigen::MatrixXd()), InvalidInputError);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
  g(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(HeightMap({0, 0}, 0.1, g), InvalidInputError);
}

TEST(HeightMap, TranslationMovesQueries) {
  const HeightMap m = make_ramp({}, 5.0);
  const HeightMap t = m.translated({0.3, -0.1});
  for (double x : {0.0, 0.5, 1.2}) {
    EXPECT_NEAR(query_footprint_height(t, {x + 0.3, -0.1}, 0.09),
                query_footprint_height(m, {x, 0.0}, 0.09), 1e-12);
  }
}

TEST(PlaneFit, ThreePointsExact) {
  const std::vector<Eigen::Vector3d> pts = {
      {0.0, 0.0, 1.0}, {1.0, 0.0, 1.2}, {0.0, 2.0, 0.6}};
  const TerrainPlane p = fit_plane(pts);
  EXPECT_NEAR(p.alpha, 0.2, 1e-12);
  EXPECT_NEAR(p.beta, -0.2, 1e-12);
  EXPECT_NEAR(p.h0_anchor, 1.0, 1e-12);
  for (const auto& q : pts) EXPECT_NEAR(p.height_at(q.head<2>()), q.z(), 1e-12);
}

TEST(PlaneFit, DegenerateInputs) {
  EXPECT_THROW(fit_plane({{0, 0, 0}, {1, 0, 0}}), DegenerateFitError);
  EXPECT_THROW(fit_plane({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}}),
               DegenerateFitError);
  EXPECT_THROW(fit_plane({{1, 1, 0}, {1, 1, 1}, {1, 1, 2}}),
               DegenerateFitError);
}

TEST(PlaneFit, NoiselessRampsExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.0, 15.0), head(0.0, 360.0),
      pos(-0.3, 2.0), lat(-0.3, 0.3);
  for (int i = 0; i < 50; ++i) {
    const double a = ang(rng), h = head(rng);
    const HeightMap m = make_ramp({}, a, h);
    const Foothold support = at(pos(rng), lat(rng));
    const std::vector<Foothold> planned = {
        at(support.xy.x() + 0.25, -support.xy.y() + 0.05),
        at(support.xy.x() + 0.5, support.xy.y())};
    const TerrainPlane p = fit_plane(m, support, planned, 0.09);
    EXPECT_NEAR(slope_deg(p), a, 1e-6);
    const double s = std::tan(a * kDeg);
    EXPECT_NEAR(p.alpha, s * std::cos(h * kDeg), 1e-9);
    EXPECT_NEAR(p.beta, s * std::sin(h * kDeg), 1e-9);
  }
}

TEST(PlaneFit, TenDegreeRampExact) {
  const HeightMap m = make_ramp({}, 10.0);
  const TerrainPlane p =
      fit_plane(m, at(0.0, 0.1), {at(0.3, -0.1), at(0.6, 0.1)}, 0.09);
  EXPECT_NEAR(slope_deg(p), 10.0, 1e-6);
  EXPECT_NEAR(p.h0_anchor, 0.0, 1e-9);
}

TEST(PlaneFit, NoisyRampAccuracy) {
  double slope_err = 0.0, height_err = 0.0;
  const int fits = 100;
  for (int i = 0; i < fits; ++i) {
    const double angle = 2.0 + 0.08 * i;
    const HeightMap truth = make_ramp({}, angle);
    const HeightMap m = add_noise(truth, 0.005, 1000 + i);
    const Foothold support = at(0.2 + 0.01 * i, 0.1);
    const TerrainPlane p = fit_plane(
        m, support, {at(support.xy.x() + 0.3, -0.1),
                     at(support.xy.x() + 0.6, 0.1)}, 0.09);
    slope_err += std::abs(slope_deg(p) - angle);
    height_err += std::abs(p.height_at(support.xy) -
                           std::tan(angle * kDeg) * support.xy.x());
  }
  EXPECT_LE(slope_err / fits, 1.5);
  EXPECT_LE(height_err / fits, 0.01);
}

TEST(PlaneFit, FootNormal) {
  EXPECT_NEAR((foot_normal(make_flat({}), {0.5, 0.0}, 0.09) -
               Eigen::Vector3d::UnitZ()).norm(), 0.0, 1e-12);
  const Eigen::Vector3d n = foot_normal(make_ramp({}, 10.0), {0.5, 0.0}, 0.09);
  EXPECT_NEAR(n.x(), -std::sin(10.0 * kDeg), 1e-12);
  EXPECT_NEAR(n.y(), 0.0, 1e-12);
  EXPECT_NEAR(n.norm(), 1.0, 1e-12);
}

TEST(Reduction, FlagsLateralSlope) {
  TerrainPlane along;
  along.alpha = std::tan(10.0 * kDeg);
  EXPECT_FALSE(check_reduction_validity(along, {1.0, 0.0}).flagged);
  EXPECT_NEAR(check_reduction_validity(along, {1.0, 0.0}).lateral_gradient, 0.0,
              1e-15);
  EXPECT_TRUE(check_reduction_validity(along, {0.0, 1.0}).flagged);
  const ReductionReport r =
      check_reduction_validity(along, {std::cos(30 * kDeg), std::sin(30 * kDeg)});
  EXPECT_NEAR(r.heading_deviation_deg, 30.0, 1e-9);
  EXPECT_TRUE(r.flagged);
  EXPECT_FALSE(check_reduction_validity(TerrainPlane{}, {0.0, 1.0}).flagged);
  EXPECT_THROW(check_reduction_validity(along, {0.0, 0.0}), InvalidInputError);
}

TEST(Hmap, RoundTrip) {
  HeightMap m = add_noise(make_ramp({0, 1, 0, 0.5, 0.1}, 3.0), 0.01, 3);
  Eigen::MatrixXd g = m.grid();
  g(1, 2) = std::numeric_limits<double>::quiet_NaN();
  m = HeightMap(m.origin(), m.resolution(), g);
  std::stringstream ss;
  write_hmap(m, ss);
  const HeightMap back = read_hmap(ss);
  ASSERT_EQ(back.rows(), m.rows());
  ASSERT_EQ(back.cols(), m.cols());
  EXPECT_EQ(back.origin(), m.origin());
  EXPECT_EQ(back.resolution(), m.resolution());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m.present(r, c)) {
        EXPECT_EQ(back.at(r, c), m.at(r, c));
      } else {
        EXPECT_FALSE(back.present(r, c));
      }
    }
  }
}

int parse_error_line(const std::string& text) {
  std::istringstream is(text);
  try {
    read_hmap(is);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Hmap, ParseErrorsNameTheLine) {
  EXPECT_EQ(parse_error_line(""), 1);
  EXPECT_EQ(parse_error_line("HMAP v2\n"), 1);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 2\n"), 2);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 -0.1 1 1\n0\n"), 2);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 2 2\n0 0\n0\n"), 4);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 2 2\n0 0\n0 abc\n"), 4);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 1 2\n0 inf\n"), 3);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 1 1\n0\n\n1\n"), 5);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 2 2\n0 0\n"), 4);
  EXPECT_EQ(parse_error_line("HMAP v1\n0 0 0.1 1 2\nnan 0.5\n"), 0);
}

}  // namespace
}  // namespace stepopt
