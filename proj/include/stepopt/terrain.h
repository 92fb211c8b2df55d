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

#ifndef STEPOPT_TERRAIN_H_
#define STEPOPT_TERRAIN_H_

// Height maps, footprint-averaged height queries and local plane fits.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stepopt/lip.h"

namespace stepopt {

// Regular grid of heights. Cell (r, c) is centered at
// origin + (c, r) * resolution, i.e. columns run along x and rows along y.
// NaN marks a cell with no data.
class HeightMap {
 public:
  // Throws InvalidInputError on resolution <= 0, an empty grid or infinite
  // heights.
  HeightMap(const Eigen::Vector2d& origin, double resolution,
            Eigen::MatrixXd grid);

  const Eigen::Vector2d& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int rows() const { return static_cast<int>(grid_.rows()); }
  int cols() const { return static_cast<int>(grid_.cols()); }
  const Eigen::MatrixXd& grid() const { return grid_; }

  bool present(int r, int c) const;
  double at(int r, int c) const { return grid_(r, c); }
  Eigen::Vector2d cell_center(int r, int c) const;

  HeightMap translated(const Eigen::Vector2d& offset) const;

 private:
  Eigen::Vector2d origin_;
  double resolution_;
  Eigen::MatrixXd grid_;
};

// Text format:
//   HMAP v1
//   origin_x origin_y resolution rows cols
//   <rows lines of cols heights, "nan" for missing>
// Throws ParseError naming the offending line.
HeightMap read_hmap(std::istream& is);
HeightMap load_hmap(const std::string& path);
void write_hmap(const HeightMap& map, std::ostream& os);
void save_hmap(const HeightMap& map, const std::string& path);

// Grid covering [x_min, x_max] x [y_min, y_max].
struct MapExtent {
  double x_min = -1.0;
  double x_max = 3.0;
  double y_min = -1.0;
  double y_max = 1.0;
  double resolution = 0.02;
};

HeightMap make_flat(const MapExtent& extent, double height = 0.0);
// Rises at `angle_deg` along the horizontal direction `heading_deg`
// (0 = +x), zero height through the origin.
HeightMap make_ramp(const MapExtent& extent, double angle_deg,
                    double heading_deg = 0.0);
// Flat until x = first_edge, then a staircase of `step_height` per
// `step_length` along +x.
HeightMap make_steps(const MapExtent& extent, double step_height,
                     double step_length, double first_edge = 0.5);
// Adds N(0, sigma^2) to every present cell.
HeightMap add_noise(const HeightMap& map, double sigma, std::uint64_t seed);

struct FootprintSample {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();  // of the present cells
  double height = 0.0;                                 // their mean height
  int present = 0;
  int total = 0;
};

// Cells whose centers lie in the axis-aligned square of half-width
// `half_width` around `center`. Throws NoDataError if no cell is present or
// fewer than `min_coverage` of them are.
FootprintSample sample_footprint(const HeightMap& map,
                                 const Eigen::Vector2d& center,
                                 double half_width,
                                 double min_coverage = 0.25);

double query_footprint_height(const HeightMap& map,
                              const Eigen::Vector2d& center,
                              double half_width, double min_coverage = 0.25);

// Least-squares plane z = alpha x + beta y + h0_anchor. Throws
// DegenerateFitError for fewer than 3 points or (nearly) collinear ones.
TerrainPlane fit_plane(const std::vector<Eigen::Vector3d>& points);

// Plane through the footprint heights at the support foot and the planned
// footholds, each placed at its footprint centroid.
TerrainPlane fit_plane(const HeightMap& map, const Foothold& support,
                       const std::vector<Foothold>& planned,
                       double half_width);

// Plane fitted to the individual cells of one footprint.
TerrainPlane fit_patch_plane(const HeightMap& map,
                             const Eigen::Vector2d& center, double half_width);

// Unit upward normal of the plane fitted to the cells of one footprint.
Eigen::Vector3d foot_normal(const HeightMap& map,
                            const Eigen::Vector2d& center, double half_width);

struct ReductionReport {
  double lateral_gradient = 0.0;     // slope across the heading
  double heading_deviation_deg = 0;  // vs steepest direction, in [0, 90]
  bool flagged = false;
};

// The planar model drops the lateral slope, which is only valid while the
// robot walks along the steepest direction (or the ground is flat).
ReductionReport check_reduction_validity(const TerrainPlane& plane,
                                         const Eigen::Vector2d& heading,
                                         double threshold_deg = 10.0);

}  // namespace stepopt

#endif  // STEPOPT_TERRAIN_H_
