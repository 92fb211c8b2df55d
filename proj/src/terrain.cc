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

#include "stepopt/terrain.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "stepopt/errors.h"

namespace stepopt {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, int line) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("HMAP: bad number '" + tok + "'", line);
  }
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

HeightMap make_map(const MapExtent& e,
                   const std::function<double(const Eigen::Vector2d&)>& f) {
  if (!(e.resolution > 0.0) || !(e.x_max >= e.x_min) || !(e.y_max >= e.y_min)) {
    throw InvalidInputError("map extent: bad bounds");
  }
  const int cols =
      static_cast<int>(std::floor((e.x_max - e.x_min) / e.resolution + 1e-9)) +
      1;
  const int rows =
      static_cast<int>(std::floor((e.y_max - e.y_min) / e.resolution + 1e-9)) +
      1;
  const Eigen::Vector2d origin(e.x_min, e.y_min);
  Eigen::MatrixXd grid(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      grid(r, c) = f(origin + e.resolution * Eigen::Vector2d(c, r));
    }
  }
  return HeightMap(origin, e.resolution, std::move(grid));
}

}  // namespace

HeightMap::HeightMap(const Eigen::Vector2d& origin, double resolution,
                     Eigen::MatrixXd grid)
    : origin_(origin), resolution_(resolution), grid_(std::move(grid)) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw InvalidInputError("height map: resolution must be positive");
  }
  if (!origin.allFinite()) {
    throw InvalidInputError("height map: origin must be finite");
  }
  if (grid_.size() == 0) throw InvalidInputError("height map: empty grid");
  for (Eigen::Index i = 0; i < grid_.size(); ++i) {
    if (std::isinf(grid_.data()[i])) {
      throw InvalidInputError("height map: infinite height");
    }
  }
}

bool HeightMap::present(int r, int c) const {
  return r >= 0 && c >= 0 && r < rows() && c < cols() &&
         !std::isnan(grid_(r, c));
}

Eigen::Vector2d HeightMap::cell_center(int r, int c) const {
  return origin_ + resolution_ * Eigen::Vector2d(c, r);
}

HeightMap HeightMap::translated(const Eigen::Vector2d& offset) const {
  return HeightMap(origin_ + offset, resolution_, grid_);
}

HeightMap read_hmap(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw ParseError("HMAP: empty input", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "HMAP v1") throw ParseError("HMAP: expected 'HMAP v1'", 1);

  line_no = 2;
  if (!std::getline(is, line)) throw ParseError("HMAP: missing header", 2);
  const auto head = split_ws(line);
  if (head.size() != 5) {
    throw ParseError("HMAP: header needs origin_x origin_y resolution rows cols",
                     2);
  }
  const double ox = parse_number(head[0], 2);
  const double oy = parse_number(head[1], 2);
  const double res = parse_number(head[2], 2);
  const double rows_d = parse_number(head[3], 2);
  const double cols_d = parse_number(head[4], 2);
  if (!std::isfinite(ox) || !std::isfinite(oy) || !(res > 0.0) ||
      !std::isfinite(res)) {
    throw ParseError("HMAP: bad origin or resolution", 2);
  }
  if (!(rows_d >= 1) || !(cols_d >= 1) || rows_d != std::floor(rows_d) ||
      cols_d != std::floor(cols_d) || rows_d * cols_d > 1e8) {
    throw ParseError("HMAP: bad grid size", 2);
  }
  const int rows = static_cast<int>(rows_d);
  const int cols = static_cast<int>(cols_d);

  Eigen::MatrixXd grid(rows, cols);
  for (int r = 0; r < rows; ++r) {
    line_no = 3 + r;
    if (!std::getline(is, line)) {
      throw ParseError("HMAP: missing grid row", line_no);
    }
    const auto toks = split_ws(line);
    if (static_cast<int>(toks.size()) != cols) {
      throw ParseError("HMAP: expected " + std::to_string(cols) + " values",
                       line_no);
    }
    for (int c = 0; c < cols; ++c) {
      double v;
      if (toks[c] == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else {
        v = parse_number(toks[c], line_no);
        if (!std::isfinite(v)) {
          throw ParseError("HMAP: non-finite height", line_no);
        }
      }
      grid(r, c) = v;
    }
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!split_ws(line).empty()) {
      throw ParseError("HMAP: trailing data", line_no);
    }
  }
  return HeightMap(Eigen::Vector2d(ox, oy), res, std::move(grid));
}

HeightMap load_hmap(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open height map '" + path + "'");
  return read_hmap(f);
}

void write_hmap(const HeightMap& map, std::ostream& os) {
  os << "HMAP v1\n"
     << format_number(map.origin().x()) << ' '
     << format_number(map.origin().y()) << ' '
     << format_number(map.resolution()) << ' ' << map.rows() << ' '
     << map.cols() << '\n';
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (c) os << ' ';
      os << format_number(map.at(r, c));
    }
    os << '\n';
  }
}

void save_hmap(const HeightMap& map, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInputError("cannot write height map '" + path + "'");
  write_hmap(map, f);
}

HeightMap make_flat(const MapExtent& extent, double height) {
  return make_map(extent, [&](const Eigen::Vector2d&) { return height; });
}

HeightMap make_ramp(const MapExtent& extent, double angle_deg,
                    double heading_deg) {
  const double slope = std::tan(angle_deg * kDegToRad);
  const Eigen::Vector2d dir(std::cos(heading_deg * kDegToRad),
                            std::sin(heading_deg * kDegToRad));
  return make_map(extent,
                  [&](const Eigen::Vector2d& p) { return slope * dir.dot(p); });
}

HeightMap make_steps(const MapExtent& extent, double step_height,
                     double step_length, double first_edge) {
  if (!(step_length > 0.0)) {
    throw InvalidInputError("make_steps: step length must be positive");
  }
  return make_map(extent, [&](const Eigen::Vector2d& p) {
    if (p.x() < first_edge) return 0.0;
    return step_height * (1.0 + std::floor((p.x() - first_edge) / step_length));
  });
}

HeightMap add_noise(const HeightMap& map, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidInputError("add_noise: negative sigma");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Eigen::MatrixXd grid = map.grid();
  for (int r = 0; r < map.rows(); ++r) {
    for (int c = 0; c < map.cols(); ++c) {
      if (map.present(r, c)) grid(r, c) += noise(rng);
    }
  }
  return HeightMap(map.origin(), map.resolution(), std::move(grid));
}

FootprintSample sample_footprint(const HeightMap& map,
                                 const Eigen::Vector2d& center,
                                 double half_width, double min_coverage) {
  if (!(half_width > 0.0) || !center.allFinite()) {
    throw InvalidInputError("footprint: half-width must be positive");
  }
  const double res = map.resolution();
  const Eigen::Vector2d lo = (center.array() - half_width - map.origin().array()) / res;
  const Eigen::Vector2d hi = (center.array() + half_width - map.origin().array()) / res;
  // Small tolerance so cells exactly on the edge count.
  const int c0 = static_cast<int>(std::ceil(lo.x() - 1e-9));
  const int c1 = static_cast<int>(std::floor(hi.x() + 1e-9));
  const int r0 = static_cast<int>(std::ceil(lo.y() - 1e-9));
  const int r1 = static_cast<int>(std::floor(hi.y() + 1e-9));
  FootprintSample s;
  s.total = std::max(0, c1 - c0 + 1) * std::max(0, r1 - r0 + 1);
  double sum = 0.0;
  Eigen::Vector2d csum = Eigen::Vector2d::Zero();
  for (int r = std::max(r0, 0); r <= std::min(r1, map.rows() - 1); ++r) {
    for (int c = std::max(c0, 0); c <= std::min(c1, map.cols() - 1); ++c) {
      if (!map.present(r, c)) continue;
      ++s.present;
      sum += map.at(r, c);
      csum += map.cell_center(r, c);
    }
  }
  if (s.present == 0) throw NoDataError("footprint: no height data");
  if (s.present < min_coverage * s.total) {
    throw NoDataError("footprint: coverage below threshold");
  }
  s.height = sum / s.present;
  s.centroid = csum / s.present;
  return s;
}

double query_footprint_height(const HeightMap& map,
                              const Eigen::Vector2d& center, double half_width,
                              double min_coverage) {
  return sample_footprint(map, center, half_width, min_coverage).height;
}

TerrainPlane fit_plane(const std::vector<Eigen::Vector3d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw DegenerateFitError("fit_plane: fewer than 3 points");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= n;
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = points[i].x() - mean.x();
    a(i, 1) = points[i].y() - mean.y();
    b(i) = points[i].z() - mean.z();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 1e-9) || sv(1) < 1e-6 * sv(0)) {
    throw DegenerateFitError("fit_plane: points are collinear");
  }
  const Eigen::Vector2d ab = svd.solve(b);
  TerrainPlane plane;
  plane.alpha = ab.x();
  plane.beta = ab.y();
  plane.h0_anchor = mean.z() - ab.x() * mean.x() - ab.y() * mean.y();
  return plane;
}

TerrainPlane fit_plane(const HeightMap& map, const Foothold& support,
                       const std::vector<Foothold>& planned,
                       double half_width) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(planned.size() + 1);
  auto add = [&](const Foothold& f) {
    const FootprintSample s = sample_footprint(map, f.xy, half_width);
    pts.emplace_back(s.centroid.x(), s.centroid.y(), s.height);
  };
  add(support);
  for (const auto& f : planned) add(f);
  return fit_plane(pts);
}

TerrainPlane fit_patch_plane(const HeightMap& map,
                             const Eigen::Vector2d& center,
                             double half_width) {
  // Validates coverage the same way as a height query.
  sample_footprint(map, center, half_width);
  const double res = map.resolution();
  const int c0 = static_cast<int>(
      std::ceil((center.x() - half_width - map.origin().x()) / res - 1e-9));
  const int c1 = static_cast<int>(
      std::floor((center.x() + half_width - map.origin().x()) / res + 1e-9));
  const int r0 = static_cast<int>(
      std::ceil((center.y() - half_width - map.origin().y()) / res - 1e-9));
  const int r1 = static_cast<int>(
      std::floor((center.y() + half_width - map.origin().y()) / res + 1e-9));
  std::vector<Eigen::Vector3d> pts;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!map.present(r, c)) continue;
      const Eigen::Vector2d p = map.cell_center(r, c);
      pts.emplace_back(p.x(), p.y(), map.at(r, c));
    }
  }
  return fit_plane(pts);
}

Eigen::Vector3d foot_normal(const HeightMap& map,
                            const Eigen::Vector2d& center, double half_width) {
  const TerrainPlane plane = fit_patch_plane(map, center, half_width);
  return Eigen::Vector3d(-plane.alpha, -plane.beta, 1.0).normalized();
}

ReductionReport check_reduction_validity(const TerrainPlane& plane,
                                         const Eigen::Vector2d& heading,
                                         double threshold_deg) {
  if (!(heading.norm() > 0.0) || !heading.allFinite()) {
    throw InvalidInputError("check_reduction_validity: zero heading");
  }
  const Eigen::Vector2d h = heading.normalized();
  const Eigen::Vector2d g(plane.alpha, plane.beta);
  ReductionReport rep;
  rep.lateral_gradient = std::abs(-h.y() * g.x() + h.x() * g.y());
  const double gn = g.norm();
  if (gn <= 1e-12) return rep;
  const double along = std::abs(h.dot(g));
  rep.heading_deviation_deg = std::atan2(rep.lateral_gradient, along) / kDegToRad;
  rep.flagged = rep.heading_deviation_deg > threshold_deg;
  return rep;
}

}  // namespace stepopt
