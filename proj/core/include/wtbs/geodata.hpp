// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/geodata.hpp
 *
 * Site lists, population rasters, the area of interest and the local planar
 * frame every distance is measured in.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wtbs {

struct GeoPoint {
  double lat = 0.0; ///< degrees, [-90, 90]
  double lon = 0.0; ///< degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct PlanarPoint {
  double x = 0.0; ///< meters east of the frame origin
  double y = 0.0; ///< meters north of the frame origin

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

inline constexpr double kMetersPerDegreeLat = 111320.0;

/// Maximum latitude offset from the frame origin for which the equirectangular
/// approximation is considered accurate.
inline constexpr double kProjectionValidityDeg = 2.0;

/// Equirectangular tangent frame around `origin`.
struct LocalFrame {
  GeoPoint origin;
  double meters_per_deg_lat = kMetersPerDegreeLat;
  double meters_per_deg_lon = kMetersPerDegreeLat;

  static LocalFrame at(GeoPoint origin);
};

PlanarPoint project(GeoPoint p, const LocalFrame& frame) noexcept;
GeoPoint unproject(PlanarPoint p, const LocalFrame& frame) noexcept;

/// False when `p` lies beyond the small-area validity guard of `frame`.
bool within_projection_validity(GeoPoint p, const LocalFrame& frame) noexcept;

struct GridIndex {
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Bounding box discretized into square cells of `cell_size_m`. Row 0 is the
/// southernmost row, column 0 the westernmost; the planar frame is centred on
/// the box.
class AreaOfInterest {
public:
  AreaOfInterest() = default;
  AreaOfInterest(GeoPoint min, GeoPoint max, double cell_size_m);

  GeoPoint min() const noexcept { return min_; }
  GeoPoint max() const noexcept { return max_; }
  double cell_size_m() const noexcept { return cell_size_m_; }
  const LocalFrame& frame() const noexcept { return frame_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t cell_count() const noexcept { return rows_ * cols_; }
  double cell_area_km2() const noexcept { return cell_size_m_ * cell_size_m_ * 1e-6; }

  bool contains(GeoPoint p) const noexcept;
  PlanarPoint cell_center(std::size_t row, std::size_t col) const noexcept;
  GeoPoint cell_center_geo(std::size_t row, std::size_t col) const noexcept;
  /// Cell holding `p`, or nullopt when outside the grid.
  std::optional<GridIndex> locate(GeoPoint p) const noexcept;

  friend bool operator==(const AreaOfInterest& a, const AreaOfInterest& b) {
    return a.min_ == b.min_ && a.max_ == b.max_ && a.cell_size_m_ == b.cell_size_m_;
  }

private:
  GeoPoint min_;
  GeoPoint max_;
  double cell_size_m_ = 1.0;
  LocalFrame frame_;
  PlanarPoint south_west_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Population density (persons/km^2) on the AOI lattice, row-major.
struct PopulationGrid {
  AreaOfInterest aoi;
  std::vector<double> density;

  static PopulationGrid zeros(const AreaOfInterest& aoi);

  std::size_t rows() const noexcept { return aoi.rows(); }
  std::size_t cols() const noexcept { return aoi.cols(); }
  double at(std::size_t row, std::size_t col) const { return density[row * cols() + col]; }
  double& at(std::size_t row, std::size_t col) { return density[row * cols() + col]; }
  /// Persons living in one cell.
  double population(std::size_t index) const { return density[index] * aoi.cell_area_km2(); }
  double total_population() const;
};

struct PopulationParseResult {
  PopulationGrid grid;
  std::size_t skipped_outside = 0;
};

/// Parses `lat,lon,density` cell-center samples onto the AOI lattice.
PopulationParseResult parse_population(std::string_view text, const AreaOfInterest& aoi);
/// Writes every nonzero cell as a cell-center sample.
std::string serialize_population(const PopulationGrid& grid);

enum class Structure { CellTower, WindTurbine };
enum class Tech { G3, G4, Unequipped };

std::string_view to_string(Structure s) noexcept;
std::string_view to_string(Tech t) noexcept;

struct SiteRecord {
  std::string id;
  GeoPoint position;
  Structure structure = Structure::CellTower;
  Tech tech = Tech::G3;
  double height_m = 30.0;
  double tx_power_w = 10.0;
  std::optional<std::string> farm_id;

  bool equipped() const noexcept { return tech != Tech::Unequipped; }
  void validate() const;

  friend bool operator==(const SiteRecord&, const SiteRecord&) = default;
};

/// Height/power used when a site row leaves those fields empty.
struct SiteDefaults {
  double ct_height_m = 30.0;
  double ct_power_w = 10.0;
  double wt_height_m = 100.0;
  double wt_power_w = 11.0;

  friend bool operator==(const SiteDefaults&, const SiteDefaults&) = default;
};

/// Parses `id,lat,lon,structure,tech,height_m,power_w,farm_id`. Unknown
/// columns are ignored; height_m/power_w/farm_id columns may be absent.
std::vector<SiteRecord> parse_sites(std::string_view text, const SiteDefaults& defaults = {});
std::string serialize_sites(const std::vector<SiteRecord>& sites);

/// At most one equipped turbine per farm: the tallest survives, then the
/// lowest id; the others become Unequipped.
std::vector<SiteRecord> dedupe_farms(std::vector<SiteRecord> sites);

namespace csv {

/// One comma-separated record; double quotes group fields containing commas.
std::vector<std::string> split_line(std::string_view line);

/// Iterates physical lines, stripping a trailing CR. Calls `fn(line, lineno)`.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, lineno);
  }
}

double parse_double(std::string_view field, std::string_view what, std::size_t lineno);

} // namespace csv

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

} // namespace wtbs
