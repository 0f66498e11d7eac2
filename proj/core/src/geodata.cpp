// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/geodata.hpp"

#include "wtbs/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wtbs {

namespace {

bool valid_geo(GeoPoint p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

/// Header name -> column index.
std::map<std::string, std::size_t> index_header(std::string_view line) {
  std::map<std::string, std::size_t> cols;
  const auto fields = csv::split_line(line);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto name = fields[i];
    // UTF-8 byte order mark on the first column.
    if (i == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    cols.emplace(name, i);
  }
  return cols;
}

std::size_t require_column(const std::map<std::string, std::size_t>& cols, const std::string& name) {
  const auto it = cols.find(name);
  if (it == cols.end()) throw ParseError("missing column '" + name + "' in header", 1);
  return it->second;
}

std::string_view field_at(const std::vector<std::string>& fields, std::optional<std::size_t> idx) {
  if (!idx || *idx >= fields.size()) return {};
  return fields[*idx];
}

} // namespace

// --- frame -------------------------------------------------------------------

LocalFrame LocalFrame::at(GeoPoint origin) {
  LocalFrame f;
  f.origin = origin;
  f.meters_per_deg_lat = kMetersPerDegreeLat;
  f.meters_per_deg_lon = kMetersPerDegreeLat * std::cos(origin.lat * std::numbers::pi / 180.0);
  return f;
}

PlanarPoint project(GeoPoint p, const LocalFrame& frame) noexcept {
  return {(p.lon - frame.origin.lon) * frame.meters_per_deg_lon,
          (p.lat - frame.origin.lat) * frame.meters_per_deg_lat};
}

GeoPoint unproject(PlanarPoint p, const LocalFrame& frame) noexcept {
  return {frame.origin.lat + p.y / frame.meters_per_deg_lat,
          frame.origin.lon + p.x / frame.meters_per_deg_lon};
}

bool within_projection_validity(GeoPoint p, const LocalFrame& frame) noexcept {
  return std::abs(p.lat - frame.origin.lat) < kProjectionValidityDeg;
}

// --- area of interest --------------------------------------------------------

AreaOfInterest::AreaOfInterest(GeoPoint min, GeoPoint max, double cell_size_m)
    : min_(min), max_(max), cell_size_m_(cell_size_m) {
  if (!valid_geo(min) || !valid_geo(max)) throw ConfigError("bbox corner out of range");
  if (!(min.lat < max.lat) || !(min.lon < max.lon))
    throw ConfigError("bbox min must be below max in both lat and lon");
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) throw ConfigError("cell_size_m must be > 0");
  frame_ = LocalFrame::at({(min.lat + max.lat) / 2.0, (min.lon + max.lon) / 2.0});
  south_west_ = project(min, frame_);
  const PlanarPoint north_east = project(max, frame_);
  const auto count = [&](double extent) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(extent / cell_size_m - 1e-9)));
  };
  rows_ = count(north_east.y - south_west_.y);
  cols_ = count(north_east.x - south_west_.x);
  if (rows_ > 65535 || cols_ > 65535) throw ConfigError("grid exceeds 65535 cells per dimension");
}

bool AreaOfInterest::contains(GeoPoint p) const noexcept {
  return p.lat >= min_.lat && p.lat <= max_.lat && p.lon >= min_.lon && p.lon <= max_.lon;
}

PlanarPoint AreaOfInterest::cell_center(std::size_t row, std::size_t col) const noexcept {
  return {south_west_.x + (static_cast<double>(col) + 0.5) * cell_size_m_,
          south_west_.y + (static_cast<double>(row) + 0.5) * cell_size_m_};
}

GeoPoint AreaOfInterest::cell_center_geo(std::size_t row, std::size_t col) const noexcept {
  return unproject(cell_center(row, col), frame_);
}

std::optional<GridIndex> AreaOfInterest::locate(GeoPoint p) const noexcept {
  if (!contains(p)) return std::nullopt;
  const PlanarPoint q = project(p, frame_);
  const auto index = [&](double offset, std::size_t n) {
    const double cell = std::floor(offset / cell_size_m_);
    return static_cast<std::size_t>(std::clamp(cell, 0.0, static_cast<double>(n - 1)));
  };
  return GridIndex{index(q.y - south_west_.y, rows_), index(q.x - south_west_.x, cols_)};
}

// --- population --------------------------------------------------------------

PopulationGrid PopulationGrid::zeros(const AreaOfInterest& aoi) {
  return PopulationGrid{aoi, std::vector<double>(aoi.cell_count(), 0.0)};
}

double PopulationGrid::total_population() const {
  double sum = 0.0;
  for (double d : density) sum += d;
  return sum * aoi.cell_area_km2();
}

PopulationParseResult parse_population(std::string_view text, const AreaOfInterest& aoi) {
  PopulationParseResult result{PopulationGrid::zeros(aoi), 0};
  std::vector<bool> seen(aoi.cell_count(), false);
  std::size_t ilat = 0, ilon = 0, idens = 0;
  bool have_header = false;

  csv::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    if (blank(line)) return;
    if (!have_header) {
      const auto cols = index_header(line);
      ilat = require_column(cols, "lat");
      ilon = require_column(cols, "lon");
      idens = require_column(cols, "density");
      have_header = true;
      return;
    }
    const auto f = csv::split_line(line);
    if (f.size() <= std::max({ilat, ilon, idens})) throw ParseError("too few fields", lineno);
    const GeoPoint p{csv::parse_double(f[ilat], "lat", lineno), csv::parse_double(f[ilon], "lon", lineno)};
    const double density = csv::parse_double(f[idens], "density", lineno);
    if (p.lat < -90.0 || p.lat > 90.0) throw ParseError("lat out of range", lineno);
    if (p.lon < -180.0 || p.lon > 180.0) throw ParseError("lon out of range", lineno);
    if (density < 0.0) throw ParseError("negative density", lineno);
    const auto cell = aoi.locate(p);
    if (!cell) {
      ++result.skipped_outside;
      return;
    }
    const std::size_t idx = cell->row * aoi.cols() + cell->col;
    if (seen[idx]) {
      throw ParseError("duplicate sample for cell (" + std::to_string(cell->row) + ", " +
                           std::to_string(cell->col) + ")",
                       lineno);
    }
    seen[idx] = true;
    result.grid.density[idx] = density;
  });
  if (!have_header && !blank(text)) throw ParseError("missing header", 1);
  return result;
}

std::string serialize_population(const PopulationGrid& grid) {
  std::string out = "lat,lon,density\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const double d = grid.at(r, c);
      if (d == 0.0) continue;
      const GeoPoint p = grid.aoi.cell_center_geo(r, c);
      out += format_double(p.lat) + "," + format_double(p.lon) + "," + format_double(d) + "\n";
    }
  }
  return out;
}

// --- sites -------------------------------------------------------------------

std::string_view to_string(Structure s) noexcept {
  return s == Structure::CellTower ? "CT" : "WT";
}

std::string_view to_string(Tech t) noexcept {
  switch (t) {
  case Tech::G3: return "G3";
  case Tech::G4: return "G4";
  case Tech::Unequipped: return "NONE";
  }
  return "NONE";
}

void SiteRecord::validate() const {
  if (id.empty()) throw ConfigError("site id must not be empty");
  if (!valid_geo(position)) throw ConfigError("site " + id + ": position out of range");
  if (structure == Structure::CellTower && tech == Tech::Unequipped)
    throw ConfigError("site " + id + ": cell tower must be G3 or G4");
  if (structure == Structure::WindTurbine && tech == Tech::G3)
    throw ConfigError("site " + id + ": wind turbine must be G4 or unequipped");
  if (!(height_m > 0.0) || !std::isfinite(height_m)) throw ConfigError("site " + id + ": height must be > 0");
  if (!(tx_power_w > 0.0) || !std::isfinite(tx_power_w)) throw ConfigError("site " + id + ": power must be > 0");
}

std::vector<SiteRecord> parse_sites(std::string_view text, const SiteDefaults& defaults) {
  std::vector<SiteRecord> sites;
  std::set<std::string> ids;
  std::size_t iid = 0, ilat = 0, ilon = 0, istruct = 0, itech = 0;
  std::optional<std::size_t> iheight, ipower, ifarm;
  bool have_header = false;

  csv::for_each_line(text, [&](std::string_view line, std::size_t lineno) {
    if (blank(line)) return;
    if (!have_header) {
      const auto cols = index_header(line);
      iid = require_column(cols, "id");
      ilat = require_column(cols, "lat");
      ilon = require_column(cols, "lon");
      istruct = require_column(cols, "structure");
      itech = require_column(cols, "tech");
      const auto opt = [&](const char* name) -> std::optional<std::size_t> {
        const auto it = cols.find(name);
        return it == cols.end() ? std::nullopt : std::optional<std::size_t>(it->second);
      };
      iheight = opt("height_m");
      ipower = opt("power_w");
      ifarm = opt("farm_id");
      have_header = true;
      return;
    }
    const auto f = csv::split_line(line);
    if (f.size() <= std::max({iid, ilat, ilon, istruct, itech})) throw ParseError("too few fields", lineno);

    SiteRecord s;
    s.id = trim(f[iid]);
    if (s.id.empty()) throw ParseError("empty id", lineno);
    s.position = {csv::parse_double(f[ilat], "lat", lineno), csv::parse_double(f[ilon], "lon", lineno)};
    if (s.position.lat < -90.0 || s.position.lat > 90.0) throw ParseError("lat out of range", lineno);
    if (s.position.lon < -180.0 || s.position.lon > 180.0) throw ParseError("lon out of range", lineno);

    const std::string st = upper(trim(f[istruct]));
    if (st == "CT" || st == "CELLTOWER") s.structure = Structure::CellTower;
    else if (st == "WT" || st == "WINDTURBINE") s.structure = Structure::WindTurbine;
    else throw ParseError("invalid structure '" + trim(f[istruct]) + "'", lineno);

    const std::string te = upper(trim(f[itech]));
    if (te == "G3" || te == "3G") s.tech = Tech::G3;
    else if (te == "G4" || te == "4G") s.tech = Tech::G4;
    else if (te == "NONE" || te == "UNEQUIPPED") s.tech = Tech::Unequipped;
    else throw ParseError("invalid tech '" + trim(f[itech]) + "'", lineno);

    if (s.structure == Structure::CellTower && s.tech == Tech::Unequipped)
      throw ParseError("cell tower must be G3 or G4", lineno);
    if (s.structure == Structure::WindTurbine && s.tech == Tech::G3)
      throw ParseError("wind turbine must be G4 or NONE", lineno);

    const bool tower = s.structure == Structure::CellTower;
    const auto h = trim(field_at(f, iheight));
    const auto p = trim(field_at(f, ipower));
    s.height_m = h.empty() ? (tower ? defaults.ct_height_m : defaults.wt_height_m)
                           : csv::parse_double(h, "height_m", lineno);
    s.tx_power_w = p.empty() ? (tower ? defaults.ct_power_w : defaults.wt_power_w)
                             : csv::parse_double(p, "power_w", lineno);
    if (!(s.height_m > 0.0)) throw ParseError("height_m must be > 0", lineno);
    if (!(s.tx_power_w > 0.0)) throw ParseError("power_w must be > 0", lineno);
    if (auto farm = trim(field_at(f, ifarm)); !farm.empty()) s.farm_id = std::move(farm);

    if (!ids.insert(s.id).second) throw ParseError("duplicate id '" + s.id + "'", lineno);
    sites.push_back(std::move(s));
  });
  if (!have_header && !blank(text)) throw ParseError("missing header", 1);
  return sites;
}

std::string serialize_sites(const std::vector<SiteRecord>& sites) {
  std::string out = "id,lat,lon,structure,tech,height_m,power_w,farm_id\n";
  for (const auto& s : sites) {
    out += s.id + "," + format_double(s.position.lat) + "," + format_double(s.position.lon) + "," +
           std::string(to_string(s.structure)) + "," + std::string(to_string(s.tech)) + "," +
           format_double(s.height_m) + "," + format_double(s.tx_power_w) + "," + s.farm_id.value_or("") +
           "\n";
  }
  return out;
}

std::vector<SiteRecord> dedupe_farms(std::vector<SiteRecord> sites) {
  // farm id -> index of the turbine kept equipped
  std::map<std::string, std::size_t> keeper;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& s = sites[i];
    if (s.structure != Structure::WindTurbine || s.tech != Tech::G4 || !s.farm_id) continue;
    auto [it, inserted] = keeper.emplace(*s.farm_id, i);
    if (inserted) continue;
    const auto& best = sites[it->second];
    if (s.height_m > best.height_m || (s.height_m == best.height_m && s.id < best.id)) it->second = i;
  }
  for (std::size_t i = 0; i < sites.size(); ++i) {
    auto& s = sites[i];
    if (s.structure != Structure::WindTurbine || s.tech != Tech::G4 || !s.farm_id) continue;
    if (keeper.at(*s.farm_id) != i) s.tech = Tech::Unequipped;
  }
  return sites;
}

// --- csv helpers -------------------------------------------------------------

namespace csv {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

double parse_double(std::string_view field, std::string_view what, std::size_t lineno) {
  const std::string s = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("malformed number for " + std::string(what) + ": '" + s + "'", lineno);
  return v;
}

} // namespace csv

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

} // namespace wtbs
