// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wtbs/geodata.hpp"
#include "wtbs/network_sim.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace wtbs::testing {

inline std::filesystem::path source_dir() { return WTBS_SOURCE_DIR; }
inline std::filesystem::path scenario_dir(const std::string& name) { return source_dir() / "scenarios" / name; }

/// AOI of rows x cols square cells centred on `center`.
inline AreaOfInterest square_aoi(std::size_t rows, std::size_t cols, double cell_m, GeoPoint center = {45.0, 5.0}) {
  const auto frame = LocalFrame::at(center);
  const double half_y = rows * cell_m / 2 - 1e-3;
  const double half_x = cols * cell_m / 2 - 1e-3;
  return AreaOfInterest(unproject({-half_x, -half_y}, frame), unproject({half_x, half_y}, frame), cell_m);
}

/// Site positioned in meters relative to the AOI frame origin.
inline SiteRecord site_at(const AreaOfInterest& aoi, std::string id, double x, double y, Structure st, Tech tech,
                          std::optional<std::string> farm = {}) {
  SiteRecord s;
  s.id = std::move(id);
  s.position = unproject({x, y}, aoi.frame());
  s.structure = st;
  s.tech = tech;
  s.height_m = st == Structure::CellTower ? 30.0 : 100.0;
  s.tx_power_w = st == Structure::CellTower ? 10.0 : 11.0;
  s.farm_id = std::move(farm);
  return s;
}

inline Scenario uniform_scenario(const AreaOfInterest& aoi, std::vector<SiteRecord> sites,
                                 EnvironmentPreset preset = EnvironmentPreset::rural(), double density = 100.0) {
  Scenario s;
  s.aoi = aoi;
  s.population = PopulationGrid::zeros(aoi);
  std::fill(s.population.density.begin(), s.population.density.end(), density);
  s.sites = std::move(sites);
  s.preset = std::move(preset);
  return s;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() / ("wtbs-" + tag + "-" + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace wtbs::testing
