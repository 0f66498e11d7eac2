// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/scenario.hpp
 *
 * Scenario bundles: a directory holding `scenario.cfg`, `sites.csv`,
 * `population.csv` and optionally a candidates CSV.
 *
 * `scenario.cfg` is a sectioned `key = value` file:
 *
 *     [scenario]      sites, population, candidates, bbox, cell_size_m
 *     [environment]   preset = rural|suburban, plus per-field overrides
 *     [simulation]    SimConfig fields
 *     [sites]         default heights/powers for rows that leave them empty
 *     [preset.NAME]   redefines a named environment preset
 *
 * Every field has a default, so an empty section means the reference values.
 */

#pragma once

#include "wtbs/channel.hpp"
#include "wtbs/geodata.hpp"
#include "wtbs/network_sim.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wtbs {

struct ScenarioConfig {
  std::string sites_file = "sites.csv";
  std::string population_file = "population.csv";
  std::optional<std::string> candidates_file;
  std::optional<GeoPoint> bbox_min;
  std::optional<GeoPoint> bbox_max;
  double cell_size_m = 200.0;

  std::string preset_name = "rural";
  /// Named preset with [environment] overrides applied.
  EnvironmentPreset environment = EnvironmentPreset::rural();
  std::map<std::string, EnvironmentPreset> presets{{"rural", EnvironmentPreset::rural()},
                                                    {"suburban", EnvironmentPreset::suburban()}};
  SimConfig sim;
  SiteDefaults site_defaults;

  AreaOfInterest aoi() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

ScenarioConfig default_config();

/// Throws InputError naming `source` and the offending line.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "scenario.cfg");

/// Canonical text: every section and field, shortest round-trip numbers.
std::string serialize_config(const ScenarioConfig& cfg);

struct BundleTexts {
  std::string config;
  std::string sites;
  std::string population;
  std::optional<std::string> candidates;
};

struct ScenarioBundle {
  ScenarioConfig config;
  Scenario scenario;
  std::size_t skipped_population_samples = 0;
  std::vector<std::string> warnings;
  std::filesystem::path directory;
};

/// `path` is a bundle directory or a config file; relative data paths are
/// resolved against the config file's directory.
BundleTexts read_bundle_texts(const std::filesystem::path& path);
ScenarioBundle load_bundle(const std::filesystem::path& path);
ScenarioBundle load_bundle_from_texts(const BundleTexts& texts);

std::string read_text_file(const std::filesystem::path& path);

} // namespace wtbs
