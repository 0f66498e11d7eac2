// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/error.hpp"
#include "wtbs/scenario.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>

namespace wtbs {
namespace {

using testing::scenario_dir;
using testing::slurp;
using testing::source_dir;
using testing::temp_dir;

TEST(Config, EmptyTextMeansReferenceValues) {
  EXPECT_EQ(parse_config(""), default_config());
  EXPECT_EQ(parse_config("[scenario]\n[environment]\n[simulation]\n[sites]\n"), default_config());
}

TEST(Config, DefaultsMatchGoldenFile) {
  const auto golden = slurp(source_dir() / "tests" / "golden" / "default_config.cfg");
  EXPECT_EQ(serialize_config(default_config()), golden);
  EXPECT_EQ(parse_config(golden), default_config());
}

TEST(Config, ReferenceValues) {
  const auto c = default_config();
  EXPECT_EQ(c.sim.beta_db, -5.0);
  EXPECT_EQ(c.sim.noise_w, 1e-12);
  EXPECT_EQ(c.sim.iterations, 10000u);
  EXPECT_EQ(c.sim.rate3_mbps, 2.0);
  EXPECT_EQ(c.sim.rate4_mbps, 17.5);
  EXPECT_EQ(c.site_defaults.ct_height_m, 30.0);
  EXPECT_EQ(c.site_defaults.ct_power_w, 10.0);
  EXPECT_EQ(c.site_defaults.wt_height_m, 100.0);
  EXPECT_EQ(c.site_defaults.wt_power_w, 11.0);
  EXPECT_EQ(c.environment, EnvironmentPreset::rural());
}

TEST(Config, ParsesEverySection) {
  const auto c = parse_config(R"(# comment
[scenario]
sites = s.csv
population = p.csv   # trailing comment
candidates = c.csv
bbox = 10, 20, 10.5, 20.5
cell_size_m = 250

[environment]
preset = suburban
eta4_db = -18

[simulation]
beta_db = -3
iterations = 500
seed = 99
bias = 22
cross_tech_interference = false

[sites]
wt_height_m = 120

[preset.coastal]
s_a = 6
)");
  EXPECT_EQ(c.sites_file, "s.csv");
  EXPECT_EQ(c.population_file, "p.csv");
  EXPECT_EQ(c.candidates_file, "c.csv");
  EXPECT_EQ(c.bbox_min, (GeoPoint{10, 20}));
  EXPECT_EQ(c.bbox_max, (GeoPoint{10.5, 20.5}));
  EXPECT_EQ(c.cell_size_m, 250.0);
  EXPECT_EQ(c.preset_name, "suburban");
  EXPECT_EQ(c.environment.s_a, 9.6117);
  EXPECT_EQ(c.environment.eta4_db, -18.0);
  EXPECT_EQ(c.sim.beta_db, -3.0);
  EXPECT_EQ(c.sim.iterations, 500u);
  EXPECT_EQ(c.sim.seed, 99u);
  EXPECT_EQ(c.sim.bias, 22.0);
  EXPECT_FALSE(c.sim.cross_tech_interference);
  EXPECT_EQ(c.site_defaults.wt_height_m, 120.0);
  ASSERT_TRUE(c.presets.count("coastal"));
  EXPECT_EQ(c.presets.at("coastal").s_a, 6.0);
}

TEST(Config, CustomPresetSelectable) {
  const auto c = parse_config("[preset.hills]\ns_a = 7\ns_b = 0.2\n[environment]\npreset = hills\n");
  EXPECT_EQ(c.environment.s_a, 7.0);
  EXPECT_EQ(c.environment.name, "hills");
}

TEST(Config, RoundTripThroughSerialization) {
  auto c = default_config();
  c.candidates_file = "cand.csv";
  c.bbox_min = GeoPoint{-12.5, 130.25};
  c.bbox_max = GeoPoint{-12.0, 131.0};
  c.preset_name = "suburban";
  c.environment = EnvironmentPreset::suburban();
  c.environment.eta_nlos_db = -4.5;
  c.environment.los_probability_override = 0.25;
  c.sim.seed = 123456789012345ULL;
  c.sim.bias = 29;
  c.sim.cross_tech_interference = false;
  c.sim.noise_w = 3.3e-13;
  c.site_defaults.ct_power_w = 20;
  auto p = EnvironmentPreset::rural();
  p.name = "custom";
  p.alpha_nlos = 3.7;
  c.presets["custom"] = p;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

void expect_input_error(const std::string& text, std::size_t line, const std::string& fragment) {
  try {
    parse_config(text, "x.cfg");
    FAIL() << "expected InputError for: " << text;
  } catch (const InputError& e) {
    EXPECT_EQ(e.file(), "x.cfg");
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Config, ErrorsNameTheLine) {
  expect_input_error("[simulation]\nbogus = 1\n", 2, "unknown key");
  expect_input_error("[simulation]\nseed = 1\nseed = 2\n", 3, "duplicate key");
  expect_input_error("[simulation]\n\niterations = ten\n", 3, "iterations");
  expect_input_error("[nowhere]\n", 1, "unknown section");
  expect_input_error("[scenario]\n[scenario]\n", 2, "duplicate section");
  expect_input_error("seed = 1\n", 1, "outside");
  expect_input_error("[environment]\npreset = urban\n", 2, "urban");
  expect_input_error("[simulation]\ncross_tech_interference = maybe\n", 2, "true or false");
  expect_input_error("[scenario]\nbbox = 1, 2, 3\n", 2, "bbox");
  expect_input_error("[simulation]\nbias = 0.5\n", 1, "bias");
  expect_input_error("[preset.rural]\nm_nlos = 4\n", 1, "m_nlos");
  expect_input_error("[simulation\n", 1, "unterminated");
}

TEST(Bundle, LoadsSyntheticFrance) {
  const auto b = load_bundle(scenario_dir("synthetic-france"));
  EXPECT_EQ(b.scenario.aoi.rows(), 100u);
  EXPECT_EQ(b.scenario.aoi.cols(), 100u);
  EXPECT_EQ(b.config.sim.bias, 29.0);
  EXPECT_EQ(b.skipped_population_samples, 0u);
  EXPECT_TRUE(b.warnings.empty());
  EXPECT_GT(b.scenario.population.total_population(), 0.0);
  EXPECT_FALSE(b.scenario.candidates.empty());
  for (const auto& c : b.scenario.candidates) {
    EXPECT_EQ(c.structure, Structure::WindTurbine);
    EXPECT_EQ(c.tech, Tech::Unequipped);
  }
  bool has3 = false, has4 = false, has_idle_wt = false;
  for (const auto& s : b.scenario.sites) {
    has3 |= s.tech == Tech::G3;
    has4 |= s.tech == Tech::G4;
    has_idle_wt |= s.structure == Structure::WindTurbine && s.tech == Tech::Unequipped;
  }
  EXPECT_TRUE(has3 && has4 && has_idle_wt);
}

TEST(Bundle, AcceptsConfigFilePath) {
  const auto a = load_bundle(scenario_dir("planner-5"));
  const auto b = load_bundle(scenario_dir("planner-5") / "scenario.cfg");
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.scenario.sites, b.scenario.sites);
  EXPECT_EQ(a.scenario.candidates.size(), 5u);
}

TEST(Bundle, TextsAndDirectoryAgree) {
  const auto dir = scenario_dir("planner-5");
  const auto from_texts = load_bundle_from_texts(read_bundle_texts(dir));
  const auto from_dir = load_bundle(dir);
  EXPECT_EQ(from_texts.scenario.population.density, from_dir.scenario.population.density);
  EXPECT_EQ(from_texts.scenario.candidates, from_dir.scenario.candidates);
}

std::filesystem::path copy_bundle(const std::string& name, const std::string& tag) {
  const auto dir = temp_dir(tag);
  std::filesystem::copy(scenario_dir(name), dir, std::filesystem::copy_options::recursive);
  return dir;
}

TEST(Bundle, MissingSitesFileNamesPath) {
  const auto dir = copy_bundle("planner-5", "missing");
  std::filesystem::remove(dir / "sites.csv");
  try {
    load_bundle(dir);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find((dir / "sites.csv").string()), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}

TEST(Bundle, MissingConfig) { EXPECT_THROW(load_bundle(temp_dir("nocfg")), InputError); }

TEST(Bundle, CorruptSitesRowReported) {
  const auto dir = copy_bundle("planner-5", "corrupt");
  {
    std::ofstream(dir / "sites.csv", std::ios::app) << "bad,1000,0,CT,G3,,,\n";
  }
  try {
    load_bundle(dir);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("sites.csv"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST(Bundle, CandidatesMustBeTurbines) {
  auto texts = read_bundle_texts(scenario_dir("planner-5"));
  *texts.candidates += "tower-x,44.9,-64.6,CT,G3\n";
  EXPECT_THROW(load_bundle_from_texts(texts), InputError);
}

TEST(Bundle, CandidateIdsDisjointFromSites) {
  auto texts = read_bundle_texts(scenario_dir("planner-5"));
  *texts.candidates += "ct-01,44.9,-64.6,WT,NONE\n";
  EXPECT_THROW(load_bundle_from_texts(texts), InputError);
}

TEST(Bundle, FarmRuleAppliedOnLoad) {
  auto texts = read_bundle_texts(scenario_dir("planner-5"));
  texts.sites += "w1,44.9,-64.6,WT,G4,100,,f\nw2,44.9,-64.6,WT,G4,120,,f\n";
  const auto b = load_bundle_from_texts(texts);
  int equipped = 0;
  for (const auto& s : b.scenario.sites)
    if (s.farm_id == "f") equipped += s.tech == Tech::G4;
  EXPECT_EQ(equipped, 1);
}

TEST(Bundle, NoBboxIsAnError) {
  BundleTexts t{"[scenario]\n", "id,lat,lon,structure,tech\n", "lat,lon,density\n", std::nullopt};
  EXPECT_THROW(load_bundle_from_texts(t), InputError);
}

} // namespace
} // namespace wtbs
