// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/network_sim.hpp
 *
 * Monte Carlo coverage engine. For every grid cell a user is placed at the
 * cell center; each iteration samples a LoS/NLoS state per BS, associates the
 * user to the BS with the strongest (biased) fading-averaged power, samples
 * Nakagami fading and records whether the SINR clears the threshold.
 *
 * Randomness is counter-based and keyed by (seed, row, col, iteration, site
 * id): results do not depend on worker count, evaluation order, or on which
 * other sites are present, so two scenarios differing in one site share
 * every other draw.
 */

#pragma once

#include "wtbs/channel.hpp"
#include "wtbs/geodata.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wtbs {

struct SimConfig {
  double beta_db = -5.0;
  double noise_w = 1e-12;
  /// Scales noise_w into total in-band noise power.
  double bandwidth_multiplier = 1.0;
  double bias = 1.0; ///< linear multiplier on 4G association scores
  std::uint32_t iterations = 10000;
  std::uint64_t seed = 1;
  double rate3_mbps = 2.0;
  double rate4_mbps = 17.5;
  double user_height_m = 0.0;
  /// When false, only BSs of the serving technology interfere.
  bool cross_tech_interference = true;

  double beta_linear() const noexcept { return db_to_linear(beta_db); }
  double noise_power_w() const noexcept { return noise_w * bandwidth_multiplier; }
  double rate_for(Tech t) const noexcept { return t == Tech::G4 ? rate4_mbps : rate3_mbps; }
  void validate() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Scenario {
  AreaOfInterest aoi;
  PopulationGrid population;
  /// Cell towers and existing turbines (equipped or not).
  std::vector<SiteRecord> sites;
  /// Hypothetical new turbine positions, not yet part of the network.
  std::vector<SiteRecord> candidates;
  EnvironmentPreset preset;

  void validate() const;
};

/// An equipped site resolved onto the planar frame.
struct Transmitter {
  std::string id;
  PlanarPoint position;
  double height_m = 0.0;
  double tx_power_w = 0.0;
  Tech tech = Tech::G4;
  std::uint64_t stream_key = 0;
};

std::vector<Transmitter> active_transmitters(std::span<const SiteRecord> sites, const LocalFrame& frame);

/// Per-site LoS probability and fading-averaged power in each visibility
/// state, for one user position.
struct LinkBudget {
  std::vector<double> p_los;
  std::vector<double> power_los;
  std::vector<double> power_nlos;
  std::size_t clamped_links = 0;
};

LinkBudget link_budget(PlanarPoint user, std::span<const Transmitter> sites, const EnvironmentPreset& preset,
                       double user_height_m = 0.0);

struct Realization {
  std::vector<Visibility> visibility;
  std::vector<double> gains;
};

/// Draws visibility then fading for every site from its own link stream.
Realization sample_realization(const LinkBudget& budget, std::span<const Transmitter> sites,
                               const EnvironmentPreset& preset, std::uint64_t seed, std::uint32_t row,
                               std::uint32_t col, std::uint32_t iteration);

std::vector<double> mean_power_profile(const LinkBudget& budget, const Realization& realization);

/// Throws NoActiveBsError when `sites` is empty.
std::vector<double> mean_power_profile(PlanarPoint user, std::span<const Transmitter> sites,
                                       const Realization& realization, const EnvironmentPreset& preset,
                                       double user_height_m = 0.0);

/// argmax of profile_i * (bias if tech_i is G4); lowest index wins ties.
std::size_t associate(std::span<const double> profile, std::span<const Tech> techs, double bias);

enum class InterferenceRule { AllSites, SameTechOnly };

double instantaneous_sinr(std::span<const double> profile, std::span<const double> gains, std::size_t serving,
                          double noise_w);
double instantaneous_sinr(std::span<const double> profile, std::span<const double> gains, std::size_t serving,
                          double noise_w, std::span<const Tech> techs, InterferenceRule rule);

struct CellResult {
  double p_cov = 0.0;
  double rate_lb_mbps = 0.0;
  double share4 = 0.0;
  /// Monte Carlo standard error of rate_lb_mbps.
  double rate_se_mbps = 0.0;
  std::vector<std::uint32_t> serving_histogram;
  std::uint32_t clamped_links = 0;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

CellResult simulate_cell(PlanarPoint user, std::uint32_t row, std::uint32_t col,
                         std::span<const Transmitter> sites, const EnvironmentPreset& preset,
                         const SimConfig& cfg);

struct RateMap {
  AreaOfInterest aoi;
  std::vector<std::string> site_ids;
  std::vector<CellResult> cells;
  std::uint64_t fingerprint = 0;
  std::uint64_t aoi_fingerprint = 0;

  std::size_t rows() const noexcept { return aoi.rows(); }
  std::size_t cols() const noexcept { return aoi.cols(); }
  const CellResult& at(std::size_t row, std::size_t col) const { return cells[row * cols() + col]; }
};

struct MapOptions {
  unsigned workers = 1;
  /// Cells with a zero entry are not simulated: they are copied from `base`
  /// when given, otherwise left zero.
  const std::vector<std::uint8_t>* mask = nullptr;
  const RateMap* base = nullptr;
};

std::uint64_t aoi_fingerprint(const AreaOfInterest& aoi);
std::uint64_t scenario_fingerprint(const Scenario& scenario, const SimConfig& cfg);

RateMap simulate_map(const Scenario& scenario, const SimConfig& cfg, const MapOptions& options = {});

/// Sum(pop_i * rate_i) / Sum(pop_i). Throws ConfigError on zero population or
/// mismatched grids.
double population_weighted_average(const RateMap& map, const PopulationGrid& pop);

struct MapSummary {
  double avg_rate_mbps = 0.0;
  double rate_se_mbps = 0.0; ///< standard error of avg_rate_mbps, cells treated as independent
  double avg_p_cov = 0.0;
  double share4 = 0.0;       ///< population-weighted fraction of iterations served by 4G
  double mean_share4 = 0.0;  ///< unweighted over cells
  double total_population = 0.0;
};

MapSummary summarize(const RateMap& map, const PopulationGrid& pop);

struct MapDelta {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> delta_mbps;
  double max_gain = 0.0;
  double max_loss = 0.0; ///< most negative delta, <= 0
  std::size_t degraded_cells = 0;
  double fraction_degraded = 0.0;
};

/// after - before, per cell. Throws ConfigError on dimension/AOI mismatch.
MapDelta diff_maps(const RateMap& before, const RateMap& after);

} // namespace wtbs
