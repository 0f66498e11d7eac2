// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/network_sim.hpp"

#include "wtbs/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace wtbs {

void SimConfig::validate() const {
  if (!std::isfinite(beta_db)) throw ConfigError("beta_db must be finite");
  if (!(noise_w > 0.0) || !std::isfinite(noise_w)) throw ConfigError("noise_w must be > 0");
  if (!(bandwidth_multiplier > 0.0)) throw ConfigError("bandwidth_multiplier must be > 0");
  if (!(bias >= 1.0) || !std::isfinite(bias)) throw ConfigError("bias must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(rate3_mbps > 0.0) || !(rate4_mbps > 0.0)) throw ConfigError("rates must be > 0");
  if (!(user_height_m >= 0.0)) throw ConfigError("user_height_m must be >= 0");
}

void Scenario::validate() const {
  preset.validate();
  if (population.rows() != aoi.rows() || population.cols() != aoi.cols() ||
      population.density.size() != aoi.cell_count())
    throw ConfigError("population grid does not match the area of interest");
  for (double d : population.density)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("population density must be finite and >= 0");
  std::set<std::string> ids;
  for (const auto& s : sites) {
    s.validate();
    if (!ids.insert(s.id).second) throw ConfigError("duplicate site id '" + s.id + "'");
  }
  for (const auto& c : candidates) {
    c.validate();
    if (c.structure != Structure::WindTurbine) throw ConfigError("candidate " + c.id + " must be a wind turbine");
    if (!ids.insert(c.id).second) throw ConfigError("candidate id '" + c.id + "' collides with another id");
  }
}

std::vector<Transmitter> active_transmitters(std::span<const SiteRecord> sites, const LocalFrame& frame) {
  std::vector<Transmitter> out;
  for (const auto& s : sites) {
    if (!s.equipped()) continue;
    out.push_back({s.id, project(s.position, frame), s.height_m, s.tx_power_w, s.tech, fnv1a64(s.id)});
  }
  return out;
}

LinkBudget link_budget(PlanarPoint user, std::span<const Transmitter> sites, const EnvironmentPreset& preset,
                       double user_height_m) {
  LinkBudget b;
  b.p_los.reserve(sites.size());
  b.power_los.reserve(sites.size());
  b.power_nlos.reserve(sites.size());
  LinkDiagnostics diag;
  for (const auto& s : sites) {
    const double dh = s.height_m - user_height_m;
    if (!(dh > 0.0)) throw DomainError("site " + s.id + " is not above the user antenna");
    const double d = std::hypot(s.position.x - user.x, s.position.y - user.y);
    const auto g = LinkGeometry::make(d, dh);
    b.p_los.push_back(los_probability(g.elevation_deg, preset));
    const std::size_t before = diag.clamped_links;
    b.power_los.push_back(mean_rx_power(s.tx_power_w, additional_loss(s.tech, Visibility::LoS, preset),
                                        g.distance_m, preset.alpha_los, &diag));
    diag.clamped_links = before;
    b.power_nlos.push_back(mean_rx_power(s.tx_power_w, additional_loss(s.tech, Visibility::NLoS, preset),
                                         g.distance_m, preset.alpha_nlos, &diag));
  }
  b.clamped_links = diag.clamped_links;
  return b;
}

Realization sample_realization(const LinkBudget& budget, std::span<const Transmitter> sites,
                               const EnvironmentPreset& preset, std::uint64_t seed, std::uint32_t row,
                               std::uint32_t col, std::uint32_t iteration) {
  Realization r;
  r.visibility.reserve(sites.size());
  r.gains.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    auto rng = RandomStream::for_link(seed, row, col, iteration, sites[i].stream_key);
    const Visibility v = sample_visibility(budget.p_los[i], rng);
    r.visibility.push_back(v);
    r.gains.push_back(sample_fading(preset.nakagami_m(v), rng));
  }
  return r;
}

std::vector<double> mean_power_profile(const LinkBudget& budget, const Realization& realization) {
  std::vector<double> profile(budget.p_los.size());
  for (std::size_t i = 0; i < profile.size(); ++i)
    profile[i] = realization.visibility[i] == Visibility::LoS ? budget.power_los[i] : budget.power_nlos[i];
  return profile;
}

std::vector<double> mean_power_profile(PlanarPoint user, std::span<const Transmitter> sites,
                                       const Realization& realization, const EnvironmentPreset& preset,
                                       double user_height_m) {
  if (sites.empty()) throw NoActiveBsError();
  return mean_power_profile(link_budget(user, sites, preset, user_height_m), realization);
}

std::size_t associate(std::span<const double> profile, std::span<const Tech> techs, double bias) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double score = techs[i] == Tech::G4 ? profile[i] * bias : profile[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

double instantaneous_sinr(std::span<const double> profile, std::span<const double> gains, std::size_t serving,
                          double noise_w) {
  double interference = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (i != serving) interference += profile[i] * gains[i];
  return profile[serving] * gains[serving] / (interference + noise_w);
}

double instantaneous_sinr(std::span<const double> profile, std::span<const double> gains, std::size_t serving,
                          double noise_w, std::span<const Tech> techs, InterferenceRule rule) {
  if (rule == InterferenceRule::AllSites) return instantaneous_sinr(profile, gains, serving, noise_w);
  double interference = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (i != serving && techs[i] == techs[serving]) interference += profile[i] * gains[i];
  return profile[serving] * gains[serving] / (interference + noise_w);
}

CellResult simulate_cell(PlanarPoint user, std::uint32_t row, std::uint32_t col,
                         std::span<const Transmitter> sites, const EnvironmentPreset& preset,
                         const SimConfig& cfg) {
  if (sites.empty()) throw NoActiveBsError();
  const std::size_t n = sites.size();
  const LinkBudget budget = link_budget(user, sites, preset, cfg.user_height_m);
  const double beta = cfg.beta_linear();
  const double noise = cfg.noise_power_w();
  const auto rule = cfg.cross_tech_interference ? InterferenceRule::AllSites : InterferenceRule::SameTechOnly;

  std::vector<Tech> techs(n);
  for (std::size_t i = 0; i < n; ++i) techs[i] = sites[i].tech;
  std::vector<double> profile(n), gains(n);

  CellResult out;
  out.serving_histogram.assign(n, 0);
  out.clamped_links = static_cast<std::uint32_t>(budget.clamped_links);
  std::uint64_t covered3 = 0, covered4 = 0, served4 = 0, covered = 0;

  for (std::uint32_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = RandomStream::for_link(cfg.seed, row, col, it, sites[i].stream_key);
      const Visibility v = sample_visibility(budget.p_los[i], rng);
      profile[i] = v == Visibility::LoS ? budget.power_los[i] : budget.power_nlos[i];
      gains[i] = sample_fading(preset.nakagami_m(v), rng);
    }
    const std::size_t s = associate(profile, techs, cfg.bias);
    ++out.serving_histogram[s];
    const bool g4 = techs[s] == Tech::G4;
    served4 += g4;
    if (instantaneous_sinr(profile, gains, s, noise, techs, rule) > beta) {
      ++covered;
      (g4 ? covered4 : covered3) += 1;
    }
  }

  const double iters = static_cast<double>(cfg.iterations);
  out.p_cov = static_cast<double>(covered) / iters;
  out.share4 = static_cast<double>(served4) / iters;
  const double sum = static_cast<double>(covered3) * cfg.rate3_mbps + static_cast<double>(covered4) * cfg.rate4_mbps;
  const double sum_sq = static_cast<double>(covered3) * cfg.rate3_mbps * cfg.rate3_mbps +
                        static_cast<double>(covered4) * cfg.rate4_mbps * cfg.rate4_mbps;
  out.rate_lb_mbps = sum / iters;
  const double var = std::max(0.0, sum_sq / iters - out.rate_lb_mbps * out.rate_lb_mbps);
  out.rate_se_mbps = cfg.iterations > 1 ? std::sqrt(var / (iters - 1.0)) : 0.0;
  return out;
}

// --- fingerprints ------------------------------------------------------------

namespace {

void hash_double(std::uint64_t& h, double v) {
  char bytes[sizeof v];
  std::memcpy(bytes, &v, sizeof v);
  h = fnv1a64(std::string_view(bytes, sizeof bytes), h);
}

void hash_text(std::uint64_t& h, std::string_view s) {
  h = fnv1a64(s, h);
  h = fnv1a64(std::string_view("\x1f", 1), h);
}

} // namespace

std::uint64_t aoi_fingerprint(const AreaOfInterest& aoi) {
  std::uint64_t h = fnv1a64("aoi");
  for (double v : {aoi.min().lat, aoi.min().lon, aoi.max().lat, aoi.max().lon, aoi.cell_size_m()}) hash_double(h, v);
  return h;
}

std::uint64_t scenario_fingerprint(const Scenario& scenario, const SimConfig& cfg) {
  std::uint64_t h = aoi_fingerprint(scenario.aoi);
  const auto& p = scenario.preset;
  for (double v : {p.s_a, p.s_b, p.eta3_db, p.eta4_db, p.alpha_los, p.alpha_nlos, p.m_los, p.m_nlos,
                   p.eta_los_db.value_or(NAN), p.eta_nlos_db.value_or(NAN), p.los_probability_override.value_or(NAN)})
    hash_double(h, v);
  for (double v : {cfg.beta_db, cfg.noise_w, cfg.bandwidth_multiplier, cfg.bias, cfg.rate3_mbps, cfg.rate4_mbps,
                   cfg.user_height_m, static_cast<double>(cfg.iterations), static_cast<double>(cfg.seed),
                   cfg.cross_tech_interference ? 1.0 : 0.0})
    hash_double(h, v);
  hash_text(h, std::to_string(cfg.seed));
  hash_text(h, serialize_sites(scenario.sites));
  hash_text(h, serialize_sites(scenario.candidates));
  for (double d : scenario.population.density) hash_double(h, d);
  return h;
}

// --- maps --------------------------------------------------------------------

RateMap simulate_map(const Scenario& scenario, const SimConfig& cfg, const MapOptions& options) {
  cfg.validate();
  const auto& aoi = scenario.aoi;
  const auto sites = active_transmitters(scenario.sites, aoi.frame());
  if (sites.empty()) throw NoActiveBsError();
  if (options.mask && options.mask->size() != aoi.cell_count())
    throw ConfigError("cell mask does not match the grid");
  if (options.base && (options.base->cells.size() != aoi.cell_count()))
    throw ConfigError("base map does not match the grid");

  RateMap map;
  map.aoi = aoi;
  for (const auto& s : sites) map.site_ids.push_back(s.id);
  map.cells.resize(aoi.cell_count());
  map.fingerprint = scenario_fingerprint(scenario, cfg);
  map.aoi_fingerprint = aoi_fingerprint(aoi);

  const std::size_t rows = aoi.rows(), cols = aoi.cols();
  std::atomic<std::size_t> next_row{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::size_t r = next_row++; r < rows; r = next_row++) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t idx = r * cols + c;
          if (options.mask && !(*options.mask)[idx]) {
            if (options.base) map.cells[idx] = options.base->cells[idx];
            continue;
          }
          map.cells[idx] = simulate_cell(aoi.cell_center(r, c), static_cast<std::uint32_t>(r),
                                         static_cast<std::uint32_t>(c), sites, scenario.preset, cfg);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_row = rows;
    }
  };

  const unsigned workers = std::clamp<unsigned>(options.workers, 1, static_cast<unsigned>(rows));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return map;
}

namespace {

void require_same_grid(const RateMap& map, const PopulationGrid& pop) {
  if (map.rows() != pop.rows() || map.cols() != pop.cols() || map.cells.size() != pop.density.size())
    throw ConfigError("rate map and population grid dimensions differ");
}

} // namespace

double population_weighted_average(const RateMap& map, const PopulationGrid& pop) {
  require_same_grid(map, pop);
  double weighted = 0.0, total = 0.0;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const double w = pop.population(i);
    weighted += w * map.cells[i].rate_lb_mbps;
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("zero total population");
  return weighted / total;
}

MapSummary summarize(const RateMap& map, const PopulationGrid& pop) {
  MapSummary s;
  s.avg_rate_mbps = population_weighted_average(map, pop);
  double total = 0.0, var = 0.0, pcov = 0.0, share4 = 0.0, mean4 = 0.0;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const auto& c = map.cells[i];
    const double w = pop.population(i);
    total += w;
    var += w * w * c.rate_se_mbps * c.rate_se_mbps;
    pcov += w * c.p_cov;
    share4 += w * c.share4;
    mean4 += c.share4;
  }
  s.total_population = total;
  s.rate_se_mbps = std::sqrt(var) / total;
  s.avg_p_cov = pcov / total;
  s.share4 = share4 / total;
  s.mean_share4 = mean4 / static_cast<double>(map.cells.size());
  return s;
}

MapDelta diff_maps(const RateMap& before, const RateMap& after) {
  if (before.rows() != after.rows() || before.cols() != after.cols() ||
      before.cells.size() != after.cells.size())
    throw ConfigError("rate maps have different dimensions");
  if (before.aoi_fingerprint != after.aoi_fingerprint) throw ConfigError("rate maps cover different areas");
  MapDelta d;
  d.rows = before.rows();
  d.cols = before.cols();
  d.delta_mbps.resize(before.cells.size());
  for (std::size_t i = 0; i < d.delta_mbps.size(); ++i) {
    const double v = after.cells[i].rate_lb_mbps - before.cells[i].rate_lb_mbps;
    d.delta_mbps[i] = v;
    d.max_gain = std::max(d.max_gain, v);
    d.max_loss = std::min(d.max_loss, v);
    d.degraded_cells += v < 0.0;
  }
  d.fraction_degraded =
      d.delta_mbps.empty() ? 0.0 : static_cast<double>(d.degraded_cells) / static_cast<double>(d.delta_mbps.size());
  return d;
}

} // namespace wtbs
