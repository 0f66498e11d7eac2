// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "wtbs/channel.hpp"
#include "wtbs/export.hpp"
#include "wtbs/network_sim.hpp"
#include "wtbs/planner.hpp"
#include "wtbs/random.hpp"
#include "wtbs/scenario.hpp"

#include "fixtures.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

namespace {

using namespace wtbs;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Transmitter g4_transmitter(const std::string& id, PlanarPoint pos) {
  Transmitter t;
  t.id = id;
  t.position = pos;
  t.height_m = 100.0;
  t.tx_power_w = 11.0;
  t.tech = Tech::G4;
  t.stream_key = fnv1a64(id);
  return t;
}

EnvironmentPreset always_los(double m) {
  auto p = EnvironmentPreset::rural();
  p.los_probability_override = 1.0;
  p.m_los = m;
  return p;
}

Outcome noise_only_oracle() {
  const auto t0 = Clock::now();
  const std::vector<Transmitter> sites{g4_transmitter("bs", {0, 0})};
  bool ok = true;
  double worst = 0.0;
  std::uint32_t cell = 0;
  for (double m : {1.0, 2.0}) {
    const auto preset = always_los(m);
    const double mean_power = mean_rx_power(11.0, additional_loss(Tech::G4, preset), 100.0, preset.alpha_los);
    for (double t : {0.1, std::numbers::ln2, 2.0}) {
      SimConfig cfg;
      cfg.iterations = 10000;
      cfg.noise_w = t * mean_power / cfg.beta_linear();
      const auto r = simulate_cell({0, 0}, 0, cell++, sites, preset, cfg);
      const double p = boost::math::gamma_q(m, m * t);
      const double tol = 4.0 * std::sqrt(p * (1.0 - p) / 1e4);
      worst = std::max(worst, std::abs(r.p_cov - p) / tol);
      ok = ok && std::abs(r.p_cov - p) <= tol;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "worst |error|/tolerance " << worst << ", " << secs << " s";
  return {ok && secs < 5.0, d.str()};
}

Outcome interference_oracle() {
  const auto t0 = Clock::now();
  const std::vector<Transmitter> sites{g4_transmitter("a", {0, 0}), g4_transmitter("b", {0, 0})};
  SimConfig cfg;
  cfg.iterations = 10000;
  cfg.noise_w = 1e-30;
  const auto r = simulate_cell({25, 0}, 0, 0, sites, always_los(1.0), cfg);
  const double expected = 1.0 / (1.0 + std::pow(10.0, -0.5));
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "p_cov " << r.p_cov << " vs " << expected << ", " << secs << " s";
  return {std::abs(r.p_cov - expected) <= 0.02 && secs < 5.0, d.str()};
}

Outcome los_curve() {
  const auto rural = EnvironmentPreset::rural();
  const double at_sa = los_probability(4.88, rural);
  bool ok = at_sa == 1.0 / 5.88 && std::abs(at_sa - 0.17007) < 5e-6;
  double prev = -1.0;
  for (int i = 0; i <= 180; ++i) {
    const double p = los_probability(0.5 * i, rural);
    ok = ok && p > prev;
    prev = p;
  }
  const double p90 = los_probability(90.0, rural);
  ok = ok && p90 > 1.0 - 1e-12;
  std::ostringstream d;
  d.precision(12);
  d << "p_los(4.88) " << at_sa << ", p_los(90) " << p90;
  return {ok, d.str()};
}

Outcome default_config_fidelity() {
  const auto golden = testing::slurp(testing::source_dir() / "tests/golden/default_config.cfg");
  const auto cfg = default_config();
  bool ok = serialize_config(cfg) == golden && parse_config(golden) == cfg;
  const auto& r = cfg.presets.at("rural");
  const auto& s = cfg.presets.at("suburban");
  for (const auto* p : {&r, &s})
    ok = ok && p->alpha_los == 2.2 && p->m_los == 2.0 && p->alpha_nlos == 3.2 && p->m_nlos == 1.0;
  ok = ok && r.eta3_db == -0.1 && r.eta4_db == -21.0 && r.s_a == 4.88 && r.s_b == 0.429;
  ok = ok && s.eta3_db == -1.0 && s.eta4_db == -20.0 && s.s_a == 9.6117 && s.s_b == 0.1581;
  ok = ok && cfg.sim.beta_db == -5.0 && cfg.sim.noise_w == 1e-12 && cfg.sim.iterations == 10000;
  ok = ok && cfg.sim.rate3_mbps == 2.0 && cfg.sim.rate4_mbps == 17.5;
  ok = ok && cfg.site_defaults.ct_power_w == 10.0 && cfg.site_defaults.ct_height_m == 30.0;
  ok = ok && cfg.site_defaults.wt_power_w == 11.0 && cfg.site_defaults.wt_height_m == 100.0;
  return {ok, ok ? "golden file and parameter values match" : "default configuration differs"};
}

Outcome bias_monotonicity(const ScenarioBundle& france) {
  const auto t0 = Clock::now();
  const auto sweep = bias_sweep(france.scenario, france.config.sim, {1, 5, 10, 22, 29, 100});
  bool ok = true;
  for (std::size_t i = 1; i < sweep.share4.size(); ++i) ok = ok && sweep.share4[i] >= sweep.share4[i - 1];
  ok = ok && sweep.share4.back() > sweep.share4.front();
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "share4";
  for (double v : sweep.share4) d << ' ' << v;
  d << ", " << secs << " s";
  return {ok && secs < 60.0, d.str()};
}

Outcome workflow(const ScenarioBundle& france, RateMap& baseline_out) {
  const auto t0 = Clock::now();
  const auto& base = france.scenario;
  const auto& cfg = france.config.sim;
  const auto& pop = base.population;
  bool ok = base.aoi.rows() == 100 && base.aoi.cols() == 100 && cfg.iterations == 10000;

  baseline_out = simulate_map(base, cfg);
  const auto s0 = summarize(baseline_out, pop);

  const auto all = CandidateSet::from_scenario(base);
  std::set<std::string> existing;
  for (const auto& c : all.items)
    if (c.existing) existing.insert(c.site.id);
  const auto equipped = apply_equipment(base, all, existing);
  const auto equipped_map = simulate_map(equipped, cfg);
  const auto s1 = summarize(equipped_map, pop);
  const double se01 = std::hypot(s0.rate_se_mbps, s1.rate_se_mbps);
  const bool a = s1.avg_rate_mbps - s0.avg_rate_mbps > 4.0 * se01;

  const auto fresh = CandidateSet::from_scenario(equipped);
  const auto plan = greedy_select(equipped, fresh, 2, cfg);
  std::set<std::string> chosen(plan.selected.begin(), plan.selected.end());
  const auto final_map = simulate_map(apply_equipment(equipped, fresh, chosen), cfg);
  const auto s2 = summarize(final_map, pop);
  const bool b = plan.selected.size() == 2 && s2.avg_rate_mbps > s1.avg_rate_mbps &&
                 s2.avg_rate_mbps == plan.metric_after;

  const auto d02 = diff_maps(baseline_out, final_map);
  const bool c = d02.degraded_cells >= 1;

  const double secs = seconds_since(t0);
  ok = ok && a && b && c && secs < 300.0;
  std::ostringstream d;
  d << "baseline " << s0.avg_rate_mbps << " -> equipped " << s1.avg_rate_mbps << " (+"
    << (s1.avg_rate_mbps - s0.avg_rate_mbps) / se01 << " SE) -> greedy";
  for (const auto& id : plan.selected) d << ' ' << id;
  d << ' ' << s2.avg_rate_mbps << " Mbps, " << d02.degraded_cells << " degraded cells, " << secs << " s";
  return {ok, d.str()};
}

Outcome planner_oracle() {
  const auto t0 = Clock::now();
  const auto bundle = load_bundle(testing::scenario_dir("planner-5"));
  const auto candidates = CandidateSet::from_scenario(bundle.scenario);
  const auto& cfg = bundle.config.sim;
  bool ok = candidates.size() == 5 && bundle.scenario.aoi.rows() == 40 && bundle.scenario.aoi.cols() == 40;
  const auto greedy = greedy_select(bundle.scenario, candidates, 2, cfg);
  const auto exhaustive = exhaustive_select(bundle.scenario, candidates, 2, cfg);
  ok = ok && exhaustive.metric_after >= greedy.metric_after && greedy.metric_after >= 0.95 * exhaustive.metric_after;
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "greedy " << greedy.metric_after << ", exhaustive " << exhaustive.metric_after << ", " << secs << " s";
  return {ok && secs < 180.0, d.str()};
}

std::string raw_bytes(const RateMap& map) {
  std::string out = ratemap_csv(map);
  auto put = [&out](const auto& v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  for (const auto& c : map.cells) {
    put(c.p_cov);
    put(c.rate_lb_mbps);
    put(c.share4);
    put(c.rate_se_mbps);
    put(c.clamped_links);
    for (auto h : c.serving_histogram) put(h);
  }
  put(map.fingerprint);
  return out;
}

Outcome determinism(const ScenarioBundle& france, const RateMap& france_w1) {
  const auto t0 = Clock::now();
  const auto p5 = load_bundle(testing::scenario_dir("planner-5"));
  const auto a = raw_bytes(simulate_map(p5.scenario, p5.config.sim, {.workers = 1}));
  const auto b = raw_bytes(simulate_map(p5.scenario, p5.config.sim, {.workers = 1}));
  const auto c = raw_bytes(simulate_map(p5.scenario, p5.config.sim, {.workers = 4}));
  const auto f1 = raw_bytes(france_w1);
  const auto f4 = raw_bytes(simulate_map(france.scenario, france.config.sim, {.workers = 4}));
  const bool ok = a == b && a == c && f1 == f4;
  std::ostringstream d;
  d << "planner-5 runs " << (a == b ? "identical" : "differ") << ", workers 1/4 "
    << (a == c ? "identical" : "differ") << "; synthetic-france workers 1/4 " << (f1 == f4 ? "identical" : "differ")
    << ", " << seconds_since(t0) << " s";
  return {ok, d.str()};
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

} // namespace

int main() {
  std::cout.precision(6);
  const auto france = load_bundle(testing::scenario_dir("synthetic-france"));
  RateMap france_baseline;

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"noise-only coverage oracle", noise_only_oracle},
      {"interference oracle", interference_oracle},
      {"LoS curve", los_curve},
      {"default parameter fidelity", default_config_fidelity},
      {"bias monotonicity", [&] { return bias_monotonicity(france); }},
      {"workflow reproduction", [&] { return workflow(france, france_baseline); }},
      {"planner oracle", planner_oracle},
      {"determinism", [&] { return determinism(france, france_baseline); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto r = guarded(criteria[i].second);
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << r.detail
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
