// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/planner.hpp"

#include "wtbs/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace wtbs {

CandidateSet CandidateSet::from_scenario(const Scenario& scenario) {
  CandidateSet set;
  for (const auto& s : scenario.sites)
    if (s.structure == Structure::WindTurbine && s.tech == Tech::Unequipped) set.items.push_back({s, true});
  for (const auto& s : scenario.candidates) set.items.push_back({s, false});
  return set;
}

const Candidate* CandidateSet::find(const std::string& id) const {
  for (const auto& c : items)
    if (c.site.id == id) return &c;
  return nullptr;
}

Scenario apply_equipment(const Scenario& scenario, const CandidateSet& candidates,
                         const std::set<std::string>& equip_ids) {
  for (const auto& id : equip_ids)
    if (!candidates.find(id)) throw ConfigError("unknown candidate id '" + id + "'");

  Scenario out = scenario;
  for (auto& s : out.sites)
    if (equip_ids.count(s.id)) s.tech = Tech::G4;
  for (const auto& c : candidates.items) {
    if (c.existing || !equip_ids.count(c.site.id)) continue;
    auto site = c.site;
    site.tech = Tech::G4;
    out.sites.push_back(std::move(site));
    std::erase_if(out.candidates, [&](const SiteRecord& r) { return r.id == c.site.id; });
  }
  out.sites = dedupe_farms(std::move(out.sites));
  return out;
}

namespace {

std::vector<std::uint8_t> populated_mask(const PopulationGrid& pop) {
  std::vector<std::uint8_t> mask(pop.density.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = pop.density[i] > 0.0;
  return mask;
}

Evaluation evaluate_scenario(const Scenario& s, const SimConfig& cfg, const std::vector<std::uint8_t>& mask,
                             unsigned workers) {
  Evaluation e;
  if (active_transmitters(s.sites, s.aoi.frame()).empty()) {
    if (!(s.population.total_population() > 0.0)) throw ConfigError("zero total population");
    e.no_active_bs = true;
    return e;
  }
  MapOptions opts;
  opts.workers = workers;
  opts.mask = &mask;
  const auto map = simulate_map(s, cfg, opts);
  const auto summary = summarize(map, s.population);
  e.metric_mbps = summary.avg_rate_mbps;
  e.standard_error = summary.rate_se_mbps;
  return e;
}

} // namespace

Evaluation evaluate(const Scenario& scenario, const CandidateSet& candidates, const std::set<std::string>& equip_ids,
                    const SimConfig& cfg, const PlanOptions& options) {
  const auto mask = populated_mask(scenario.population);
  auto e = evaluate_scenario(apply_equipment(scenario, candidates, equip_ids), cfg, mask, options.workers);
  if (options.on_evaluation) options.on_evaluation(equip_ids, e);
  return e;
}

PlacementPlan greedy_select(const Scenario& scenario, const CandidateSet& candidates, std::size_t k,
                            const SimConfig& cfg, const PlanOptions& options) {
  if (k > candidates.size()) throw ConfigError("k exceeds the number of candidates");
  PlacementPlan plan;
  std::set<std::string> chosen;
  const auto baseline = evaluate(scenario, candidates, chosen, cfg, options);
  ++plan.evaluations;
  plan.metric_before = plan.metric_after = baseline.metric_mbps;

  std::vector<std::string> ids;
  for (const auto& c : candidates.items) ids.push_back(c.site.id);
  std::sort(ids.begin(), ids.end());

  for (std::size_t round = 0; round < k; ++round) {
    struct Scored {
      std::string id;
      Evaluation eval;
    };
    std::vector<Scored> scored;
    for (const auto& id : ids) {
      if (chosen.count(id)) continue;
      auto trial = chosen;
      trial.insert(id);
      scored.push_back({id, evaluate(scenario, candidates, trial, cfg, options)});
      ++plan.evaluations;
    }
    const auto best = std::max_element(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      return a.eval.metric_mbps < b.eval.metric_mbps;
    });
    const double floor = best->eval.metric_mbps - options.tie_tolerance_se * best->eval.standard_error;
    // `scored` is in id order, so the first entry above the floor is the lowest tied id.
    const auto pick = std::find_if(scored.begin(), scored.end(),
                                   [&](const Scored& s) { return s.eval.metric_mbps >= floor; });
    chosen.insert(pick->id);
    plan.selected.push_back(pick->id);
    plan.per_step_metrics.push_back(pick->eval.metric_mbps);
    plan.per_step_se.push_back(pick->eval.standard_error);
    plan.metric_after = pick->eval.metric_mbps;
  }
  return plan;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t num = n - k + i;
    if (r > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
    r = r * num / i;
  }
  return r;
}

PlacementPlan exhaustive_select(const Scenario& scenario, const CandidateSet& candidates, std::size_t k,
                                const SimConfig& cfg, const PlanOptions& options) {
  if (k > candidates.size()) throw ConfigError("k exceeds the number of candidates");
  if (binomial(candidates.size(), k) > options.exhaustive_limit)
    throw ConfigError("exhaustive search over " + std::to_string(candidates.size()) + " choose " +
                      std::to_string(k) + " subsets exceeds the limit; use greedy selection");

  std::vector<std::string> ids;
  for (const auto& c : candidates.items) ids.push_back(c.site.id);
  std::sort(ids.begin(), ids.end());

  PlacementPlan plan;
  const auto baseline = evaluate(scenario, candidates, {}, cfg, options);
  ++plan.evaluations;
  plan.metric_before = plan.metric_after = baseline.metric_mbps;
  if (k == 0) return plan;

  // Index combinations in lexicographic order; strict improvement keeps the
  // lexicographically smallest id set on exact ties.
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::string> best_set;
  Evaluation best{-1.0, 0.0, false};
  for (;;) {
    std::set<std::string> trial;
    for (auto i : idx) trial.insert(ids[i]);
    const auto e = evaluate(scenario, candidates, trial, cfg, options);
    ++plan.evaluations;
    if (e.metric_mbps > best.metric_mbps) {
      best = e;
      best_set.assign(trial.begin(), trial.end());
    }
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == ids.size() - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }

  plan.selected = best_set;
  std::set<std::string> prefix;
  for (std::size_t i = 0; i + 1 < best_set.size(); ++i) {
    prefix.insert(best_set[i]);
    const auto e = evaluate(scenario, candidates, prefix, cfg, options);
    ++plan.evaluations;
    plan.per_step_metrics.push_back(e.metric_mbps);
    plan.per_step_se.push_back(e.standard_error);
  }
  plan.per_step_metrics.push_back(best.metric_mbps);
  plan.per_step_se.push_back(best.standard_error);
  plan.metric_after = best.metric_mbps;
  return plan;
}

BiasSweep bias_sweep(const Scenario& scenario, const SimConfig& cfg, const std::vector<double>& bias_values,
                     const PlanOptions& options) {
  if (bias_values.empty()) throw ConfigError("bias list is empty");
  for (double b : bias_values)
    if (!(b >= 1.0)) throw ConfigError("bias values must be >= 1");

  BiasSweep sweep;
  sweep.biases = bias_values;
  const auto mask = populated_mask(scenario.population);
  double best_metric = -1.0;
  for (double b : bias_values) {
    auto c = cfg;
    c.bias = b;
    MapOptions opts;
    opts.workers = options.workers;
    opts.mask = &mask;
    const auto summary = summarize(simulate_map(scenario, c, opts), scenario.population);
    sweep.metrics.push_back(summary.avg_rate_mbps);
    sweep.share4.push_back(summary.share4);
    if (summary.avg_rate_mbps > best_metric ||
        (summary.avg_rate_mbps == best_metric && b < sweep.best_bias)) {
      best_metric = summary.avg_rate_mbps;
      sweep.best_bias = b;
    }
  }
  return sweep;
}

} // namespace wtbs
