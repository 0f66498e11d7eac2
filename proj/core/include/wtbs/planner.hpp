// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/planner.hpp
 *
 * Evaluates which turbines to equip with BS hardware. The objective is the
 * population-weighted average rate lower bound over the area of interest.
 * Every evaluation in one planning run uses the same seed, so comparisons
 * between candidate sets share their random numbers.
 */

#pragma once

#include "wtbs/network_sim.hpp"

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace wtbs {

struct Candidate {
  SiteRecord site;
  bool existing = false; ///< an unequipped turbine already in the site list
};

struct CandidateSet {
  std::vector<Candidate> items;

  /// Unequipped turbines in `scenario.sites` followed by `scenario.candidates`.
  static CandidateSet from_scenario(const Scenario& scenario);

  std::size_t size() const noexcept { return items.size(); }
  const Candidate* find(const std::string& id) const;
};

/// Scenario with the given candidates switched to G4 (new positions appended
/// in candidate-list order, so the result does not depend on selection
/// order), followed by the one-per-farm rule. Throws ConfigError on unknown ids.
Scenario apply_equipment(const Scenario& scenario, const CandidateSet& candidates,
                         const std::set<std::string>& equip_ids);

struct Evaluation {
  double metric_mbps = 0.0;
  double standard_error = 0.0;
  /// True when no site was equipped; the metric is then reported as 0.
  bool no_active_bs = false;
};

struct PlanOptions {
  unsigned workers = 1;
  /// Greedy rounds treat candidates within this many standard errors of the
  /// round's best as tied and take the lowest id.
  double tie_tolerance_se = 4.0;
  /// Upper bound on subsets enumerated by exhaustive_select.
  std::size_t exhaustive_limit = 10000;
  /// Called after every evaluation, e.g. for progress output.
  std::function<void(const std::set<std::string>&, const Evaluation&)> on_evaluation;
};

/// Population-weighted average rate with `equip_ids` equipped. Only populated
/// cells are simulated; unpopulated cells carry zero weight.
Evaluation evaluate(const Scenario& scenario, const CandidateSet& candidates, const std::set<std::string>& equip_ids,
                    const SimConfig& cfg, const PlanOptions& options = {});

struct PlacementPlan {
  std::vector<std::string> selected;
  double metric_before = 0.0;
  double metric_after = 0.0;
  std::vector<double> per_step_metrics;
  std::vector<double> per_step_se;
  std::size_t evaluations = 0;
};

/// Forward selection: k rounds, each adding the best remaining candidate.
PlacementPlan greedy_select(const Scenario& scenario, const CandidateSet& candidates, std::size_t k,
                            const SimConfig& cfg, const PlanOptions& options = {});

/// Best k-subset by enumeration; lexicographically smallest id set on ties.
PlacementPlan exhaustive_select(const Scenario& scenario, const CandidateSet& candidates, std::size_t k,
                                const SimConfig& cfg, const PlanOptions& options = {});

struct BiasSweep {
  double best_bias = 1.0;
  std::vector<double> biases;
  std::vector<double> metrics;
  std::vector<double> share4; ///< population-weighted 4G share per bias
};

/// Metric per bias with a common seed; best is the argmax, smallest bias on ties.
BiasSweep bias_sweep(const Scenario& scenario, const SimConfig& cfg, const std::vector<double>& bias_values,
                     const PlanOptions& options = {});

/// n choose k, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

} // namespace wtbs
