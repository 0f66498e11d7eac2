// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/service.hpp
 *
 * Session-oriented planning service behind the HTTP JSON API. Payload
 * schemas are documented in docs/api.md.
 *
 * Each session holds a baseline scenario, an edit log and the rate map of
 * the current revision. Mutations on one session are serialized; every
 * accepted mutation bumps the revision by one and publishes a new immutable
 * state, which readers pick up without blocking writers.
 */

#pragma once

#include "wtbs/export.hpp"
#include "wtbs/network_sim.hpp"
#include "wtbs/planner.hpp"
#include "wtbs/scenario.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace wtbs {

/// Carries the HTTP status the error maps to.
class ServiceError : public std::runtime_error {
public:
  ServiceError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

struct ServiceOptions {
  std::size_t max_rows = 300;
  std::size_t max_cols = 300;
  unsigned workers = 1;
  /// Sessions are snapshotted here (bundle + edit log) and restored on start.
  std::optional<std::filesystem::path> state_dir;
  /// Recompute radius for single-site mutations. Unset: the distance at which
  /// the site's mean received power drops below the noise power.
  std::optional<double> influence_radius_m;
  /// Recompute every cell on every mutation.
  bool full_recompute = false;
  /// Allow `POST /sessions` with a server-side bundle path.
  bool allow_server_paths = true;
  /// Invoked on the planning thread once a plan run has claimed its session.
  std::function<void(const std::string&)> plan_started_hook;
};

struct Mutation {
  enum class Kind { AddSite, Equip, Remove, ConfirmPlan };
  Kind kind = Kind::AddSite;
  std::string site_id;
  GeoPoint position;
  double height_m = 0.0;
  double power_w = 0.0;
  std::vector<std::string> selected;
};

struct SessionState {
  std::uint64_t revision = 0;
  Scenario scenario;
  RateMap map;
  MapSummary metrics;
  std::vector<Mutation> edit_log;
};

struct MutationResult {
  std::shared_ptr<const SessionState> state;
  MapSummary previous_metrics;
  MapDelta delta; ///< vs the previous revision
  std::size_t recomputed_cells = 0;
  std::string site_id;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Horizontal distance beyond which `site` contributes less mean power than
/// `noise_w` in either visibility state.
double influence_radius_m(const SiteRecord& site, const EnvironmentPreset& preset, double noise_w,
                          double user_height_m = 0.0);

class PlannerService {
public:
  explicit PlannerService(ServiceOptions options = {});
  ~PlannerService();

  PlannerService(const PlannerService&) = delete;
  PlannerService& operator=(const PlannerService&) = delete;

  /// Routes one HTTP request; never throws.
  ApiResponse handle(const ApiRequest& request);

  std::string create_session(const BundleTexts& bundle);
  std::string create_session(const std::filesystem::path& bundle_path);

  std::shared_ptr<const SessionState> state(const std::string& session) const;
  const RateMap& baseline_map(const std::string& session) const;
  MapSummary baseline_metrics(const std::string& session) const;

  MutationResult add_wtbs(const std::string& session, GeoPoint position, std::optional<double> height_m = {},
                          std::optional<double> power_w = {});
  MutationResult equip_existing(const std::string& session, const std::string& site_id);
  MutationResult remove_site(const std::string& session, const std::string& site_id);

  std::vector<double> layer(const std::string& session, MapLayer layer) const;

  PlacementPlan run_plan(const std::string& session, std::size_t k);
  MutationResult confirm_plan(const std::string& session);

  /// Rebuilds the current map from the baseline by replaying the edit log.
  RateMap replay(const std::string& session) const;

  std::vector<std::string> session_ids() const;

private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  MutationResult mutate(Session& s, Mutation m);
  void persist(const Session& s) const;
  void restore();
  std::string register_session(const BundleTexts& bundle, std::string id, const std::vector<Mutation>& log);

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

} // namespace wtbs
