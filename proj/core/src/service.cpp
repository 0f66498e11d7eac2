// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/service.hpp"

#include "wtbs/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace wtbs {

using nlohmann::json;

namespace {

const char* kind_name(Mutation::Kind k) {
  switch (k) {
  case Mutation::Kind::AddSite: return "add_site";
  case Mutation::Kind::Equip: return "equip";
  case Mutation::Kind::Remove: return "remove";
  case Mutation::Kind::ConfirmPlan: return "confirm_plan";
  }
  return "add_site";
}

Mutation::Kind kind_from(const std::string& s) {
  if (s == "add_site") return Mutation::Kind::AddSite;
  if (s == "equip") return Mutation::Kind::Equip;
  if (s == "remove") return Mutation::Kind::Remove;
  if (s == "confirm_plan") return Mutation::Kind::ConfirmPlan;
  throw ConfigError("unknown mutation kind '" + s + "'");
}

json to_json(const Mutation& m) {
  json j{{"kind", kind_name(m.kind)}};
  switch (m.kind) {
  case Mutation::Kind::AddSite:
    j["site_id"] = m.site_id;
    j["lat"] = m.position.lat;
    j["lon"] = m.position.lon;
    j["height_m"] = m.height_m;
    j["power_w"] = m.power_w;
    break;
  case Mutation::Kind::Equip:
  case Mutation::Kind::Remove: j["site_id"] = m.site_id; break;
  case Mutation::Kind::ConfirmPlan: j["selected"] = m.selected; break;
  }
  return j;
}

Mutation mutation_from_json(const json& j) {
  Mutation m;
  m.kind = kind_from(j.at("kind").get<std::string>());
  m.site_id = j.value("site_id", "");
  m.position = {j.value("lat", 0.0), j.value("lon", 0.0)};
  m.height_m = j.value("height_m", 0.0);
  m.power_w = j.value("power_w", 0.0);
  m.selected = j.value("selected", std::vector<std::string>{});
  return m;
}

json to_json(const MapSummary& s) {
  return {{"avg_rate_mbps", s.avg_rate_mbps},
          {"rate_se_mbps", s.rate_se_mbps},
          {"avg_p_cov", s.avg_p_cov},
          {"share4", s.share4},
          {"mean_share4", s.mean_share4},
          {"total_population", s.total_population}};
}

json to_json(const SiteRecord& s) {
  json j{{"id", s.id},
         {"lat", s.position.lat},
         {"lon", s.position.lon},
         {"structure", to_string(s.structure)},
         {"tech", to_string(s.tech)},
         {"height_m", s.height_m},
         {"power_w", s.tx_power_w}};
  j["farm_id"] = s.farm_id ? json(*s.farm_id) : json(nullptr);
  return j;
}

json to_json(const PlacementPlan& p) {
  return {{"selected", p.selected},
          {"metric_before", p.metric_before},
          {"metric_after", p.metric_after},
          {"per_step_metrics", p.per_step_metrics},
          {"per_step_se", p.per_step_se},
          {"evaluations", p.evaluations}};
}

json bbox_json(const AreaOfInterest& aoi) {
  return {{"min_lat", aoi.min().lat}, {"min_lon", aoi.min().lon}, {"max_lat", aoi.max().lat}, {"max_lon", aoi.max().lon}};
}

std::string random_token() {
  static std::mutex m;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard lock(m);
  std::ostringstream ss;
  ss << std::hex;
  for (int i = 0; i < 2; ++i) {
    ss.width(16);
    ss.fill('0');
    ss << gen();
  }
  return ss.str();
}

bool has_site(const Scenario& s, const std::string& id) {
  const auto same = [&](const SiteRecord& r) { return r.id == id; };
  return std::any_of(s.sites.begin(), s.sites.end(), same) ||
         std::any_of(s.candidates.begin(), s.candidates.end(), same);
}

} // namespace

double influence_radius_m(const SiteRecord& site, const EnvironmentPreset& preset, double noise_w,
                          double user_height_m) {
  if (!site.equipped()) return 0.0;
  const auto reach = [&](Visibility v) {
    const double eta = additional_loss(site.tech, v, preset);
    return std::pow(site.tx_power_w * eta / noise_w, 1.0 / preset.alpha(v));
  };
  const double r = std::max(reach(Visibility::LoS), reach(Visibility::NLoS));
  const double dh = site.height_m - user_height_m;
  return std::sqrt(std::max(0.0, r * r - dh * dh));
}

// --- sessions ----------------------------------------------------------------

struct PlannerService::Session {
  std::string id;
  BundleTexts bundle;
  SimConfig cfg;
  std::shared_ptr<const SessionState> baseline;

  std::mutex mutate_mutex;
  mutable std::mutex publish_mutex;
  std::shared_ptr<const SessionState> current;

  std::atomic<bool> plan_running{false};
  struct Pending {
    std::uint64_t revision;
    PlacementPlan plan;
  };
  std::optional<Pending> pending; // guarded by mutate_mutex

  std::shared_ptr<const SessionState> load() const {
    std::lock_guard lock(publish_mutex);
    return current;
  }
  void publish(std::shared_ptr<const SessionState> s) {
    std::lock_guard lock(publish_mutex);
    current = std::move(s);
  }
};

namespace {

struct Applied {
  std::shared_ptr<SessionState> state;
  std::size_t recomputed = 0;
};

/// Pure transition prev --m--> next; shared by live mutations and replay.
Applied apply_mutation(const SessionState& prev, const Mutation& m, const SimConfig& cfg,
                       const ServiceOptions& opt) {
  Scenario next = prev.scenario;
  bool full = opt.full_recompute;

  switch (m.kind) {
  case Mutation::Kind::AddSite: {
    if (!next.aoi.contains(m.position)) throw ServiceError(422, "position outside the area of interest");
    if (has_site(next, m.site_id)) throw ServiceError(409, "site id '" + m.site_id + "' already exists");
    SiteRecord s;
    s.id = m.site_id;
    s.position = m.position;
    s.structure = Structure::WindTurbine;
    s.tech = Tech::G4;
    s.height_m = m.height_m;
    s.tx_power_w = m.power_w;
    try {
      s.validate();
    } catch (const ConfigError& e) {
      throw ServiceError(400, e.what());
    }
    next.sites.push_back(std::move(s));
    next.sites = dedupe_farms(std::move(next.sites));
    break;
  }
  case Mutation::Kind::Equip: {
    const auto it = std::find_if(next.sites.begin(), next.sites.end(),
                                 [&](const SiteRecord& r) { return r.id == m.site_id; });
    const bool candidate = std::any_of(next.candidates.begin(), next.candidates.end(),
                                       [&](const SiteRecord& r) { return r.id == m.site_id; });
    if (it == next.sites.end() && !candidate) throw ServiceError(404, "unknown site '" + m.site_id + "'");
    if (it != next.sites.end() && it->equipped()) throw ServiceError(409, "site '" + m.site_id + "' is already equipped");
    next = apply_equipment(next, CandidateSet::from_scenario(next), {m.site_id});
    break;
  }
  case Mutation::Kind::Remove: {
    const auto before = next.sites.size();
    std::erase_if(next.sites, [&](const SiteRecord& r) { return r.id == m.site_id; });
    if (next.sites.size() == before) throw ServiceError(404, "unknown site '" + m.site_id + "'");
    next.sites = dedupe_farms(std::move(next.sites));
    break;
  }
  case Mutation::Kind::ConfirmPlan: {
    const auto candidates = CandidateSet::from_scenario(next);
    const std::set<std::string> ids(m.selected.begin(), m.selected.end());
    for (const auto& id : ids)
      if (!candidates.find(id)) throw ServiceError(409, "plan candidate '" + id + "' is no longer available");
    next = apply_equipment(next, candidates, ids);
    full = true;
    break;
  }
  }

  // Sites whose contribution to the map changed.
  std::map<std::string, const SiteRecord*> before_active, after_active;
  for (const auto& s : prev.scenario.sites)
    if (s.equipped()) before_active[s.id] = &s;
  for (const auto& s : next.sites)
    if (s.equipped()) after_active[s.id] = &s;
  if (after_active.empty()) throw ServiceError(409, "mutation would leave no active BS");
  std::vector<const SiteRecord*> changed;
  for (const auto& [id, s] : before_active) {
    const auto it = after_active.find(id);
    if (it == after_active.end() || !(*it->second == *s)) changed.push_back(s);
  }
  for (const auto& [id, s] : after_active)
    if (!before_active.count(id)) changed.push_back(s);

  const auto& aoi = next.aoi;
  std::vector<std::uint8_t> mask(aoi.cell_count(), full ? 1 : 0);
  if (!full) {
    for (const auto* s : changed) {
      const double radius = opt.influence_radius_m.value_or(
          influence_radius_m(*s, next.preset, cfg.noise_power_w(), cfg.user_height_m));
      const PlanarPoint p = project(s->position, aoi.frame());
      for (std::size_t r = 0; r < aoi.rows(); ++r)
        for (std::size_t c = 0; c < aoi.cols(); ++c) {
          const auto q = aoi.cell_center(r, c);
          if (std::hypot(q.x - p.x, q.y - p.y) <= radius) mask[r * aoi.cols() + c] = 1;
        }
    }
  }

  auto state = std::make_shared<SessionState>();
  MapOptions mo;
  mo.workers = opt.workers;
  mo.mask = &mask;
  mo.base = &prev.map;
  state->map = simulate_map(next, cfg, mo);
  state->metrics = summarize(state->map, next.population);
  state->scenario = std::move(next);
  state->revision = prev.revision + 1;
  state->edit_log = prev.edit_log;
  state->edit_log.push_back(m);
  return {state, static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1))};
}

} // namespace

PlannerService::PlannerService(ServiceOptions options) : options_(std::move(options)) {
  if (options_.state_dir) {
    std::filesystem::create_directories(*options_.state_dir);
    restore();
  }
}

PlannerService::~PlannerService() = default;

std::shared_ptr<PlannerService::Session> PlannerService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  return it->second;
}

std::string PlannerService::register_session(const BundleTexts& bundle, std::string id,
                                             const std::vector<Mutation>& log) {
  ScenarioBundle loaded;
  try {
    loaded = load_bundle_from_texts(bundle);
  } catch (const std::exception& e) {
    throw ServiceError(400, e.what());
  }
  const auto& aoi = loaded.scenario.aoi;
  if (aoi.rows() > options_.max_rows || aoi.cols() > options_.max_cols)
    throw ServiceError(413, "grid of " + std::to_string(aoi.rows()) + "x" + std::to_string(aoi.cols()) +
                                " cells exceeds the session cap of " + std::to_string(options_.max_rows) + "x" +
                                std::to_string(options_.max_cols));
  if (!(loaded.scenario.population.total_population() > 0.0)) throw ServiceError(400, "zero total population");

  auto session = std::make_shared<Session>();
  session->id = std::move(id);
  session->bundle = bundle;
  session->cfg = loaded.config.sim;

  auto base = std::make_shared<SessionState>();
  base->scenario = std::move(loaded.scenario);
  try {
    MapOptions mo;
    mo.workers = options_.workers;
    base->map = simulate_map(base->scenario, session->cfg, mo);
  } catch (const NoActiveBsError&) {
    throw ServiceError(400, "scenario has no active BS");
  }
  base->metrics = summarize(base->map, base->scenario.population);
  session->baseline = base;

  std::shared_ptr<const SessionState> cur = base;
  for (const auto& m : log) cur = apply_mutation(*cur, m, session->cfg, options_).state;
  session->current = cur;

  {
    std::unique_lock lock(sessions_mutex_);
    if (!sessions_.emplace(session->id, session).second) throw ServiceError(409, "session id collision");
  }
  persist(*session);
  return session->id;
}

std::string PlannerService::create_session(const BundleTexts& bundle) {
  return register_session(bundle, random_token(), {});
}

std::string PlannerService::create_session(const std::filesystem::path& bundle_path) {
  BundleTexts texts;
  try {
    texts = read_bundle_texts(bundle_path);
  } catch (const std::exception& e) {
    throw ServiceError(400, e.what());
  }
  return create_session(texts);
}

std::shared_ptr<const SessionState> PlannerService::state(const std::string& session) const {
  return find(session)->load();
}

const RateMap& PlannerService::baseline_map(const std::string& session) const { return find(session)->baseline->map; }

MapSummary PlannerService::baseline_metrics(const std::string& session) const {
  return find(session)->baseline->metrics;
}

MutationResult PlannerService::mutate(Session& s, Mutation m) {
  std::lock_guard lock(s.mutate_mutex);
  const auto prev = s.load();
  if (m.kind == Mutation::Kind::AddSite) {
    std::size_t n = 1 + static_cast<std::size_t>(std::count_if(prev->edit_log.begin(), prev->edit_log.end(), [](const Mutation& x) {
                      return x.kind == Mutation::Kind::AddSite;
                    }));
    do m.site_id = "wtbs-" + std::to_string(n++);
    while (has_site(prev->scenario, m.site_id));
  }
  Applied applied;
  try {
    applied = apply_mutation(*prev, m, s.cfg, options_);
  } catch (const ConfigError& e) {
    throw ServiceError(409, e.what());
  }
  MutationResult r;
  r.previous_metrics = prev->metrics;
  r.delta = diff_maps(prev->map, applied.state->map);
  r.recomputed_cells = applied.recomputed;
  r.site_id = m.site_id;
  r.state = applied.state;
  s.publish(applied.state);
  persist(s);
  return r;
}

MutationResult PlannerService::add_wtbs(const std::string& session, GeoPoint position, std::optional<double> height_m,
                                        std::optional<double> power_w) {
  auto s = find(session);
  const SiteDefaults defaults = parse_config(s->bundle.config).site_defaults;
  Mutation m;
  m.kind = Mutation::Kind::AddSite;
  m.position = position;
  m.height_m = height_m.value_or(defaults.wt_height_m);
  m.power_w = power_w.value_or(defaults.wt_power_w);
  return mutate(*s, m);
}

MutationResult PlannerService::equip_existing(const std::string& session, const std::string& site_id) {
  auto s = find(session);
  Mutation m;
  m.kind = Mutation::Kind::Equip;
  m.site_id = site_id;
  return mutate(*s, m);
}

MutationResult PlannerService::remove_site(const std::string& session, const std::string& site_id) {
  auto s = find(session);
  Mutation m;
  m.kind = Mutation::Kind::Remove;
  m.site_id = site_id;
  return mutate(*s, m);
}

std::vector<double> PlannerService::layer(const std::string& session, MapLayer layer) const {
  auto s = find(session);
  const auto cur = s->load();
  if (layer == MapLayer::Delta) return diff_maps(s->baseline->map, cur->map).delta_mbps;
  return layer_values(cur->map, layer);
}

PlacementPlan PlannerService::run_plan(const std::string& session, std::size_t k) {
  auto s = find(session);
  if (s->plan_running.exchange(true)) throw ServiceError(409, "a plan is already running for this session");
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag = false; }
  } release{s->plan_running};

  if (options_.plan_started_hook) options_.plan_started_hook(session);
  const auto cur = s->load();
  const auto candidates = CandidateSet::from_scenario(cur->scenario);
  if (k > candidates.size())
    throw ServiceError(400, "k = " + std::to_string(k) + " exceeds the " + std::to_string(candidates.size()) +
                                " available candidates");
  PlanOptions po;
  po.workers = options_.workers;
  auto plan = greedy_select(cur->scenario, candidates, k, s->cfg, po);
  {
    std::lock_guard lock(s->mutate_mutex);
    s->pending = Session::Pending{cur->revision, plan};
  }
  return plan;
}

MutationResult PlannerService::confirm_plan(const std::string& session) {
  auto s = find(session);
  Mutation m;
  m.kind = Mutation::Kind::ConfirmPlan;
  {
    std::lock_guard lock(s->mutate_mutex);
    if (!s->pending) throw ServiceError(409, "no pending plan to confirm");
    if (s->pending->revision != s->load()->revision)
      throw ServiceError(409, "session changed since the plan was computed; run the plan again");
    m.selected = s->pending->plan.selected;
    s->pending.reset();
  }
  return mutate(*s, m);
}

RateMap PlannerService::replay(const std::string& session) const {
  auto s = find(session);
  const auto cur = s->load();
  std::shared_ptr<const SessionState> state = s->baseline;
  for (const auto& m : cur->edit_log) state = apply_mutation(*state, m, s->cfg, options_).state;
  return state->map;
}

std::vector<std::string> PlannerService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

// --- persistence -------------------------------------------------------------

void PlannerService::persist(const Session& s) const {
  if (!options_.state_dir) return;
  const auto cur = s.load();
  json j{{"id", s.id},
         {"bundle",
          {{"scenario_cfg", s.bundle.config},
           {"sites_csv", s.bundle.sites},
           {"population_csv", s.bundle.population}}},
         {"edit_log", json::array()}};
  if (s.bundle.candidates) j["bundle"]["candidates_csv"] = *s.bundle.candidates;
  for (const auto& m : cur->edit_log) j["edit_log"].push_back(to_json(m));
  const auto path = *options_.state_dir / (s.id + ".json");
  const auto tmp = *options_.state_dir / (s.id + ".json.tmp");
  write_file(tmp.string(), j.dump(1));
  std::filesystem::rename(tmp, path);
}

void PlannerService::restore() {
  for (const auto& entry : std::filesystem::directory_iterator(*options_.state_dir)) {
    if (entry.path().extension() != ".json") continue;
    const auto j = json::parse(read_text_file(entry.path()));
    BundleTexts b;
    b.config = j.at("bundle").at("scenario_cfg").get<std::string>();
    b.sites = j.at("bundle").at("sites_csv").get<std::string>();
    b.population = j.at("bundle").at("population_csv").get<std::string>();
    if (j.at("bundle").contains("candidates_csv")) b.candidates = j["bundle"]["candidates_csv"].get<std::string>();
    std::vector<Mutation> log;
    for (const auto& m : j.at("edit_log")) log.push_back(mutation_from_json(m));
    register_session(b, j.at("id").get<std::string>(), log);
  }
}

// --- HTTP routing --------------------------------------------------------------

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string item;
  while (std::getline(ss, item, '/'))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

ApiResponse reply(int status, const json& body) { return {status, body.dump()}; }

json mutation_json(const MutationResult& r) {
  json j{{"revision", r.state->revision},
         {"metrics", to_json(r.state->metrics)},
         {"previous_metrics", to_json(r.previous_metrics)},
         {"delta",
          {{"avg_rate_change_mbps", r.state->metrics.avg_rate_mbps - r.previous_metrics.avg_rate_mbps},
           {"max_gain_mbps", r.delta.max_gain},
           {"max_loss_mbps", r.delta.max_loss},
           {"degraded_cells", r.delta.degraded_cells},
           {"fraction_degraded", r.delta.fraction_degraded}}},
         {"recomputed_cells", r.recomputed_cells}};
  if (!r.site_id.empty()) j["site_id"] = r.site_id;
  return j;
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw ServiceError(400, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ServiceError(400, std::string("malformed JSON: ") + e.what());
  }
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ServiceError(400, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return csv::parse_double(v.get<std::string>(), key, 0);
    } catch (const ParseError&) {
    }
  }
  throw ServiceError(400, std::string("field '") + key + "' must be a number");
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_field(j, key);
}

} // namespace

ApiResponse PlannerService::handle(const ApiRequest& req) {
  try {
    const auto parts = split_path(req.path);
    const auto& method = req.method;
    const auto method_not_allowed = [] { return reply(405, {{"error", "method not allowed"}}); };

    if (parts.size() == 1 && parts[0] == "healthz") {
      if (method != "GET") return method_not_allowed();
      return reply(200, {{"status", "ok"}, {"sessions", session_ids().size()}});
    }
    if (parts.empty() || parts[0] != "sessions") return reply(404, {{"error", "no such endpoint"}});

    if (parts.size() == 1) {
      if (method != "POST") return method_not_allowed();
      const auto body = parse_body(req.body);
      std::string id;
      if (body.contains("bundle")) {
        const auto& b = body.at("bundle");
        BundleTexts t;
        try {
          t.config = b.at("scenario_cfg").get<std::string>();
          t.sites = b.at("sites_csv").get<std::string>();
          t.population = b.at("population_csv").get<std::string>();
          if (b.contains("candidates_csv") && !b.at("candidates_csv").is_null())
            t.candidates = b.at("candidates_csv").get<std::string>();
        } catch (const json::exception& e) {
          throw ServiceError(400, std::string("malformed bundle: ") + e.what());
        }
        id = create_session(t);
      } else if (body.contains("path")) {
        if (!options_.allow_server_paths) throw ServiceError(403, "server-side bundle paths are disabled");
        if (!body.at("path").is_string()) throw ServiceError(400, "'path' must be a string");
        id = create_session(std::filesystem::path(body.at("path").get<std::string>()));
      } else {
        throw ServiceError(400, "expected 'bundle' or 'path'");
      }
      const auto st = state(id);
      return reply(201, {{"id", id},
                         {"revision", st->revision},
                         {"metrics", to_json(st->metrics)},
                         {"grid", {{"rows", st->map.rows()}, {"cols", st->map.cols()}}},
                         {"layers",
                          {{"rate", "/sessions/" + id + "/ratemap?layer=rate"},
                           {"p_cov", "/sessions/" + id + "/ratemap?layer=p_cov"},
                           {"share4", "/sessions/" + id + "/ratemap?layer=share4"},
                           {"delta", "/sessions/" + id + "/ratemap?layer=delta"}}}});
    }

    const std::string& id = parts[1];
    if (parts.size() == 2) {
      if (method != "GET") return method_not_allowed();
      const auto st = state(id);
      json sites = json::array(), candidates = json::array(), log = json::array();
      for (const auto& s : st->scenario.sites) sites.push_back(to_json(s));
      for (const auto& s : st->scenario.candidates) candidates.push_back(to_json(s));
      for (const auto& m : st->edit_log) log.push_back(to_json(m));
      const auto& aoi = st->scenario.aoi;
      return reply(200, {{"id", id},
                         {"revision", st->revision},
                         {"metrics", to_json(st->metrics)},
                         {"baseline_metrics", to_json(baseline_metrics(id))},
                         {"grid", {{"rows", aoi.rows()}, {"cols", aoi.cols()}, {"cell_size_m", aoi.cell_size_m()}, {"bbox", bbox_json(aoi)}}},
                         {"sites", sites},
                         {"candidates", candidates},
                         {"edit_log", log},
                         {"fingerprint", std::to_string(st->map.fingerprint)}});
    }

    const std::string& what = parts[2];
    if (what == "sites" && parts.size() == 3) {
      if (method != "POST") return method_not_allowed();
      const auto body = parse_body(req.body);
      const GeoPoint p{number_field(body, "lat"), number_field(body, "lon")};
      const auto r = add_wtbs(id, p, optional_number(body, "height_m"), optional_number(body, "power_w"));
      return reply(201, mutation_json(r));
    }
    if (what == "sites" && parts.size() == 5 && parts[4] == "equip") {
      if (method != "POST") return method_not_allowed();
      return reply(200, mutation_json(equip_existing(id, parts[3])));
    }
    if (what == "sites" && parts.size() == 4) {
      if (method != "DELETE") return method_not_allowed();
      return reply(200, mutation_json(remove_site(id, parts[3])));
    }
    if (what == "ratemap" && parts.size() == 3) {
      if (method != "GET") return method_not_allowed();
      const auto it = req.query.find("layer");
      const std::string name = it == req.query.end() ? "rate" : it->second;
      const auto layer_kind = parse_layer(name);
      if (!layer_kind) throw ServiceError(400, "unknown layer '" + name + "'");
      const auto st = state(id);
      const auto& aoi = st->scenario.aoi;
      std::vector<double> values = layer_kind == MapLayer::Delta
                                       ? diff_maps(baseline_map(id), st->map).delta_mbps
                                       : layer_values(st->map, *layer_kind);
      return reply(200, {{"layer", to_string(*layer_kind)},
                         {"revision", st->revision},
                         {"rows", aoi.rows()},
                         {"cols", aoi.cols()},
                         {"cell_size_m", aoi.cell_size_m()},
                         {"bbox", bbox_json(aoi)},
                         {"row_order", "south_to_north"},
                         {"values", values}});
    }
    if (what == "plan" && parts.size() == 3) {
      if (method != "POST") return method_not_allowed();
      const auto body = parse_body(req.body);
      const double k = body.contains("k") ? number_field(body, "k") : 1.0;
      if (!(k >= 0.0) || k != std::floor(k)) throw ServiceError(400, "'k' must be a non-negative integer");
      const auto st = state(id);
      auto plan = run_plan(id, static_cast<std::size_t>(k));
      auto j = to_json(plan);
      j["revision"] = st->revision;
      j["applied"] = false;
      return reply(200, j);
    }
    if (what == "plan" && parts.size() == 4 && parts[3] == "confirm") {
      if (method != "POST") return method_not_allowed();
      return reply(200, mutation_json(confirm_plan(id)));
    }
    return reply(404, {{"error", "no such endpoint"}});
  } catch (const ServiceError& e) {
    return reply(e.status(), {{"error", e.what()}});
  } catch (const ParseError& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const ConfigError& e) {
    return reply(400, {{"error", e.what()}});
  } catch (const NoActiveBsError& e) {
    return reply(409, {{"error", e.what()}});
  } catch (const std::exception& e) {
    return reply(500, {{"error", e.what()}});
  }
}

} // namespace wtbs
