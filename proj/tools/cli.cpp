// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include "wtbs/error.hpp"
#include "wtbs/export.hpp"
#include "wtbs/http_server.hpp"
#include "wtbs/planner.hpp"
#include "wtbs/scenario.hpp"
#include "wtbs/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

namespace wtbs::cli {

using nlohmann::ordered_json;

unsigned resolve_workers(const std::optional<unsigned>& flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("WTBS_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

namespace {

/// Runs `body`, mapping exceptions onto exit codes.
int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    log << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  }
}

struct Loaded {
  ScenarioBundle bundle;
  SimConfig cfg;
  unsigned workers = 1;
};

Loaded load(const CommonOptions& opt, std::ostream& log) {
  Loaded l;
  l.bundle = load_bundle(opt.config);
  for (const auto& w : l.bundle.warnings) log << "warning: " << w << "\n";
  l.cfg = l.bundle.config.sim;
  if (opt.seed) l.cfg.seed = *opt.seed;
  if (opt.iterations) {
    if (*opt.iterations < 1) throw ConfigError("--iterations must be >= 1");
    l.cfg.iterations = *opt.iterations;
  }
  l.workers = resolve_workers(opt.workers);
  std::filesystem::create_directories(opt.out);
  return l;
}

std::string out_path(const CommonOptions& opt, const char* name) { return (opt.out / name).string(); }

ordered_json summary_json(const MapSummary& s) {
  return {{"avg_rate_mbps", s.avg_rate_mbps}, {"rate_se_mbps", s.rate_se_mbps},
          {"avg_p_cov", s.avg_p_cov},         {"share4", s.share4},
          {"share3", 1.0 - s.share4},         {"mean_share4", s.mean_share4},
          {"total_population", s.total_population}};
}

} // namespace

int cmd_simulate(const CommonOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const auto l = load(opt, log);
    MapOptions mo;
    mo.workers = l.workers;
    const auto map = simulate_map(l.bundle.scenario, l.cfg, mo);
    const auto summary = summarize(map, l.bundle.scenario.population);

    std::uint64_t clamped = 0;
    for (const auto& c : map.cells) clamped += c.clamped_links;
    ordered_json metrics = summary_json(summary);
    metrics["rows"] = map.rows();
    metrics["cols"] = map.cols();
    metrics["active_sites"] = map.site_ids.size();
    metrics["seed"] = l.cfg.seed;
    metrics["iterations"] = l.cfg.iterations;
    metrics["bias"] = l.cfg.bias;
    metrics["clamped_links"] = clamped;
    metrics["fingerprint"] = std::to_string(map.fingerprint);

    write_file(out_path(opt, "ratemap.csv"), ratemap_csv(map));
    write_file(out_path(opt, "ratemap.png"),
               heatmap_png(layer_values(map, MapLayer::Rate), map.rows(), map.cols(), MapLayer::Rate));
    write_file(out_path(opt, "metrics.json"), metrics.dump(2) + "\n");
    log << "average rate " << summary.avg_rate_mbps << " Mbps (se " << summary.rate_se_mbps << "), 4G share "
        << summary.share4 << "\n";
    return kExitOk;
  });
}

int cmd_plan(const CommonOptions& opt, std::size_t k, bool exhaustive, std::ostream& log) {
  return guarded(log, [&] {
    const auto l = load(opt, log);
    const auto& scenario = l.bundle.scenario;
    const auto candidates = CandidateSet::from_scenario(scenario);
    if (k > candidates.size())
      throw ConfigError("--k " + std::to_string(k) + " exceeds the " + std::to_string(candidates.size()) +
                        " available candidates");
    PlanOptions po;
    po.workers = l.workers;
    const auto plan = exhaustive ? exhaustive_select(scenario, candidates, k, l.cfg, po)
                                 : greedy_select(scenario, candidates, k, l.cfg, po);

    MapOptions mo;
    mo.workers = l.workers;
    const auto before = simulate_map(scenario, l.cfg, mo);
    const std::set<std::string> chosen(plan.selected.begin(), plan.selected.end());
    const auto after = simulate_map(apply_equipment(scenario, candidates, chosen), l.cfg, mo);
    const auto delta = diff_maps(before, after);

    write_file(out_path(opt, "before.png"),
               heatmap_png(layer_values(before, MapLayer::Rate), before.rows(), before.cols(), MapLayer::Rate));
    write_file(out_path(opt, "after.png"),
               heatmap_png(layer_values(after, MapLayer::Rate), after.rows(), after.cols(), MapLayer::Rate));
    write_file(out_path(opt, "delta.png"), heatmap_png(delta.delta_mbps, delta.rows, delta.cols, MapLayer::Delta));

    ordered_json j{{"method", exhaustive ? "exhaustive" : "greedy"},
                   {"k", k},
                   {"seed", l.cfg.seed},
                   {"iterations", l.cfg.iterations},
                   {"candidates", ordered_json::array()},
                   {"selected", plan.selected},
                   {"metric_before", plan.metric_before},
                   {"metric_after", plan.metric_after},
                   {"per_step_metrics", plan.per_step_metrics},
                   {"per_step_se", plan.per_step_se},
                   {"evaluations", plan.evaluations},
                   {"delta",
                    {{"max_gain_mbps", delta.max_gain},
                     {"max_loss_mbps", delta.max_loss},
                     {"degraded_cells", delta.degraded_cells},
                     {"fraction_degraded", delta.fraction_degraded}}},
                   {"heatmaps", {{"before", "before.png"}, {"after", "after.png"}, {"delta", "delta.png"}}}};
    for (const auto& c : candidates.items)
      j["candidates"].push_back({{"id", c.site.id}, {"existing", c.existing}});
    write_file(out_path(opt, "plan.json"), j.dump(2) + "\n");
    log << "selected";
    for (const auto& id : plan.selected) log << " " << id;
    log << "; metric " << plan.metric_before << " -> " << plan.metric_after << " Mbps\n";
    return kExitOk;
  });
}

int cmd_sweep_bias(const CommonOptions& opt, const std::string& bias_list, std::ostream& log) {
  return guarded(log, [&] {
    std::vector<double> biases;
    std::stringstream ss(bias_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      biases.push_back(csv::parse_double(item, "bias", 0));
    }
    if (biases.empty()) throw ConfigError("--bias-list is empty");
    const auto l = load(opt, log);
    PlanOptions po;
    po.workers = l.workers;
    const auto sweep = bias_sweep(l.bundle.scenario, l.cfg, biases, po);
    std::string csv_text = "bias,avg_rate_mbps,share4\n";
    for (std::size_t i = 0; i < sweep.biases.size(); ++i)
      csv_text += format_double(sweep.biases[i]) + "," + format_double(sweep.metrics[i]) + "," +
                  format_double(sweep.share4[i]) + "\n";
    write_file(out_path(opt, "bias_curve.csv"), csv_text);
    log << "best bias " << sweep.best_bias << "\n";
    return kExitOk;
  });
}

int cmd_defaults(std::ostream& out) {
  out << serialize_config(default_config());
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wind-turbine base station coverage planner"};
  app.require_subcommand(1);

  CommonOptions common;
  std::uint64_t seed = 0;
  std::uint32_t iterations = 0;
  unsigned workers = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Scenario bundle directory or scenario.cfg")->required();
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--seed", seed, "Override the random seed");
    sub->add_option("--iterations", iterations, "Override Monte Carlo iterations");
    sub->add_option("--workers", workers, "Worker threads (default: $WTBS_WORKERS or 1)");
  };

  auto* simulate = app.add_subcommand("simulate", "Compute the rate map of a scenario");
  add_common(simulate);

  auto* plan = app.add_subcommand("plan", "Select turbines to equip");
  add_common(plan);
  std::size_t k = 1;
  bool exhaustive = false;
  plan->add_option("--k", k, "Number of sites to select");
  plan->add_flag("--exhaustive", exhaustive, "Enumerate every k-subset instead of greedy selection");

  auto* sweep = app.add_subcommand("sweep-bias", "Evaluate association bias values");
  add_common(sweep);
  std::string bias_list;
  sweep->add_option("--bias-list", bias_list, "Comma-separated bias values")->required();

  auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

  auto* serve = app.add_subcommand("serve", "Run the planning HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir;
  std::size_t max_cells = 300;
  serve->add_option("--host", host, "Bind address (default 127.0.0.1)");
  serve->add_option("--port", port, "Listen port, 0 picks a free one (default 8080)");
  serve->add_option("--state-dir", state_dir, "Directory for session snapshots");
  serve->add_option("--max-cells", max_cells, "Grid cap per dimension");
  serve->add_option("--workers", workers, "Worker threads (default: $WTBS_WORKERS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  if (simulate->parsed() || plan->parsed() || sweep->parsed()) {
    auto* sub = simulate->parsed() ? simulate : plan->parsed() ? plan : sweep;
    if (sub->count("--seed")) common.seed = seed;
    if (sub->count("--iterations")) common.iterations = iterations;
    if (sub->count("--workers")) common.workers = workers;
  }
  if (simulate->parsed()) return cmd_simulate(common, err);
  if (plan->parsed()) return cmd_plan(common, k, exhaustive, err);
  if (sweep->parsed()) return cmd_sweep_bias(common, bias_list, err);
  if (defaults->parsed()) return cmd_defaults(out);

  return guarded(err, [&] {
    ServiceOptions so;
    so.workers = resolve_workers(serve->count("--workers") ? std::optional<unsigned>(workers) : std::nullopt);
    so.max_rows = so.max_cols = max_cells;
    if (!state_dir.empty()) so.state_dir = state_dir;
    PlannerService service(so);
    HttpServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    err << "listening on " << host << ":" << bound << "\n";
    return server.serve() ? kExitOk : kExitSimulation;
  });
}

} // namespace wtbs::cli
