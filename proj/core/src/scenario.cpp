// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/scenario.hpp"

#include "wtbs/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace wtbs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
};

struct Section {
  std::string name;
  std::size_t line;
  std::vector<Entry> entries;
};

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw InputError(source_, line, msg); }

  double number(const Entry& e) const {
    double v = 0.0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(e.line, "'" + e.key + "' expects a number, got '" + s + "'");
    return v;
  }

  std::uint64_t integer(const Entry& e) const {
    std::uint64_t v = 0;
    const auto& s = e.value;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      fail(e.line, "'" + e.key + "' expects a non-negative integer, got '" + s + "'");
    return v;
  }

  bool boolean(const Entry& e) const {
    const auto& s = e.value;
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    fail(e.line, "'" + e.key + "' expects true or false, got '" + s + "'");
  }

  std::vector<double> numbers(const Entry& e, std::size_t count) const {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number({e.key, trim(item), e.line}));
    if (out.size() != count) fail(e.line, "'" + e.key + "' expects " + std::to_string(count) + " comma-separated numbers");
    return out;
  }

private:
  std::string source_;
};

using Setter = std::function<void(const Entry&)>;

/// Applies entries of one section through a key table; unknown keys fail.
void apply(const Reader& rd, const Section& sec, const std::map<std::string, Setter>& table) {
  std::set<std::string> seen;
  for (const auto& e : sec.entries) {
    if (!seen.insert(e.key).second) rd.fail(e.line, "duplicate key '" + e.key + "'");
    const auto it = table.find(e.key);
    if (it == table.end()) rd.fail(e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
    it->second(e);
  }
}

std::map<std::string, Setter> preset_table(const Reader& rd, EnvironmentPreset& p) {
  const auto num = [&rd](double& field) { return Setter([&rd, &field](const Entry& e) { field = rd.number(e); }); };
  const auto opt = [&rd](std::optional<double>& field) {
    return Setter([&rd, &field](const Entry& e) {
      if (e.value == "none") field.reset();
      else field = rd.number(e);
    });
  };
  return {{"s_a", num(p.s_a)},
          {"s_b", num(p.s_b)},
          {"eta3_db", num(p.eta3_db)},
          {"eta4_db", num(p.eta4_db)},
          {"alpha_los", num(p.alpha_los)},
          {"alpha_nlos", num(p.alpha_nlos)},
          {"m_los", num(p.m_los)},
          {"m_nlos", num(p.m_nlos)},
          {"eta_los_db", opt(p.eta_los_db)},
          {"eta_nlos_db", opt(p.eta_nlos_db)},
          {"los_probability_override", opt(p.los_probability_override)}};
}

void write_preset_fields(std::ostringstream& out, const EnvironmentPreset& p, const EnvironmentPreset* base) {
  const auto line = [&](const char* key, double v, double b) {
    if (!base || v != b) out << key << " = " << format_double(v) << "\n";
  };
  const auto opt = [&](const char* key, const std::optional<double>& v, const std::optional<double>& b) {
    if (base && v == b) return;
    if (!base && !v) return;
    out << key << " = " << (v ? format_double(*v) : std::string("none")) << "\n";
  };
  line("s_a", p.s_a, base ? base->s_a : 0);
  line("s_b", p.s_b, base ? base->s_b : 0);
  line("eta3_db", p.eta3_db, base ? base->eta3_db : 0);
  line("eta4_db", p.eta4_db, base ? base->eta4_db : 0);
  line("alpha_los", p.alpha_los, base ? base->alpha_los : 0);
  line("alpha_nlos", p.alpha_nlos, base ? base->alpha_nlos : 0);
  line("m_los", p.m_los, base ? base->m_los : 0);
  line("m_nlos", p.m_nlos, base ? base->m_nlos : 0);
  opt("eta_los_db", p.eta_los_db, base ? base->eta_los_db : std::nullopt);
  opt("eta_nlos_db", p.eta_nlos_db, base ? base->eta_nlos_db : std::nullopt);
  opt("los_probability_override", p.los_probability_override,
      base ? base->los_probability_override : std::nullopt);
}

} // namespace

AreaOfInterest ScenarioConfig::aoi() const {
  if (!bbox_min || !bbox_max) throw ConfigError("scenario has no bbox");
  return AreaOfInterest(*bbox_min, *bbox_max, cell_size_m);
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  const Reader rd(source);
  std::vector<Section> sections;

  csv::for_each_line(text, [&](std::string_view raw, std::size_t lineno) {
    std::string line(raw);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line[0] == ';') return;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(lineno, "unterminated section header");
      sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
      return;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(lineno, "expected 'key = value'");
    if (sections.empty()) rd.fail(lineno, "key outside of a section");
    sections.back().entries.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  });

  ScenarioConfig cfg;
  std::set<std::string> seen_sections;
  const Section* environment = nullptr;

  // Named presets first so [environment] can reference a redefined one.
  for (const auto& sec : sections) {
    if (!seen_sections.insert(sec.name).second) rd.fail(sec.line, "duplicate section [" + sec.name + "]");
    if (sec.name.rfind("preset.", 0) == 0) {
      const std::string name = sec.name.substr(7);
      if (name.empty()) rd.fail(sec.line, "preset section needs a name");
      auto it = cfg.presets.find(name);
      EnvironmentPreset p = it != cfg.presets.end() ? it->second : EnvironmentPreset::rural();
      p.name = name;
      apply(rd, sec, preset_table(rd, p));
      try {
        p.validate();
      } catch (const ConfigError& e) {
        rd.fail(sec.line, "[" + sec.name + "]: " + e.what());
      }
      cfg.presets[name] = p;
    }
  }

  for (const auto& sec : sections) {
    if (sec.name == "scenario") {
      apply(rd, sec,
            {{"sites", [&](const Entry& e) { cfg.sites_file = e.value; }},
             {"population", [&](const Entry& e) { cfg.population_file = e.value; }},
             {"candidates",
              [&](const Entry& e) {
                if (e.value.empty() || e.value == "none") cfg.candidates_file.reset();
                else cfg.candidates_file = e.value;
              }},
             {"bbox",
              [&](const Entry& e) {
                const auto v = rd.numbers(e, 4);
                cfg.bbox_min = GeoPoint{v[0], v[1]};
                cfg.bbox_max = GeoPoint{v[2], v[3]};
                if (v[0] < -90 || v[0] > 90 || v[2] < -90 || v[2] > 90 || v[1] < -180 || v[1] > 180 ||
                    v[3] < -180 || v[3] > 180)
                  rd.fail(e.line, "bbox corner out of range");
                if (!(v[0] < v[2]) || !(v[1] < v[3]))
                  rd.fail(e.line, "bbox must be 'min_lat, min_lon, max_lat, max_lon' with min < max");
              }},
             {"cell_size_m", [&](const Entry& e) {
                cfg.cell_size_m = rd.number(e);
                if (!(cfg.cell_size_m > 0.0)) rd.fail(e.line, "cell_size_m must be > 0");
              }}});
    } else if (sec.name == "environment") {
      environment = &sec;
    } else if (sec.name == "simulation") {
      auto& s = cfg.sim;
      apply(rd, sec,
            {{"beta_db", [&](const Entry& e) { s.beta_db = rd.number(e); }},
             {"noise_w", [&](const Entry& e) { s.noise_w = rd.number(e); }},
             {"bandwidth_multiplier", [&](const Entry& e) { s.bandwidth_multiplier = rd.number(e); }},
             {"bias", [&](const Entry& e) { s.bias = rd.number(e); }},
             {"iterations",
              [&](const Entry& e) {
                const auto v = rd.integer(e);
                if (v < 1 || v > 0xFFFFFFFFull) rd.fail(e.line, "iterations must be in [1, 2^32)");
                s.iterations = static_cast<std::uint32_t>(v);
              }},
             {"seed", [&](const Entry& e) { s.seed = rd.integer(e); }},
             {"rate3_mbps", [&](const Entry& e) { s.rate3_mbps = rd.number(e); }},
             {"rate4_mbps", [&](const Entry& e) { s.rate4_mbps = rd.number(e); }},
             {"user_height_m", [&](const Entry& e) { s.user_height_m = rd.number(e); }},
             {"cross_tech_interference", [&](const Entry& e) { s.cross_tech_interference = rd.boolean(e); }}});
      try {
        s.validate();
      } catch (const ConfigError& e) {
        rd.fail(sec.line, std::string("[simulation]: ") + e.what());
      }
    } else if (sec.name == "sites") {
      auto& d = cfg.site_defaults;
      const auto positive = [&](double& field) {
        return Setter([&rd, &field](const Entry& e) {
          field = rd.number(e);
          if (!(field > 0.0)) rd.fail(e.line, "'" + e.key + "' must be > 0");
        });
      };
      apply(rd, sec,
            {{"ct_height_m", positive(d.ct_height_m)},
             {"ct_power_w", positive(d.ct_power_w)},
             {"wt_height_m", positive(d.wt_height_m)},
             {"wt_power_w", positive(d.wt_power_w)}});
    } else if (sec.name.rfind("preset.", 0) != 0) {
      rd.fail(sec.line, "unknown section [" + sec.name + "]");
    }
  }

  if (environment) {
    Section rest{environment->name, environment->line, {}};
    for (const auto& e : environment->entries) {
      if (e.key != "preset") {
        rest.entries.push_back(e);
        continue;
      }
      if (!cfg.presets.count(e.value)) rd.fail(e.line, "unknown preset '" + e.value + "'");
      cfg.preset_name = e.value;
    }
    cfg.environment = cfg.presets.at(cfg.preset_name);
    apply(rd, rest, preset_table(rd, cfg.environment));
    try {
      cfg.environment.validate();
    } catch (const ConfigError& e) {
      rd.fail(environment->line, std::string("[environment]: ") + e.what());
    }
  } else {
    cfg.environment = cfg.presets.at(cfg.preset_name);
  }
  return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "# wtbs scenario configuration\n\n[scenario]\n";
  out << "sites = " << cfg.sites_file << "\n";
  out << "population = " << cfg.population_file << "\n";
  if (cfg.candidates_file) out << "candidates = " << *cfg.candidates_file << "\n";
  if (cfg.bbox_min && cfg.bbox_max) {
    out << "bbox = " << format_double(cfg.bbox_min->lat) << ", " << format_double(cfg.bbox_min->lon) << ", "
        << format_double(cfg.bbox_max->lat) << ", " << format_double(cfg.bbox_max->lon) << "\n";
  }
  out << "cell_size_m = " << format_double(cfg.cell_size_m) << "\n";

  out << "\n[environment]\npreset = " << cfg.preset_name << "\n";
  write_preset_fields(out, cfg.environment, &cfg.presets.at(cfg.preset_name));

  const auto& s = cfg.sim;
  out << "\n[simulation]\n";
  out << "beta_db = " << format_double(s.beta_db) << "\n";
  out << "noise_w = " << format_double(s.noise_w) << "\n";
  out << "bandwidth_multiplier = " << format_double(s.bandwidth_multiplier) << "\n";
  out << "bias = " << format_double(s.bias) << "\n";
  out << "iterations = " << s.iterations << "\n";
  out << "seed = " << s.seed << "\n";
  out << "rate3_mbps = " << format_double(s.rate3_mbps) << "\n";
  out << "rate4_mbps = " << format_double(s.rate4_mbps) << "\n";
  out << "user_height_m = " << format_double(s.user_height_m) << "\n";
  out << "cross_tech_interference = " << (s.cross_tech_interference ? "true" : "false") << "\n";

  const auto& d = cfg.site_defaults;
  out << "\n[sites]\n";
  out << "ct_height_m = " << format_double(d.ct_height_m) << "\n";
  out << "ct_power_w = " << format_double(d.ct_power_w) << "\n";
  out << "wt_height_m = " << format_double(d.wt_height_m) << "\n";
  out << "wt_power_w = " << format_double(d.wt_power_w) << "\n";

  for (const auto& [name, preset] : cfg.presets) {
    out << "\n[preset." << name << "]\n";
    write_preset_fields(out, preset, nullptr);
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::filesystem::path config_path_of(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "scenario.cfg";
  return path;
}

} // namespace

BundleTexts read_bundle_texts(const std::filesystem::path& path) {
  const auto cfg_path = config_path_of(path);
  BundleTexts t;
  t.config = read_text_file(cfg_path);
  const auto cfg = parse_config(t.config, cfg_path.string());
  const auto dir = cfg_path.parent_path();
  t.sites = read_text_file(dir / cfg.sites_file);
  t.population = read_text_file(dir / cfg.population_file);
  if (cfg.candidates_file) t.candidates = read_text_file(dir / *cfg.candidates_file);
  return t;
}

namespace {

ScenarioBundle assemble(const BundleTexts& t, const std::string& cfg_name, const std::filesystem::path& dir) {
  ScenarioBundle b;
  b.directory = dir;
  b.config = parse_config(t.config, cfg_name);
  const auto& cfg = b.config;
  const auto name = [&](const std::string& file) { return dir.empty() ? file : (dir / file).string(); };

  AreaOfInterest aoi;
  try {
    aoi = cfg.aoi();
  } catch (const ConfigError& e) {
    throw InputError(cfg_name, 0, e.what());
  }

  const auto parse = [&](const std::string& file, auto&& fn) {
    try {
      return fn();
    } catch (const ParseError& e) {
      throw InputError(name(file), e.line(), e.detail());
    }
  };

  b.scenario.aoi = aoi;
  b.scenario.preset = cfg.environment;
  b.scenario.sites = parse(cfg.sites_file, [&] { return parse_sites(t.sites, cfg.site_defaults); });
  auto pop = parse(cfg.population_file, [&] { return parse_population(t.population, aoi); });
  b.scenario.population = std::move(pop.grid);
  b.skipped_population_samples = pop.skipped_outside;
  if (pop.skipped_outside)
    b.warnings.push_back(std::to_string(pop.skipped_outside) + " population samples outside the bbox were skipped");
  if (cfg.candidates_file) {
    if (!t.candidates) throw InputError(name(*cfg.candidates_file), 0, "candidates file not provided");
    b.scenario.candidates =
        parse(*cfg.candidates_file, [&] { return parse_sites(*t.candidates, cfg.site_defaults); });
    for (auto& c : b.scenario.candidates) {
      if (c.structure != Structure::WindTurbine)
        throw InputError(name(*cfg.candidates_file), 0, "candidate " + c.id + " must be a wind turbine (WT)");
      c.tech = Tech::Unequipped;
    }
  }
  b.scenario.sites = dedupe_farms(std::move(b.scenario.sites));
  for (const auto* list : {&b.scenario.sites, &b.scenario.candidates})
    for (const auto& s : *list)
      if (!within_projection_validity(s.position, aoi.frame()))
        b.warnings.push_back("site " + s.id + " is far from the bbox; planar distances are approximate");
  try {
    b.scenario.validate();
  } catch (const ConfigError& e) {
    throw InputError(cfg_name, 0, e.what());
  }
  return b;
}

} // namespace

ScenarioBundle load_bundle_from_texts(const BundleTexts& texts) { return assemble(texts, "scenario.cfg", {}); }

ScenarioBundle load_bundle(const std::filesystem::path& path) {
  const auto cfg_path = config_path_of(path);
  if (!std::filesystem::exists(cfg_path)) throw InputError(cfg_path.string(), 0, "file not found");
  return assemble(read_bundle_texts(path), cfg_path.string(), cfg_path.parent_path());
}

} // namespace wtbs
