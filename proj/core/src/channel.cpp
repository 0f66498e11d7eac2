// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/channel.hpp"

#include "wtbs/error.hpp"

#include <cmath>
#include <numbers>

namespace wtbs {

EnvironmentPreset EnvironmentPreset::rural() {
  EnvironmentPreset p;
  p.name = "rural";
  p.s_a = 4.88;
  p.s_b = 0.429;
  p.eta3_db = -0.1;
  p.eta4_db = -21.0;
  return p;
}

EnvironmentPreset EnvironmentPreset::suburban() {
  EnvironmentPreset p;
  p.name = "suburban";
  p.s_a = 9.6117;
  p.s_b = 0.1581;
  p.eta3_db = -1.0;
  p.eta4_db = -20.0;
  return p;
}

EnvironmentPreset EnvironmentPreset::named(const std::string& name) {
  if (name == "rural") return rural();
  if (name == "suburban") return suburban();
  throw ConfigError("unknown environment preset '" + name + "' (expected rural or suburban)");
}

void EnvironmentPreset::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!(s_a > 0.0) || !finite(s_a)) throw ConfigError("s_a must be > 0");
  if (!(s_b > 0.0) || !finite(s_b)) throw ConfigError("s_b must be > 0");
  if (!finite(eta3_db) || !finite(eta4_db)) throw ConfigError("eta values must be finite");
  if (!(alpha_los > 0.0) || !(alpha_nlos > 0.0)) throw ConfigError("path-loss exponents must be > 0");
  if (alpha_los > alpha_nlos) throw ConfigError("alpha_los must not exceed alpha_nlos");
  if (!(m_los >= 0.5) || !(m_nlos >= 0.5)) throw ConfigError("Nakagami shapes must be >= 0.5");
  if (m_nlos > m_los) throw ConfigError("m_nlos must not exceed m_los");
  if (los_probability_override &&
      !(*los_probability_override >= 0.0 && *los_probability_override <= 1.0))
    throw ConfigError("los_probability_override must lie in [0, 1]");
}

LinkGeometry LinkGeometry::make(double horizontal_m, double height_m) {
  LinkGeometry g;
  g.horizontal_m = horizontal_m;
  g.height_m = height_m;
  g.distance_m = std::hypot(horizontal_m, height_m);
  g.elevation_deg = elevation_angle(horizontal_m, height_m);
  return g;
}

double elevation_angle(double horizontal_m, double height_m) {
  if (!(height_m > 0.0)) throw DomainError("elevation_angle: height must be > 0");
  if (!(horizontal_m >= 0.0)) throw DomainError("elevation_angle: distance must be >= 0");
  if (horizontal_m == 0.0) return 90.0;
  return std::atan(height_m / horizontal_m) * 180.0 / std::numbers::pi;
}

double los_probability(double theta_deg, const EnvironmentPreset& preset) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
    throw DomainError("los_probability: elevation must lie in [0, 90] degrees");
  if (preset.los_probability_override) return *preset.los_probability_override;
  return 1.0 / (1.0 + preset.s_a * std::exp(-preset.s_b * (theta_deg - preset.s_a)));
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double additional_loss(Tech tech, const EnvironmentPreset& preset) {
  switch (tech) {
  case Tech::G3: return db_to_linear(preset.eta3_db);
  case Tech::G4: return db_to_linear(preset.eta4_db);
  case Tech::Unequipped: break;
  }
  throw DomainError("additional_loss: site is not equipped");
}

double additional_loss(Tech tech, Visibility v, const EnvironmentPreset& preset) {
  const auto& per_visibility = v == Visibility::LoS ? preset.eta_los_db : preset.eta_nlos_db;
  if (per_visibility) return db_to_linear(*per_visibility);
  return additional_loss(tech, preset);
}

double mean_rx_power(double p_tx_w, double eta, double distance_m, double alpha, LinkDiagnostics* diag) {
  if (distance_m < kMinLinkDistanceM) {
    distance_m = kMinLinkDistanceM;
    if (diag) ++diag->clamped_links;
  }
  return p_tx_w * eta * std::pow(distance_m, -alpha);
}

namespace {

// Marsaglia & Tsang (2000), shape >= 1, unit scale.
double gamma_marsaglia_tsang(double shape, RandomStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      // Box-Muller; one normal per pair of uniforms.
      x = std::sqrt(-2.0 * std::log(rng.uniform())) * std::cos(2.0 * std::numbers::pi * rng.uniform());
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

} // namespace

double sample_fading(double m, RandomStream& rng) {
  if (!(m >= 0.5)) throw DomainError("sample_fading: Nakagami shape must be >= 0.5");
  // Integer shapes: sum of m unit exponentials.
  if (m <= 8.0 && m == std::floor(m)) {
    double product = 1.0;
    for (int i = 0; i < static_cast<int>(m); ++i) product *= rng.uniform();
    return -std::log(product) / m;
  }
  if (m < 1.0) {
    const double g = gamma_marsaglia_tsang(m + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / m) / m;
  }
  return gamma_marsaglia_tsang(m, rng) / m;
}

Visibility sample_visibility(double p_los, RandomStream& rng) {
  return rng.uniform() < p_los ? Visibility::LoS : Visibility::NLoS;
}

} // namespace wtbs
