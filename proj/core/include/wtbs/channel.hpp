// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/channel.hpp
 *
 * Per-link physics: elevation angle, air-to-ground LoS probability (s-curve),
 * additional losses, power-law path loss and Nakagami-m fading.
 */

#pragma once

#include "wtbs/geodata.hpp"
#include "wtbs/random.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace wtbs {

enum class Visibility { LoS, NLoS };

/// Links shorter than this are clamped to avoid the path-loss singularity.
inline constexpr double kMinLinkDistanceM = 1.0;

struct EnvironmentPreset {
  std::string name;
  double s_a = 4.88;   ///< s-curve parameter a
  double s_b = 0.429;  ///< s-curve parameter b, 1/degree
  double eta3_db = -0.1;
  double eta4_db = -21.0;
  double alpha_los = 2.2;
  double alpha_nlos = 3.2;
  double m_los = 2.0;
  double m_nlos = 1.0;
  /// Per-visibility additional loss; when set it replaces the per-tech value
  /// for links in that condition.
  std::optional<double> eta_los_db;
  std::optional<double> eta_nlos_db;
  /// Forces every link's LoS probability to a constant (testing, what-if runs).
  std::optional<double> los_probability_override;

  static EnvironmentPreset rural();
  static EnvironmentPreset suburban();
  /// `rural` or `suburban`; throws ConfigError otherwise.
  static EnvironmentPreset named(const std::string& name);

  void validate() const;

  double alpha(Visibility v) const noexcept { return v == Visibility::LoS ? alpha_los : alpha_nlos; }
  double nakagami_m(Visibility v) const noexcept { return v == Visibility::LoS ? m_los : m_nlos; }

  friend bool operator==(const EnvironmentPreset&, const EnvironmentPreset&) = default;
};

struct LinkGeometry {
  double horizontal_m = 0.0;
  double height_m = 0.0;
  double distance_m = 0.0;
  double elevation_deg = 90.0;

  /// `height_m` is the BS height above the user antenna.
  static LinkGeometry make(double horizontal_m, double height_m);
};

/// atan(h/d) in degrees; 90 when d == 0. Throws DomainError unless h > 0, d >= 0.
double elevation_angle(double horizontal_m, double height_m);

/// 1 / (1 + S_a exp(-S_b (theta - S_a))). Throws DomainError outside [0, 90].
double los_probability(double theta_deg, const EnvironmentPreset& preset);

double db_to_linear(double db) noexcept;

/// Linear additional-loss factor for the BS technology (G3 or G4).
double additional_loss(Tech tech, const EnvironmentPreset& preset);

/// Additional loss for a link, honoring per-visibility overrides.
double additional_loss(Tech tech, Visibility v, const EnvironmentPreset& preset);

struct LinkDiagnostics {
  std::size_t clamped_links = 0;
};

/// Fading-averaged received power p_tx * eta * r^-alpha (E[G] = 1).
/// Distances below kMinLinkDistanceM are clamped and counted in `diag`.
double mean_rx_power(double p_tx_w, double eta, double distance_m, double alpha,
                     LinkDiagnostics* diag = nullptr);

/// Gamma(shape = m, scale = 1/m) power gain. Throws DomainError for m < 0.5.
double sample_fading(double m, RandomStream& rng);

Visibility sample_visibility(double p_los, RandomStream& rng);

} // namespace wtbs
