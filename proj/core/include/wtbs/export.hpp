// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * \file wtbs/export.hpp
 *
 * Rate map exports: CSV rows and PNG heatmaps with a fixed palette.
 *
 * Rate layer bands (Mbps): [0,1) [1,2) [2,3) [3,4) [4,5) [5,inf).
 * Delta layer bands (Mbps): (-inf,-1) [-1,-0.1) [-0.1,0) 0 (0,0.1] (0.1,1] (1,inf).
 * Probability layers (p_cov, share4): [0,.2) [.2,.4) [.4,.6) [.6,.8) [.8,1].
 *
 * PNG images put north at the top (grid row 0 is the southernmost row).
 */

#pragma once

#include "wtbs/network_sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wtbs {

enum class MapLayer { Rate, PCov, Share4, Delta };

std::optional<MapLayer> parse_layer(std::string_view name);
std::string_view to_string(MapLayer layer) noexcept;

/// Row-major layer values. Delta needs a baseline and is rejected here.
std::vector<double> layer_values(const RateMap& map, MapLayer layer);

/// `row,col,lat,lon,p_cov,rate_mbps,share4`
std::string ratemap_csv(const RateMap& map);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorBand {
  double lower; ///< inclusive lower edge
  Rgb color;
  const char* label;
};

const std::vector<ColorBand>& rate_palette();
const std::vector<ColorBand>& probability_palette();

Rgb rate_color(double mbps);
Rgb probability_color(double p);
Rgb delta_color(double delta_mbps);
Rgb layer_color(MapLayer layer, double value);

/// 8-bit RGB PNG, filter 0 on every scanline, zlib level 9.
std::vector<std::uint8_t> encode_png(std::size_t width, std::size_t height, const std::vector<Rgb>& pixels);

/// Each cell becomes a `scale` x `scale` block.
std::vector<std::uint8_t> heatmap_png(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                                      MapLayer layer, unsigned scale = 4);

void write_file(const std::string& path, std::string_view bytes);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

} // namespace wtbs
