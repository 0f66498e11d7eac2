// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/error.hpp"
#include "wtbs/export.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>
#include <zlib.h>

#include <sstream>

namespace wtbs {
namespace {

struct DecodedPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Rgb> pixels;
};

std::uint32_t be32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
         static_cast<std::uint32_t>(p[2]) << 8 | p[3];
}

/// Minimal reader for the 8-bit RGB, filter-0 images the encoder emits.
DecodedPng decode(const std::vector<std::uint8_t>& png) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  EXPECT_TRUE(std::equal(sig, sig + 8, png.begin()));
  DecodedPng out;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 12 <= png.size()) {
    const auto len = be32(&png[pos]);
    const std::string type(reinterpret_cast<const char*>(&png[pos + 4]), 4);
    const auto* data = &png[pos + 8];
    const auto crc = crc32(0L, &png[pos + 4], len + 4);
    EXPECT_EQ(crc, be32(&png[pos + 8 + len])) << type;
    if (type == "IHDR") {
      out.width = be32(data);
      out.height = be32(data + 4);
      EXPECT_EQ(data[8], 8);
      EXPECT_EQ(data[9], 2);
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    }
    pos += 12 + len;
  }
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(out.height) * (1 + 3 * out.width));
  uLongf raw_len = raw.size();
  EXPECT_EQ(uncompress(raw.data(), &raw_len, idat.data(), idat.size()), Z_OK);
  EXPECT_EQ(raw_len, raw.size());
  for (std::uint32_t y = 0; y < out.height; ++y) {
    const auto* line = &raw[y * (1 + 3 * out.width)];
    EXPECT_EQ(line[0], 0);
    for (std::uint32_t x = 0; x < out.width; ++x)
      out.pixels.push_back({line[1 + 3 * x], line[2 + 3 * x], line[3 + 3 * x]});
  }
  return out;
}

TEST(Layers, ParseNames) {
  EXPECT_EQ(parse_layer("rate"), MapLayer::Rate);
  EXPECT_EQ(parse_layer("p_cov"), MapLayer::PCov);
  EXPECT_EQ(parse_layer("share4"), MapLayer::Share4);
  EXPECT_EQ(parse_layer("delta"), MapLayer::Delta);
  EXPECT_EQ(parse_layer("delta_vs_baseline"), MapLayer::Delta);
  EXPECT_FALSE(parse_layer("sinr"));
  for (auto l : {MapLayer::Rate, MapLayer::PCov, MapLayer::Share4, MapLayer::Delta})
    EXPECT_EQ(parse_layer(to_string(l)), l);
}

TEST(Palette, RateBreakpoints) {
  const auto& p = rate_palette();
  ASSERT_EQ(p.size(), 6u);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i].lower, static_cast<double>(i));
  EXPECT_EQ(rate_color(0.0), p[0].color);
  EXPECT_EQ(rate_color(0.999), p[0].color);
  EXPECT_EQ(rate_color(1.0), p[1].color);
  EXPECT_EQ(rate_color(4.99), p[4].color);
  EXPECT_EQ(rate_color(5.0), p[5].color);
  EXPECT_EQ(rate_color(17.5), p[5].color);
}

TEST(Palette, ProbabilityBands) {
  const auto& p = probability_palette();
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(probability_color(0.0), p[0].color);
  EXPECT_EQ(probability_color(0.2), p[1].color);
  EXPECT_EQ(probability_color(1.0), p[4].color);
}

TEST(Palette, DeltaIsNeutralOnlyAtZero) {
  const Rgb neutral{247, 247, 247};
  EXPECT_EQ(delta_color(0.0), neutral);
  EXPECT_NE(delta_color(1e-9), neutral);
  EXPECT_NE(delta_color(-1e-9), neutral);
  EXPECT_NE(delta_color(5.0), delta_color(-5.0));
}

TEST(Png, EncodesExactPixels) {
  const std::vector<Rgb> px{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {10, 11, 12}, {13, 14, 15}, {16, 17, 18}};
  const auto img = decode(encode_png(3, 2, px));
  EXPECT_EQ(img.width, 3u);
  EXPECT_EQ(img.height, 2u);
  EXPECT_EQ(img.pixels, px);
  EXPECT_THROW(encode_png(0, 2, {}), ConfigError);
}

TEST(Png, HeatmapPutsNorthOnTop) {
  // Row 0 (south) is slow, row 1 (north) fast.
  const std::vector<double> values{0.5, 0.5, 6.0, 6.0};
  const auto img = decode(heatmap_png(values, 2, 2, MapLayer::Rate, 3));
  ASSERT_EQ(img.width, 6u);
  ASSERT_EQ(img.height, 6u);
  EXPECT_EQ(img.pixels.front(), rate_color(6.0));
  EXPECT_EQ(img.pixels.back(), rate_color(0.5));
}

TEST(Png, AllZeroDeltaIsUniformNeutral) {
  const auto img = decode(heatmap_png(std::vector<double>(12, 0.0), 3, 4, MapLayer::Delta, 1));
  for (const auto& p : img.pixels) EXPECT_EQ(p, (Rgb{247, 247, 247}));
}

TEST(Png, SingleHotCellLandsInPlace) {
  std::vector<double> v(4 * 5, 0.0);
  v[1 * 5 + 3] = 9.0; // row 1, col 3
  const auto img = decode(heatmap_png(v, 4, 5, MapLayer::Rate, 1));
  std::size_t hot = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    if (img.pixels[i] == rate_color(9.0)) {
      ++hot;
      EXPECT_EQ(i / 5, 4u - 1u - 1u);
      EXPECT_EQ(i % 5, 3u);
    }
  EXPECT_EQ(hot, 1u);
}

TEST(Png, ByteIdenticalAcrossCalls) {
  std::vector<double> v(100);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.07 * static_cast<double>(i);
  EXPECT_EQ(heatmap_png(v, 10, 10, MapLayer::Rate), heatmap_png(v, 10, 10, MapLayer::Rate));
  EXPECT_THROW(heatmap_png(v, 9, 10, MapLayer::Rate), ConfigError);
}

TEST(RateMapCsv, HeaderAndRows) {
  const auto aoi = testing::square_aoi(2, 3, 100.0);
  auto sc = testing::uniform_scenario(aoi, {testing::site_at(aoi, "w", 0, 0, Structure::WindTurbine, Tech::G4)});
  SimConfig cfg;
  cfg.iterations = 50;
  const auto map = simulate_map(sc, cfg);
  const auto csv = ratemap_csv(map);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "row,col,lat,lon,p_cov,rate_mbps,share4");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto f = csv::split_line(line);
    ASSERT_EQ(f.size(), 7u);
    const auto r = std::stoul(f[0]), c = std::stoul(f[1]);
    EXPECT_EQ(std::stod(f[5]), map.at(r, c).rate_lb_mbps);
    EXPECT_EQ(aoi.locate({std::stod(f[2]), std::stod(f[3])})->row, r);
    ++rows;
  }
  EXPECT_EQ(rows, 6u);
}

TEST(Layers, ValuesFollowCells) {
  const auto aoi = testing::square_aoi(2, 2, 100.0);
  auto sc = testing::uniform_scenario(aoi, {testing::site_at(aoi, "w", 0, 0, Structure::WindTurbine, Tech::G4)});
  SimConfig cfg;
  cfg.iterations = 30;
  const auto map = simulate_map(sc, cfg);
  const auto pcov = layer_values(map, MapLayer::PCov);
  for (std::size_t i = 0; i < pcov.size(); ++i) EXPECT_EQ(pcov[i], map.cells[i].p_cov);
  EXPECT_THROW(layer_values(map, MapLayer::Delta), ConfigError);
}

} // namespace
} // namespace wtbs
