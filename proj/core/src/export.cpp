// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtbs/export.hpp"

#include "wtbs/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <fstream>

namespace wtbs {

std::optional<MapLayer> parse_layer(std::string_view name) {
  if (name == "rate") return MapLayer::Rate;
  if (name == "p_cov") return MapLayer::PCov;
  if (name == "share4") return MapLayer::Share4;
  if (name == "delta" || name == "delta_vs_baseline") return MapLayer::Delta;
  return std::nullopt;
}

std::string_view to_string(MapLayer layer) noexcept {
  switch (layer) {
  case MapLayer::Rate: return "rate";
  case MapLayer::PCov: return "p_cov";
  case MapLayer::Share4: return "share4";
  case MapLayer::Delta: return "delta";
  }
  return "rate";
}

std::vector<double> layer_values(const RateMap& map, MapLayer layer) {
  std::vector<double> v;
  v.reserve(map.cells.size());
  for (const auto& c : map.cells) {
    switch (layer) {
    case MapLayer::Rate: v.push_back(c.rate_lb_mbps); break;
    case MapLayer::PCov: v.push_back(c.p_cov); break;
    case MapLayer::Share4: v.push_back(c.share4); break;
    case MapLayer::Delta: throw ConfigError("delta layer requires a baseline map");
    }
  }
  return v;
}

std::string ratemap_csv(const RateMap& map) {
  std::string out = "row,col,lat,lon,p_cov,rate_mbps,share4\n";
  for (std::size_t r = 0; r < map.rows(); ++r) {
    for (std::size_t c = 0; c < map.cols(); ++c) {
      const auto& cell = map.at(r, c);
      const auto p = map.aoi.cell_center_geo(r, c);
      out += std::to_string(r) + "," + std::to_string(c) + "," + format_double(p.lat) + "," +
             format_double(p.lon) + "," + format_double(cell.p_cov) + "," + format_double(cell.rate_lb_mbps) +
             "," + format_double(cell.share4) + "\n";
    }
  }
  return out;
}

const std::vector<ColorBand>& rate_palette() {
  static const std::vector<ColorBand> bands{
      {0.0, {49, 54, 149}, "0-1 Mbps"},    {1.0, {69, 117, 180}, "1-2 Mbps"},
      {2.0, {116, 173, 209}, "2-3 Mbps"},  {3.0, {254, 224, 144}, "3-4 Mbps"},
      {4.0, {244, 109, 67}, "4-5 Mbps"},   {5.0, {165, 0, 38}, "5+ Mbps"},
  };
  return bands;
}

const std::vector<ColorBand>& probability_palette() {
  static const std::vector<ColorBand> bands{
      {0.0, {237, 248, 233}, "0-0.2"}, {0.2, {186, 228, 179}, "0.2-0.4"}, {0.4, {116, 196, 118}, "0.4-0.6"},
      {0.6, {49, 163, 84}, "0.6-0.8"}, {0.8, {0, 109, 44}, "0.8-1"},
  };
  return bands;
}

namespace {

Rgb band_color(const std::vector<ColorBand>& bands, double v) {
  Rgb c = bands.front().color;
  for (const auto& b : bands)
    if (v >= b.lower) c = b.color;
  return c;
}

} // namespace

Rgb rate_color(double mbps) { return band_color(rate_palette(), mbps); }
Rgb probability_color(double p) { return band_color(probability_palette(), p); }

Rgb delta_color(double d) {
  if (d < -1.0) return {178, 24, 43};
  if (d < -0.1) return {239, 138, 98};
  if (d < 0.0) return {253, 219, 199};
  if (d == 0.0) return {247, 247, 247};
  if (d <= 0.1) return {209, 229, 240};
  if (d <= 1.0) return {103, 169, 207};
  return {33, 102, 172};
}

Rgb layer_color(MapLayer layer, double value) {
  switch (layer) {
  case MapLayer::Rate: return rate_color(value);
  case MapLayer::Delta: return delta_color(value);
  case MapLayer::PCov:
  case MapLayer::Share4: return probability_color(value);
  }
  return {};
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

} // namespace

std::vector<std::uint8_t> encode_png(std::size_t width, std::size_t height, const std::vector<Rgb>& pixels) {
  if (width == 0 || height == 0 || pixels.size() != width * height)
    throw ConfigError("encode_png: pixel buffer does not match dimensions");
  std::vector<std::uint8_t> raw;
  raw.reserve(height * (1 + 3 * width));
  for (std::size_t y = 0; y < height; ++y) {
    raw.push_back(0);
    for (std::size_t x = 0; x < width; ++x) {
      const auto& p = pixels[y * width + x];
      raw.insert(raw.end(), {p.r, p.g, p.b});
    }
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw SimulationError("encode_png: zlib compression failed");
  packed.resize(packed_size);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0}); // 8-bit, truecolor, deflate, filter 0, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

std::vector<std::uint8_t> heatmap_png(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                                      MapLayer layer, unsigned scale) {
  if (values.size() != rows * cols) throw ConfigError("heatmap_png: value count does not match grid");
  scale = std::max(1u, scale);
  const std::size_t w = cols * scale, h = rows * scale;
  std::vector<Rgb> px(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t row = rows - 1 - y / scale;
    for (std::size_t x = 0; x < w; ++x) px[y * w + x] = layer_color(layer, values[row * cols + x / scale]);
  }
  return encode_png(w, h, px);
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

} // namespace wtbs
