// Copyright 2026 The wtbs-planner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace wtbs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitSimulation = 2;

struct CommonOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> iterations;
  std::optional<unsigned> workers;
};

/// `--workers` if given, else $WTBS_WORKERS, else 1.
unsigned resolve_workers(const std::optional<unsigned>& flag);

int cmd_simulate(const CommonOptions& opt, std::ostream& log);
int cmd_plan(const CommonOptions& opt, std::size_t k, bool exhaustive, std::ostream& log);
int cmd_sweep_bias(const CommonOptions& opt, const std::string& bias_list, std::ostream& log);
int cmd_defaults(std::ostream& out);

/// Full command line; returns 0, 1 or 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace wtbs::cli
