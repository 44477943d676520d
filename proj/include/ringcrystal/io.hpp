#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ringcrystal/harness.hpp"

namespace ringcrystal {

/// Shortest exact decimal form with up to 17 significant digits.
std::string format_g17(double v);

/// RFC-4180 serialization of a sweep table: header row, CRLF line endings,
/// columns in SweepRecord field order, 17 significant digits.  The
/// eps_analytic_half_flux cell is empty away from alpha = 1/2.
std::string to_csv(const SweepTable& table);

/// Same CSV with the wall_time_s column blanked; byte-for-byte rerun
/// comparisons go through this (timings are the one nondeterministic column).
std::string strip_wall_time_column(const std::string& csv);

/// Canonical JSON echo of a solver configuration (fixed key order).
std::string config_json(const SolverConfig& config);

/// FNV-1a (64-bit) of the canonical config JSON, as hex.
std::string config_hash_hex(const SolverConfig& config);

/// Metadata sidecar: {config, seed, version, timestamp_iso8601, config_hash}.
std::string metadata_json(const SweepMetadata& meta);

std::string iso8601_utc_now();

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

/// Writes <dir>/<basename>.csv and <dir>/<basename>.meta.json.
void write_sweep_artifacts(const SweepTable& table,
                           const std::filesystem::path& dir,
                           const std::string& basename);

/// Two-column whitespace-delimited curve file.
void write_xy(const std::filesystem::path& path, const std::vector<double>& x,
              const std::vector<double>& y);

/// "start:stop:count" inclusive range, or a single number.
std::vector<double> parse_range(const std::string& spec);

}  // namespace ringcrystal
