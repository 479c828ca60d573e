#pragma once

#include "lmmse/experiment.hpp"

#include <string>
#include <vector>

namespace lmmse {

/// 17 significant digits, enough to round-trip a double exactly; infinities
/// become "inf"/"-inf".
std::string format_double(double value);

/// CSV serialization of sweep records. Header:
///   scenario,p,p_S,n,M,mode,empirical_mse,stderr,analytic_mse,baseline_mse,gamma,flags,seed
/// Rows come in (p_S, n) order, floats carry 17 significant digits, infinity
/// is the token "inf" and an inapplicable analytic value is an empty field.
/// LF line endings.
std::string csv_to_string(const std::vector<SweepRecord>& records);

/// csv_to_string written to path. Throws std::runtime_error on I/O failure
/// and std::invalid_argument on empty input.
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);

/// Inverse of csv_to_string.
std::vector<SweepRecord> parse_csv(const std::string& text);
std::vector<SweepRecord> read_csv(const std::string& path);

/// JSON sidecar with the resolved config, tool version, timestamp, and every
/// per-cell seed; enough to reproduce the CSV bit for bit with this build.
std::string manifest_to_string(const ScenarioConfig& cfg,
                               const std::vector<SweepRecord>& records,
                               const std::string& timestamp_utc);

/// Manifest written next to the CSV at `csv_path + ".manifest"`.
void write_manifest(const ScenarioConfig& cfg, const std::vector<SweepRecord>& records,
                    const std::string& csv_path);

}  // namespace lmmse
