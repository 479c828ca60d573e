#include "lmmse/csv_io.hpp"

#include "lmmse/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lmmse {

namespace {

constexpr const char* kHeader =
    "scenario,p,p_S,n,M,mode,empirical_mse,stderr,analytic_mse,baseline_mse,gamma,flags,seed";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Flags must not break the 13-field row structure.
std::string sanitize_flags(const std::string& flags) {
  std::string out = flags;
  for (char& c : out) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

double parse_double(const std::string& token) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str()) {
    throw std::invalid_argument("parse_csv: bad number token '" + token + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  if (std::isnan(value)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_to_string(const std::vector<SweepRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("csv_to_string: no records");
  }
  std::string out(kHeader);
  out += '\n';
  for (const SweepRecord& r : records) {
    out += scenario_name(r.scenario);
    out += ',';
    out += std::to_string(r.p);
    out += ',';
    out += std::to_string(r.subset_size);
    out += ',';
    out += std::to_string(r.sample_count);
    out += ',';
    out += std::to_string(r.replicates);
    out += ',';
    out += mode_name(r.mode);
    out += ',';
    out += format_double(r.empirical_mse);
    out += ',';
    out += format_double(r.standard_error);
    out += ',';
    out += r.analytic_mse ? format_double(*r.analytic_mse) : "";
    out += ',';
    out += format_double(r.baseline_mse);
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += sanitize_flags(r.flags);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  const std::string text = csv_to_string(records);
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  }
  file << text;
  if (!file.good()) {
    throw std::runtime_error("write_csv: write to '" + path + "' failed");
  }
}

std::vector<SweepRecord> parse_csv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || line != kHeader) {
    throw std::invalid_argument("parse_csv: missing or unexpected header");
  }
  std::vector<SweepRecord> records;
  while (std::getline(stream, line)) {
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 13) {
      throw std::invalid_argument("parse_csv: expected 13 fields, got " +
                                  std::to_string(f.size()));
    }
    SweepRecord r;
    r.scenario = parse_scenario_name(f[0]);
    r.p = static_cast<Index>(std::stoll(f[1]));
    r.subset_size = static_cast<Index>(std::stoll(f[2]));
    r.sample_count = static_cast<Index>(std::stoll(f[3]));
    r.replicates = std::stoi(f[4]);
    r.mode = parse_mode_name(f[5]);
    r.empirical_mse = parse_double(f[6]);
    r.standard_error = parse_double(f[7]);
    r.analytic_mse = f[8].empty() ? std::nullopt : std::optional<double>(parse_double(f[8]));
    r.baseline_mse = parse_double(f[9]);
    r.gamma = parse_double(f[10]);
    r.flags = f[11];
    r.seed = std::strtoull(f[12].c_str(), nullptr, 10);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SweepRecord> read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("read_csv: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_csv(buf.str());
}

std::string manifest_to_string(const ScenarioConfig& cfg,
                               const std::vector<SweepRecord>& records,
                               const std::string& timestamp_utc) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["timestamp_utc"] = timestamp_utc;
  j["master_seed"] = cfg.master_seed;

  nlohmann::json cj;
  cj["scenario"] = scenario_name(cfg.id);
  cj["p"] = cfg.p;
  cj["sigma_x2"] = cfg.sigma_x2;
  cj["sigma_v2"] = cfg.sigma_v2;
  cj["sigma_z2"] = cfg.assumed_noise_variance;
  switch (cfg.covariance_rule) {
    case CovarianceRule::Identity: cj["covariance_rule"] = "identity"; break;
    case CovarianceRule::RandomizedGram: cj["covariance_rule"] = "randomized-gram"; break;
    case CovarianceRule::Explicit: cj["covariance_rule"] = "explicit"; break;
  }
  cj["p_S_grid"] = cfg.subset_sizes;
  cj["n_grid"] = cfg.sample_counts;
  cj["replicates"] = cfg.replicates;
  cj["mode"] = mode_name(cfg.mode);
  cj["common_random_numbers"] = cfg.common_random_numbers;
  cj["rcond"] = cfg.rcond;
  j["config"] = cj;

  nlohmann::json cells = nlohmann::json::array();
  for (const SweepRecord& r : records) {
    cells.push_back({{"p_S", r.subset_size}, {"n", r.sample_count}, {"seed", r.seed}});
  }
  j["cell_seeds"] = cells;

  nlohmann::json baselines = nlohmann::json::array();
  std::vector<Index> seen;
  for (const SweepRecord& r : records) {
    if (std::find(seen.begin(), seen.end(), r.sample_count) == seen.end()) {
      seen.push_back(r.sample_count);
      baselines.push_back(
          {{"n", r.sample_count}, {"seed", baseline_seed(cfg, r.sample_count)}});
    }
  }
  j["baseline_seeds"] = baselines;

  return j.dump(2) + "\n";
}

void write_manifest(const ScenarioConfig& cfg, const std::vector<SweepRecord>& records,
                    const std::string& csv_path) {
  const std::string path = csv_path + ".manifest";
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("write_manifest: cannot open '" + path + "' for writing");
  }

  char stamp[32] = "unknown";
  const std::time_t now = std::time(nullptr);
  if (std::tm tm_utc{}; gmtime_r(&now, &tm_utc) != nullptr) {
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  }
  file << manifest_to_string(cfg, records, stamp);
  if (!file.good()) {
    throw std::runtime_error("write_manifest: write to '" + path + "' failed");
  }
}

}  // namespace lmmse
