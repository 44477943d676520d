#include "ringcrystal/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ringcrystal {

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "lambda,alpha,eps_numeric,eps_uniform_best,eps_wilczek,"
         "eps_analytic_half_flux,delta_eps,delta_eps_asymptotic,residual,"
         "converged,n_points,wall_time_s\r\n";
  for (const auto& r : table.records) {
    out << format_g17(r.lambda) << ',' << format_g17(r.alpha) << ','
        << format_g17(r.eps_numeric) << ',' << format_g17(r.eps_uniform_best)
        << ',' << format_g17(r.eps_wilczek) << ','
        << (r.eps_analytic_half_flux ? format_g17(*r.eps_analytic_half_flux)
                                     : std::string())
        << ',' << format_g17(r.delta_eps) << ','
        << format_g17(r.delta_eps_asymptotic) << ',' << format_g17(r.residual)
        << ',' << (r.converged ? "true" : "false") << ',' << r.n_points << ','
        << format_g17(r.wall_time_s) << "\r\n";
  }
  return out.str();
}

std::string strip_wall_time_column(const std::string& csv) {
  std::ostringstream out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cut = line.rfind(',');
    out << (cut == std::string::npos ? line : line.substr(0, cut + 1))
        << "\r\n";
  }
  return out.str();
}

std::string config_json(const SolverConfig& config) {
  nlohmann::ordered_json j;
  j["n_points"] = static_cast<long>(config.n_points);
  j["dtau"] = config.dtau;
  j["dt"] = config.dt;
  j["max_iters"] = config.max_iters;
  j["residual_tol"] = config.residual_tol;
  j["energy_tol"] = config.energy_tol;
  j["seed"] = config.seed;
  j["noise_amplitude"] = config.noise_amplitude;
  return j.dump(2);
}

std::string config_hash_hex(const SolverConfig& config) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_json(config))));
  return buf;
}

std::string metadata_json(const SweepMetadata& meta) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(config_json(meta.config));
  j["seed"] = meta.config.seed;
  j["version"] = meta.tool_version;
  j["timestamp_iso8601"] = meta.timestamp_iso8601;
  j["config_hash"] = meta.config_hash;
  return j.dump(2);
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << content;
}

void write_sweep_artifacts(const SweepTable& table,
                           const std::filesystem::path& dir,
                           const std::string& basename) {
  write_text_file(dir / (basename + ".csv"), to_csv(table));
  write_text_file(dir / (basename + ".meta.json"), metadata_json(table.meta));
}

void write_xy(const std::filesystem::path& path, const std::vector<double>& x,
              const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("write_xy: column length mismatch");
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_g17(x[i]) << ' ' << format_g17(y[i]) << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<double> parse_range(const std::string& spec) {
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) {
    return {std::stod(spec)};
  }
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) {
    throw std::invalid_argument("range must be start:stop:count, got " + spec);
  }
  const double start = std::stod(spec.substr(0, c1));
  const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const long count = std::stol(spec.substr(c2 + 1));
  if (count < 1) {
    throw std::invalid_argument("range count must be >= 1, got " + spec);
  }
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (long i = 0; i < count; ++i) {
    out.push_back(start + step * static_cast<double>(i));
  }
  out.back() = stop;
  return out;
}

}  // namespace ringcrystal
