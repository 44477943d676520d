#include "ringcrystal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ringcrystal/io.hpp"
#include "ringcrystal/version.hpp"

namespace ringcrystal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kContrastThreshold = 1e-3;
constexpr double kBisectionWidth = 0.02;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Runs tasks[0..n) on at most `jobs` threads; order of completion is
// irrelevant because each task writes to its own slot.
void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min<int>(jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        tasks[i]();
      }
    });
  }
  for (auto& th : pool) th.join();
}

SweepMetadata make_metadata(const SolverConfig& config) {
  SweepMetadata meta;
  meta.tool_version = std::string(kToolVersion);
  meta.timestamp_iso8601 = iso8601_utc_now();
  meta.config_hash = config_hash_hex(config);
  meta.config = config;
  return meta;
}

struct SolvedPoint {
  StationaryState state;
  double wall_time_s = 0.0;
};

SolvedPoint solve_point(double lambda, double alpha,
                        const SolverConfig& config) {
  const double t0 = now_seconds();
  SolvedPoint p{imaginary_time_ground_state(RingProblem(lambda, alpha), config),
                0.0};
  p.wall_time_s = now_seconds() - t0;
  return p;
}

double best_uniform_energy(double lambda, double alpha) {
  const int center = static_cast<int>(std::lround(alpha));
  double best = std::numeric_limits<double>::infinity();
  for (int n = center - 2; n <= center + 2; ++n) {
    best = std::min(best, uniform_branch_energy(lambda, alpha, n));
  }
  return best;
}

SweepRecord make_record(double lambda, double alpha, const SolvedPoint& point,
                        double eps_zero) {
  SweepRecord rec;
  rec.lambda = lambda;
  rec.alpha = alpha;
  rec.eps_numeric = point.state.eps;
  rec.eps_uniform_best = best_uniform_energy(lambda, alpha);
  rec.eps_wilczek = wilczek_rotating_energy(eps_zero, canonical_alpha(alpha));
  if (std::abs(canonical_alpha(alpha) - 0.5) < 1e-12) {
    rec.eps_analytic_half_flux = half_flux_analytic(lambda).eps;
  }
  rec.delta_eps = point.state.eps - eps_zero;
  rec.delta_eps_asymptotic = asymptotic_delta_energy(lambda, alpha);
  rec.residual = point.state.residual;
  rec.converged = point.state.converged;
  rec.n_points = point.state.field.grid.n();
  rec.wall_time_s = point.wall_time_s;
  return rec;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y,
                 double* intercept = nullptr) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (intercept != nullptr) *intercept = (sy - slope * sx) / n;
  return slope;
}

double principal_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

SweepTable flux_sweep(double lambda, const std::vector<double>& alphas,
                      const SolverConfig& config, int jobs) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < -1.0 || alphas[i] > 1.5) {
      throw std::invalid_argument(
          "flux_sweep: flux values must lie in [-1, 3/2]");
    }
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      if (alphas[i] == alphas[j]) {
        throw std::invalid_argument("flux_sweep: duplicate flux value");
      }
    }
  }
  SweepTable table;
  table.meta = make_metadata(config);

  const SolvedPoint zero = solve_point(lambda, 0.0, config);

  std::vector<SweepRecord> records(alphas.size());
  std::vector<std::function<void()>> tasks;
  tasks.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    tasks.push_back([&, i]() {
      const double alpha = alphas[i];
      const SolvedPoint p =
          (alpha == 0.0) ? zero : solve_point(lambda, alpha, config);
      records[i] = make_record(lambda, alpha, p, zero.state.eps);
    });
  }
  run_parallel(tasks, jobs);

  std::stable_sort(records.begin(), records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) {
                     return a.alpha < b.alpha;
                   });
  table.records = std::move(records);
  return table;
}

ThresholdResult threshold_scan(const std::vector<double>& lambdas,
                               const SolverConfig& config, int jobs) {
  if (lambdas.size() < 2) {
    throw std::invalid_argument("threshold_scan: need at least two couplings");
  }
  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end());

  ThresholdResult result;
  result.table.meta = make_metadata(config);

  struct Point {
    double lambda;
    double contrast;
    SweepRecord record;
  };
  std::vector<Point> points(ls.size());

  auto evaluate = [&](double lambda) {
    const SolvedPoint p = solve_point(lambda, 0.0, config);
    Point pt;
    pt.lambda = lambda;
    pt.contrast = density_contrast(p.state.field);
    pt.record = make_record(lambda, 0.0, p, p.state.eps);
    return pt;
  };

  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    tasks.push_back([&, i]() { points[i] = evaluate(ls[i]); });
  }
  run_parallel(tasks, jobs);

  double lo = -1.0;
  double hi = -1.0;
  for (const auto& pt : points) {
    if (pt.contrast < kContrastThreshold) {
      lo = std::max(lo, pt.lambda);
    } else if (hi < 0.0 || pt.lambda < hi) {
      hi = pt.lambda;
    }
    result.contrast_curve.emplace_back(pt.lambda, pt.contrast);
    result.table.records.push_back(pt.record);
  }
  if (lo < 0.0 || hi < 0.0 || lo >= hi) {
    std::ostringstream msg;
    msg << "threshold_scan: couplings do not bracket the transition "
        << "(uniform side up to " << lo << ", lumped side from " << hi << ")";
    throw std::runtime_error(msg.str());
  }

  while (hi - lo > kBisectionWidth) {
    const double mid = 0.5 * (lo + hi);
    const Point pt = evaluate(mid);
    result.contrast_curve.emplace_back(pt.lambda, pt.contrast);
    result.table.records.push_back(pt.record);
    if (pt.contrast < kContrastThreshold) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.lambda_c = 0.5 * (lo + hi);

  std::sort(result.contrast_curve.begin(), result.contrast_curve.end());
  std::stable_sort(result.table.records.begin(), result.table.records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) {
                     return a.lambda < b.lambda;
                   });
  return result;
}

AsymptoticResult asymptotic_check(const std::vector<double>& lambdas,
                                  const SolverConfig& config, int jobs) {
  SolverConfig cfg = config;
  cfg.residual_tol = std::min(config.residual_tol, 1e-11);

  AsymptoticResult result;
  result.table.meta = make_metadata(cfg);

  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end());

  std::vector<std::optional<SolvedPoint>> at_zero(ls.size());
  std::vector<std::optional<SolvedPoint>> at_half(ls.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    tasks.push_back([&, i]() { at_zero[i] = solve_point(ls[i], 0.0, cfg); });
    tasks.push_back([&, i]() { at_half[i] = solve_point(ls[i], 0.5, cfg); });
  }
  run_parallel(tasks, jobs);

  for (std::size_t i = 0; i < ls.size(); ++i) {
    AsymptoticRow row;
    row.lambda = ls[i];
    row.eps_zero = at_zero[i]->state.eps;
    row.eps_half = at_half[i]->state.eps;
    row.eps_half_analytic = half_flux_analytic(ls[i]).eps;
    row.delta_measured = row.eps_half - row.eps_zero;
    row.delta_formula = asymptotic_delta_energy(ls[i], 0.5);
    row.ratio = row.delta_measured / row.delta_formula;
    // The gap between the numerical and closed-form half-flux energies is an
    // empirical measure of the solver noise at these settings.
    row.noise_floor = std::max(std::abs(row.eps_half - row.eps_half_analytic),
                               8.0 * std::numeric_limits<double>::epsilon() *
                                   std::abs(row.eps_half));
    row.usable = at_zero[i]->state.converged && at_half[i]->state.converged &&
                 std::abs(row.delta_measured) >= 10.0 * row.noise_floor;
    result.rows.push_back(row);

    result.table.records.push_back(
        make_record(ls[i], 0.0, *at_zero[i], row.eps_zero));
    result.table.records.push_back(
        make_record(ls[i], 0.5, *at_half[i], row.eps_zero));
  }

  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    const AsymptoticRow& a = result.rows[i];
    const AsymptoticRow& b = result.rows[i + 1];
    if (!a.usable || !b.usable) continue;
    AsymptoticSlope s;
    s.lambda_lo = a.lambda;
    s.lambda_hi = b.lambda;
    s.measured = (std::log(std::abs(b.delta_measured)) -
                  std::log(std::abs(a.delta_measured))) /
                 (b.lambda - a.lambda);
    s.expected = -kPi + 2.0 * std::log(b.lambda / a.lambda) /
                            (b.lambda - a.lambda);
    result.slopes.push_back(s);
  }
  return result;
}

double density_fwhm(const WaveField& field) {
  const WaveField aligned = align_density_max(field);
  const Eigen::ArrayXd rho = density(aligned);
  const Eigen::Index n = aligned.grid.n();
  const double h = aligned.grid.spacing();
  const Eigen::Index j_max = n / 2;
  const double half = 0.5 * rho[j_max];

  auto crossing = [&](int dir) {
    Eigen::Index j = j_max;
    for (Eigen::Index s = 0; s < n; ++s) {
      const Eigen::Index j_next = (j + dir + n) % n;
      if (rho[j_next] < half) {
        // Linear interpolation between j (above) and j_next (below).
        const double frac = (rho[j] - half) / (rho[j] - rho[j_next]);
        return static_cast<double>(s) + frac;
      }
      j = j_next;
    }
    return static_cast<double>(n);  // never crossed: width is the whole ring
  };

  return h * (crossing(+1) + crossing(-1));
}

ScalingResult lump_scaling_scan(const std::vector<double>& lambdas,
                                const SolverConfig& config, int jobs) {
  SolverConfig base = config;
  base.residual_tol = std::min(config.residual_tol, 1e-11);

  ScalingResult result;
  result.table.meta = make_metadata(base);

  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end());

  std::vector<ScalingRow> rows(ls.size());
  std::vector<SweepRecord> records(ls.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    tasks.push_back([&, i]() {
      SolverConfig cfg = base;
      if (ls[i] > 8.0) {
        cfg.n_points = std::max<Eigen::Index>(cfg.n_points, 1024);
        // The residual floor scales with the top kinetic multiplier; 1e-11
        // is unreachable on the larger grid.
        cfg.residual_tol = std::max(cfg.residual_tol, 5e-11);
      }
      const SolvedPoint p = solve_point(ls[i], 0.0, cfg);
      const WaveField aligned = align_density_max(p.state.field);
      ScalingRow row;
      row.lambda = ls[i];
      row.n_points = aligned.grid.n();
      row.fwhm = density_fwhm(aligned);
      row.antipode_amplitude = std::abs(aligned.psi[0]);  // peak is at pi
      row.resolved = row.fwhm >= 8.0 * aligned.grid.spacing();
      row.eps = p.state.eps;
      row.residual = p.state.residual;
      row.converged = p.state.converged;
      rows[i] = row;
      records[i] = make_record(ls[i], 0.0, p, p.state.eps);
    });
  }
  run_parallel(tasks, jobs);
  result.rows = rows;
  result.table.records = records;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto find_row = [&](double lambda) -> const ScalingRow* {
    for (const auto& r : rows) {
      if (std::abs(r.lambda - lambda) < 1e-9) return &r;
    }
    return nullptr;
  };
  const ScalingRow* at4 = find_row(4.0);
  const ScalingRow* at8 = find_row(8.0);
  result.fwhm_ratio_4_to_8 =
      (at4 != nullptr && at8 != nullptr) ? at8->fwhm / at4->fwhm : nan;

  std::vector<double> xs;
  std::vector<double> raw;
  std::vector<double> corrected;
  for (const auto& r : rows) {
    if (!r.resolved || !r.converged || r.antipode_amplitude <= 0.0) continue;
    xs.push_back(r.lambda);
    raw.push_back(std::log(r.antipode_amplitude));
    corrected.push_back(std::log(r.antipode_amplitude) -
                        0.5 * std::log(r.lambda));
  }
  if (xs.size() >= 2) {
    result.antipode_slope_raw = lsq_slope(xs, raw);
    result.antipode_slope_corrected =
        lsq_slope(xs, corrected, &result.antipode_intercept);
  } else {
    result.antipode_slope_raw = nan;
    result.antipode_slope_corrected = nan;
    result.antipode_intercept = nan;
  }
  return result;
}

RampReport flux_ramp_experiment(double lambda, double alpha_final,
                                double t_ramp, const SolverConfig& config,
                                double t_final) {
  if (!(lambda > critical_coupling())) {
    throw std::invalid_argument(
        "flux_ramp_experiment: lambda must exceed the lump threshold pi/2");
  }
  if (std::abs(alpha_final) > 0.5) {
    throw std::invalid_argument(
        "flux_ramp_experiment: |alpha_final| must be <= 1/2");
  }
  if (!(t_ramp > 0.0) || !(t_final > t_ramp)) {
    throw std::invalid_argument(
        "flux_ramp_experiment: need 0 < t_ramp < t_final");
  }

  const SolvedPoint gs = solve_point(lambda, 0.0, config);
  if (!gs.state.converged) {
    throw std::runtime_error(
        "flux_ramp_experiment: zero-flux ground state did not converge");
  }

  const FluxSchedule schedule = [alpha_final, t_ramp](double t) {
    return t >= t_ramp ? alpha_final : alpha_final * (t / t_ramp);
  };
  const long sample_every =
      std::max<long>(1, static_cast<long>(std::lround(0.025 / config.dt)));
  const Trajectory traj =
      real_time_evolve(gs.state.field, RingProblem(lambda, alpha_final),
                       t_final, config, schedule, sample_every);

  RampReport report;
  report.lambda = lambda;
  report.alpha_final = alpha_final;
  report.t_ramp = t_ramp;
  report.t_final = t_final;
  report.series = traj.samples;

  report.min_contrast = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.samples) {
    report.min_contrast = std::min(report.min_contrast, s.contrast);
  }
  if (report.min_contrast < 0.05) {
    std::ostringstream msg;
    msg << "flux_ramp_experiment: lump contrast collapsed to "
        << report.min_contrast << " during the ramp";
    throw std::runtime_error(msg.str());
  }

  // Unwrapped centroid angle, fitted over the second half of the run.
  std::vector<double> ts;
  std::vector<double> theta;
  double unwrapped = 0.0;
  double prev = traj.samples.front().centroid;
  for (const auto& s : traj.samples) {
    if (std::isnan(s.centroid)) continue;
    unwrapped += principal_angle(s.centroid - prev);
    prev = s.centroid;
    if (s.t >= 0.5 * t_final) {
      ts.push_back(s.t);
      theta.push_back(unwrapped);
    }
  }
  if (ts.size() < 8) {
    throw std::runtime_error(
        "flux_ramp_experiment: not enough centroid samples for the fit");
  }
  report.omega_fit = lsq_slope(ts, theta);
  report.omega_speed = std::abs(report.omega_fit);
  report.kinetic_angular_momentum_final =
      traj.samples.back().kinetic_angular_momentum;
  const double l0 = traj.samples.front().angular_momentum;
  report.canonical_momentum_drift = 0.0;
  for (const auto& s : traj.samples) {
    report.canonical_momentum_drift = std::max(
        report.canonical_momentum_drift, std::abs(s.angular_momentum - l0));
  }
  return report;
}

}  // namespace ringcrystal
