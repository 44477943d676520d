// Command-line front end: one subcommand per experiment.
//
// Exit codes: 0 success with all checks passing, 1 computation or check
// failure, 2 usage error.  Every run echoes its configuration to
// <out>/config.json before computing.  The environment variable
// RING_CRYSTAL_OUT overrides --out.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ringcrystal/analytic.hpp"
#include "ringcrystal/elliptic.hpp"
#include "ringcrystal/harness.hpp"
#include "ringcrystal/io.hpp"
#include "ringcrystal/solver.hpp"
#include "ringcrystal/version.hpp"

namespace fs = std::filesystem;
using namespace ringcrystal;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CommonOpts {
  SolverConfig config;
  std::string out = "out";
  int jobs = 0;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n-points", o.config.n_points,
                  "grid points, power of two >= 64")
      ->capture_default_str();
  cmd->add_option("--dtau", o.config.dtau, "imaginary-time step")
      ->capture_default_str();
  cmd->add_option("--dt", o.config.dt, "real-time step")
      ->capture_default_str();
  cmd->add_option("--max-iters", o.config.max_iters,
                  "imaginary-time iteration cap")
      ->capture_default_str();
  cmd->add_option("--residual-tol", o.config.residual_tol,
                  "stationarity residual tolerance")
      ->capture_default_str();
  cmd->add_option("--energy-tol", o.config.energy_tol,
                  "energy change per step tolerance")
      ->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "seed for the start noise")
      ->capture_default_str();
  cmd->add_option("--noise-amplitude", o.config.noise_amplitude,
                  "symmetry-breaking noise amplitude")
      ->capture_default_str();
  cmd->add_option("--out", o.out,
                  "output directory (env RING_CRYSTAL_OUT overrides)")
      ->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker pool cap, 0 = all cores")
      ->capture_default_str();
}

fs::path resolve_out(const CommonOpts& o) {
  const char* env = std::getenv("RING_CRYSTAL_OUT");
  if (env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path(o.out);
}

fs::path prepare_out(const CommonOpts& o) {
  const fs::path dir = resolve_out(o);
  fs::create_directories(dir);
  write_text_file(dir / "config.json", config_json(o.config));
  return dir;
}

int fail(const std::string& reason) {
  std::cout << "FAIL: " << reason << "\n";
  return 1;
}

int run_ground_state(const CommonOpts& o, double lambda, double alpha) {
  const fs::path dir = prepare_out(o);
  const StationaryState gs =
      imaginary_time_ground_state(RingProblem(lambda, alpha), o.config);

  std::cout << "ground state  lambda=" << lambda << "  alpha=" << alpha << "\n"
            << "  eps       = " << format_g17(gs.eps) << "\n"
            << "  mu        = " << format_g17(gs.mu) << "\n"
            << "  residual  = " << format_g17(gs.residual) << "\n"
            << "  iterations= " << gs.iterations << "\n"
            << "  converged = " << (gs.converged ? "yes" : "no") << "\n";

  const WaveField aligned = align_density_max(gs.field);
  const Eigen::ArrayXd phi = aligned.grid.nodes();
  const Eigen::ArrayXd rho = density(aligned);
  write_xy(dir / "profile.dat",
           std::vector<double>(phi.data(), phi.data() + phi.size()),
           std::vector<double>(rho.data(), rho.data() + rho.size()));

  if (!gs.converged) {
    return fail("solver did not converge (residual " +
                format_g17(gs.residual) + ")");
  }
  if (std::abs(canonical_alpha(alpha) - 0.5) < 1e-12) {
    const double eps_analytic = half_flux_analytic(lambda).eps;
    const double gap = std::abs(gs.eps - eps_analytic);
    std::cout << "  closed form = " << format_g17(eps_analytic)
              << "  |gap| = " << format_g17(gap) << "\n";
    if (gap > 1e-6) {
      return fail("numerical energy disagrees with the closed form");
    }
  }
  return 0;
}

int run_flux_sweep(const CommonOpts& o, double lambda,
                   const std::string& alphas_spec) {
  const fs::path dir = prepare_out(o);
  const std::vector<double> alphas = parse_range(alphas_spec);
  const SweepTable table = flux_sweep(lambda, alphas, o.config, o.jobs);
  write_sweep_artifacts(table, dir, "flux_sweep");

  std::cout << "flux sweep  lambda=" << lambda << "  points="
            << table.records.size() << "\n";
  double worst_margin = std::numeric_limits<double>::infinity();
  bool all_converged = true;
  for (const auto& r : table.records) {
    worst_margin = std::min(worst_margin, r.eps_wilczek - r.eps_numeric);
    all_converged = all_converged && r.converged;
    std::cout << "  alpha=" << format_g17(r.alpha)
              << "  eps=" << format_g17(r.eps_numeric)
              << "  eps_wilczek=" << format_g17(r.eps_wilczek)
              << (r.converged ? "" : "  [unconverged]") << "\n";
  }
  std::cout << "  min(eps_wilczek - eps_numeric) = " << format_g17(worst_margin)
            << "\n";
  if (!all_converged) return fail("unconverged sweep points");
  if (worst_margin < -1e-9) {
    return fail("rotating-soliton branch fell below the numerical ground state");
  }
  return 0;
}

int run_threshold(const CommonOpts& o, const std::string& lambdas_spec) {
  const fs::path dir = prepare_out(o);
  const ThresholdResult res =
      threshold_scan(parse_range(lambdas_spec), o.config, o.jobs);
  write_sweep_artifacts(res.table, dir, "threshold");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [l, c] : res.contrast_curve) {
    xs.push_back(l);
    ys.push_back(c);
  }
  write_xy(dir / "contrast_vs_lambda.dat", xs, ys);

  std::cout << "threshold scan: lambda_c = " << format_g17(res.lambda_c)
            << "  (pi/2 = " << format_g17(kPi / 2) << ")\n";
  if (std::abs(res.lambda_c - kPi / 2) > 0.05) {
    return fail("estimate misses pi/2 by more than 0.05");
  }
  return 0;
}

int run_asymptotic(const CommonOpts& o, const std::string& lambdas_spec) {
  const fs::path dir = prepare_out(o);
  const AsymptoticResult res =
      asymptotic_check(parse_range(lambdas_spec), o.config, o.jobs);
  write_sweep_artifacts(res.table, dir, "asymptotic");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : res.rows) {
    xs.push_back(row.lambda);
    ys.push_back(row.delta_measured);
  }
  write_xy(dir / "delta_eps_vs_lambda.dat", xs, ys);

  bool ok = true;
  for (const auto& row : res.rows) {
    std::cout << "  lambda=" << row.lambda
              << "  delta_eps=" << format_g17(row.delta_measured)
              << "  formula=" << format_g17(row.delta_formula)
              << "  ratio=" << format_g17(row.ratio)
              << (row.usable ? "" : "  [below noise floor]") << "\n";
    if (row.usable && !(row.delta_measured < 0.0)) {
      ok = false;
      std::cout << "    sign violation\n";
    }
  }
  for (const auto& s : res.slopes) {
    const double rel = std::abs(s.measured - s.expected) / std::abs(s.expected);
    std::cout << "  slope " << s.lambda_lo << "->" << s.lambda_hi << ": "
              << format_g17(s.measured) << "  expected "
              << format_g17(s.expected) << "  rel.dev " << format_g17(rel)
              << "\n";
    if (rel > 0.10) {
      ok = false;
      std::cout << "    slope outside 10%\n";
    }
  }
  return ok ? 0 : fail("asymptotic-law checks failed");
}

int run_scaling(const CommonOpts& o, const std::string& lambdas_spec) {
  const fs::path dir = prepare_out(o);
  const ScalingResult res =
      lump_scaling_scan(parse_range(lambdas_spec), o.config, o.jobs);
  write_sweep_artifacts(res.table, dir, "scaling");
  std::vector<double> xs;
  std::vector<double> w;
  std::vector<double> amp;
  for (const auto& row : res.rows) {
    xs.push_back(row.lambda);
    w.push_back(row.fwhm);
    amp.push_back(row.antipode_amplitude);
    std::cout << "  lambda=" << row.lambda << "  fwhm=" << format_g17(row.fwhm)
              << "  antipode=" << format_g17(row.antipode_amplitude)
              << (row.resolved ? "" : "  [under-resolved]") << "\n";
  }
  write_xy(dir / "fwhm_vs_lambda.dat", xs, w);
  write_xy(dir / "antipode_vs_lambda.dat", xs, amp);

  std::cout << "  fwhm(8)/fwhm(4)        = " << format_g17(res.fwhm_ratio_4_to_8)
            << "\n"
            << "  antipode ln-slope       = "
            << format_g17(res.antipode_slope_raw) << " (raw), "
            << format_g17(res.antipode_slope_corrected)
            << " (sqrt-lambda removed; expect -pi/2 = "
            << format_g17(-kPi / 2) << ")\n";

  bool ok = true;
  if (std::isfinite(res.fwhm_ratio_4_to_8) &&
      std::abs(res.fwhm_ratio_4_to_8 - 0.5) > 0.05) {
    ok = false;
    std::cout << "    width did not halve under coupling doubling\n";
  }
  if (std::abs(res.antipode_slope_corrected + kPi / 2) > 0.05 * (kPi / 2)) {
    ok = false;
    std::cout << "    antipode slope outside 5% of -pi/2\n";
  }
  return ok ? 0 : fail("lump-scaling checks failed");
}

int run_ramp(const CommonOpts& o, double lambda, double alpha_final,
             double t_ramp, double t_final) {
  const fs::path dir = prepare_out(o);
  const RampReport rep =
      flux_ramp_experiment(lambda, alpha_final, t_ramp, o.config, t_final);

  std::vector<double> ts;
  std::vector<double> theta;
  std::vector<double> ell;
  for (const auto& s : rep.series) {
    ts.push_back(s.t);
    theta.push_back(s.centroid);
    ell.push_back(s.angular_momentum);
  }
  write_xy(dir / "centroid_vs_t.dat", ts, theta);
  write_xy(dir / "angular_momentum_vs_t.dat", ts, ell);

  std::ostringstream rj;
  rj << "{\n  \"lambda\": " << format_g17(rep.lambda)
     << ",\n  \"alpha_final\": " << format_g17(rep.alpha_final)
     << ",\n  \"t_ramp\": " << format_g17(rep.t_ramp)
     << ",\n  \"t_final\": " << format_g17(rep.t_final)
     << ",\n  \"omega_fit\": " << format_g17(rep.omega_fit)
     << ",\n  \"omega_speed\": " << format_g17(rep.omega_speed)
     << ",\n  \"kinetic_angular_momentum_final\": "
     << format_g17(rep.kinetic_angular_momentum_final)
     << ",\n  \"canonical_momentum_drift\": "
     << format_g17(rep.canonical_momentum_drift) << "\n}\n";
  write_text_file(dir / "ramp_report.json", rj.str());

  std::cout << "flux ramp  lambda=" << lambda << "  alpha_final=" << alpha_final
            << "\n"
            << "  omega_fit             = " << format_g17(rep.omega_fit)
            << " (speed " << format_g17(rep.omega_speed) << ")\n"
            << "  kinetic momentum      = "
            << format_g17(rep.kinetic_angular_momentum_final) << "\n"
            << "  canonical drift       = "
            << format_g17(rep.canonical_momentum_drift) << "\n";

  const double target = std::abs(alpha_final);
  if (target == 0.0) {
    if (rep.omega_speed > 1e-6) {
      return fail("lump rotated without any flux");
    }
    return 0;
  }
  if (std::abs(rep.omega_speed - target) > 0.10 * target) {
    return fail("fitted rotation speed misses |alpha_final| by more than 10%");
  }
  if (std::abs(std::abs(rep.kinetic_angular_momentum_final) - target) >
      0.05 * target) {
    return fail("kinetic angular momentum misses |alpha_final| by more than 5%");
  }
  return 0;
}

int run_analytic_check(const CommonOpts& o, double lambda) {
  const fs::path dir = prepare_out(o);
  const auto [rec, field] = half_flux_state(lambda, o.config.n_points);

  const double target = 0.5 * kPi * lambda;
  const double residual =
      (rec.bigE - rec.modulus.mc() * rec.bigK) * rec.bigK - target;
  const double residual_rel = std::abs(residual) / std::max(1.0, target);

  const double h = field.grid.spacing();
  const double nrm = field.psi.abs2().sum() * h;
  const double quartic = field.psi.abs2().square().sum() * h;
  const double identity_gap = rec.eps - (rec.mu + 0.5 * lambda * quartic);

  std::cout << "analytic check  lambda=" << lambda << "\n"
            << "  k                 = " << format_g17(rec.modulus.k())
            << "  (kc = " << format_g17(rec.modulus.kc()) << ")\n"
            << "  modulus residual  = " << format_g17(residual_rel)
            << " (relative)\n"
            << "  sampled norm - 1  = " << format_g17(nrm - 1.0) << "\n"
            << "  mu                = " << format_g17(rec.mu) << "\n"
            << "  eps               = " << format_g17(rec.eps) << "\n"
            << "  eps - mu - (lambda/2) int|psi|^4 = "
            << format_g17(identity_gap) << "\n";

  const Eigen::ArrayXd phi = field.grid.nodes();
  const Eigen::ArrayXd rho = density(field);
  write_xy(dir / "analytic_profile.dat",
           std::vector<double>(phi.data(), phi.data() + phi.size()),
           std::vector<double>(rho.data(), rho.data() + rho.size()));

  if (residual_rel > 1e-12) return fail("modulus-equation residual too large");
  if (std::abs(nrm - 1.0) > 1e-10) return fail("sampled norm off unity");
  if (std::abs(identity_gap) > 1e-8) {
    return fail("energy identity eps = mu + (lambda/2) int|psi|^4 violated");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of attractive bosons on a flux-threaded ring"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOpts opts;
  std::function<int()> run;

  double lambda = 5.0;
  double alpha = 0.0;
  double alpha_final = 0.3;
  double t_ramp = 1.0;
  double t_final = 10.0;
  std::string alphas_spec = "0:0.5:9";
  std::string lambdas_spec;

  auto* gs = app.add_subcommand("ground-state",
                                "imaginary-time ground state at one point");
  gs->add_option("--lambda", lambda, "coupling strength")->required();
  gs->add_option("--alpha", alpha, "flux fraction")->capture_default_str();
  add_common_flags(gs, opts);
  gs->callback([&]() { run = [&]() { return run_ground_state(opts, lambda, alpha); }; });

  auto* fsw = app.add_subcommand("flux-sweep",
                                 "ground-state energies across a flux list");
  fsw->add_option("--lambda", lambda, "coupling strength")->required();
  fsw->add_option("--alphas", alphas_spec, "flux range start:stop:count")
      ->capture_default_str();
  add_common_flags(fsw, opts);
  fsw->callback([&]() {
    run = [&]() { return run_flux_sweep(opts, lambda, alphas_spec); };
  });

  auto* th = app.add_subcommand("threshold",
                                "locate the lump-formation threshold");
  lambdas_spec = "1.2:2.0:5";
  th->add_option("--lambdas", lambdas_spec, "bracketing couplings start:stop:count")
      ->capture_default_str();
  add_common_flags(th, opts);
  th->callback([&]() {
    run = [&]() { return run_threshold(opts, lambdas_spec); };
  });

  std::string asym_spec = "5:7:3";
  auto* as = app.add_subcommand("asymptotic",
                                "strong-coupling flux-dependence law");
  as->add_option("--lambdas", asym_spec, "couplings start:stop:count")
      ->capture_default_str();
  add_common_flags(as, opts);
  as->callback([&]() { run = [&]() { return run_asymptotic(opts, asym_spec); }; });

  std::string scaling_spec = "4:10:7";
  auto* sc = app.add_subcommand("scaling", "lump width and antipode amplitude");
  sc->add_option("--lambdas", scaling_spec, "couplings start:stop:count")
      ->capture_default_str();
  add_common_flags(sc, opts);
  sc->callback([&]() { run = [&]() { return run_scaling(opts, scaling_spec); }; });

  auto* rp = app.add_subcommand("ramp", "flux-ramp spin-up experiment");
  rp->add_option("--lambda", lambda, "coupling strength")->capture_default_str();
  rp->add_option("--alpha-final", alpha_final, "final flux")->capture_default_str();
  rp->add_option("--t-ramp", t_ramp, "ramp duration")->capture_default_str();
  rp->add_option("--t-final", t_final, "total evolution time")->capture_default_str();
  add_common_flags(rp, opts);
  rp->callback([&]() {
    run = [&]() { return run_ramp(opts, lambda, alpha_final, t_ramp, t_final); };
  });

  auto* ac = app.add_subcommand("analytic-check",
                                "closed-form half-flux state self-consistency");
  ac->add_option("--lambda", lambda, "coupling strength")->required();
  add_common_flags(ac, opts);
  ac->callback([&]() { run = [&]() { return run_analytic_check(opts, lambda); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    std::cout << "FAIL: " << e.what() << "\n";
    return 1;
  }
}
