#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringcrystal/solver.hpp"

namespace ringcrystal {

/// One converged (or flagged) point of a sweep.  Field order is the CSV
/// column order.
struct SweepRecord {
  double lambda = 0.0;
  double alpha = 0.0;
  double eps_numeric = 0.0;
  double eps_uniform_best = 0.0;  ///< min over integer windings
  double eps_wilczek = 0.0;       ///< eps(0) + alpha_canonical^2 / 2
  std::optional<double> eps_analytic_half_flux;  ///< only at alpha = 1/2
  double delta_eps = 0.0;              ///< eps(alpha) - eps(0)
  double delta_eps_asymptotic = 0.0;   ///< closed form at this (lambda, alpha)
  double residual = 0.0;
  bool converged = false;
  Eigen::Index n_points = 0;
  double wall_time_s = 0.0;
};

struct SweepMetadata {
  std::string tool_version;
  std::string timestamp_iso8601;
  std::string config_hash;  ///< FNV-1a of the canonical config JSON, hex
  SolverConfig config;
};

struct SweepTable {
  SweepMetadata meta;
  std::vector<SweepRecord> records;
};

/// Ground-state energies across a flux list at fixed coupling.  The
/// zero-flux reference is solved once and shared by the rotating branch and
/// the delta column.  Points run on a bounded worker pool (jobs = 0 means
/// hardware concurrency); records come back ordered by alpha.  Unconverged
/// points are kept and flagged, never dropped.
SweepTable flux_sweep(double lambda, const std::vector<double>& alphas,
                      const SolverConfig& config, int jobs = 0);

struct ThresholdResult {
  double lambda_c = 0.0;
  SweepTable table;  ///< all solved points, alpha = 0
  std::vector<std::pair<double, double>> contrast_curve;  ///< (lambda, contrast)
};

/// Locates the lump-formation threshold at zero flux.  Order parameter is
/// the density contrast; the input couplings must bracket the crossing of
/// contrast = 1e-3, which is then bisected to a width of 0.02.
ThresholdResult threshold_scan(const std::vector<double>& lambdas,
                               const SolverConfig& config, int jobs = 0);

struct AsymptoticRow {
  double lambda = 0.0;
  double eps_zero = 0.0;
  double eps_half = 0.0;           ///< numerical, same grid and tolerances
  double eps_half_analytic = 0.0;  ///< closed form, three-way check
  double delta_measured = 0.0;     ///< eps_half - eps_zero
  double delta_formula = 0.0;
  double ratio = 0.0;              ///< measured / formula
  double noise_floor = 0.0;
  bool usable = false;             ///< |delta| >= 10 x noise floor
};

struct AsymptoticSlope {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double measured = 0.0;  ///< d ln|delta| / d lambda between the pair
  double expected = 0.0;  ///< -pi + 2 ln(hi/lo)/(hi - lo)
};

struct AsymptoticResult {
  std::vector<AsymptoticRow> rows;
  std::vector<AsymptoticSlope> slopes;  ///< adjacent usable pairs
  SweepTable table;
};

/// Flux dependence of the ground-state energy deep in the lump regime,
/// against the strong-coupling law.  eps(0) and eps(1/2) are solved with
/// identical grid and tolerances so the discretization bias cancels in the
/// difference; the closed-form eps(1/2) is recorded alongside and its gap to
/// the numerical value serves as the empirical noise floor.  Residual
/// tolerance is forced to at least 1e-11.
AsymptoticResult asymptotic_check(const std::vector<double>& lambdas,
                                  const SolverConfig& config, int jobs = 0);

struct ScalingRow {
  double lambda = 0.0;
  Eigen::Index n_points = 0;
  double fwhm = 0.0;  ///< of the density profile
  double antipode_amplitude = 0.0;
  bool resolved = false;  ///< width covered by >= 8 grid points
  double eps = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double fwhm_ratio_4_to_8 = 0.0;  ///< NaN when either endpoint is absent
  double antipode_slope_raw = 0.0;
  double antipode_slope_corrected = 0.0;  ///< sqrt(lambda) prefactor removed
  double antipode_intercept = 0.0;        ///< of the corrected fit
  SweepTable table;
};

/// Zero-flux lump geometry versus coupling: width of the density profile and
/// wavefunction amplitude at the antipode of the peak.  The grid is enlarged
/// to 1024 points for lambda > 8.
ScalingResult lump_scaling_scan(const std::vector<double>& lambdas,
                                const SolverConfig& config, int jobs = 0);

struct RampReport {
  double lambda = 0.0;
  double alpha_final = 0.0;
  double t_ramp = 0.0;
  double t_final = 0.0;
  std::vector<TrajectorySample> series;
  double omega_fit = 0.0;    ///< signed slope of the unwrapped centroid angle
  double omega_speed = 0.0;  ///< |omega_fit|
  double kinetic_angular_momentum_final = 0.0;
  double canonical_momentum_drift = 0.0;  ///< max |<L>(t) - <L>(0)|
  double min_contrast = 0.0;
};

/// Prepares the zero-flux lump, ramps the flux linearly to alpha_final over
/// t_ramp, evolves freely to t_final, and fits the post-ramp rotation rate
/// of the density centroid over the second half of the run.  The lump spins
/// up to angular speed |alpha_final|; with the flux convention used here the
/// rotation direction is opposite to the flux (canonical momentum stays at
/// zero, so the kinetic momentum lands at -alpha_final).
RampReport flux_ramp_experiment(double lambda, double alpha_final,
                                double t_ramp, const SolverConfig& config,
                                double t_final = 10.0);

/// Full width at half maximum of the density profile, from linear
/// interpolation of the half-max crossings around the peak.
double density_fwhm(const WaveField& field);

}  // namespace ringcrystal
