#pragma once

#include <utility>

#include "ringcrystal/elliptic.hpp"
#include "ringcrystal/field.hpp"

namespace ringcrystal {

/// One physical instance: ring of unit radius, unit mass, hbar = 1.
struct RingProblem {
  double lambda;  ///< attractive coupling strength, > 0
  double alpha;   ///< Aharonov-Bohm flux fraction, kept exactly as given

  RingProblem(double lambda_, double alpha_);

  /// Flux reduced to the fundamental interval (-1/2, 1/2].
  double alpha_canonical() const;
};

/// Reduces alpha modulo 1 into (-1/2, 1/2].  Idempotent; alpha and alpha + 1
/// map to the same value.
double canonical_alpha(double alpha);

/// Closed-form record for the stationary half-flux ground state
///   psi(phi) = (k K / (pi sqrt(lambda))) cn(phi K / pi, k),
/// with the modulus fixed by  [E - (1 - k^2) K] K = pi lambda / 2.
struct HalfFluxAnalytic {
  EllipticModulus modulus;
  double bigK;
  double bigE;
  double mu;      ///< chemical potential (K^2/pi^2)(1/2 - k^2)
  double eps;     ///< energy per particle
  double lambda;
  /// Set when k < 1e-6 and eps was replaced by its lambda -> 0 limit 1/8
  /// (the printed closed form degenerates to 0/0 there).
  bool small_lambda_limit = false;
};

/// Solves the modulus equation  [E - (1 - k^2) K] K = pi lambda / 2  for the
/// unique k in (0, 1).  The left side is strictly increasing in k, so a
/// bracketed bisection refined by safeguarded secant steps is global.  The
/// working variable switches with lambda for conditioning: k below
/// lambda = 1/2, kc up to lambda = 8, log(kc) beyond (kc ~ exp(-pi*lambda/2)
/// makes anything else hopeless).  Supported range lambda <= 12.
EllipticModulus solve_modulus(double lambda);

/// Full closed-form record at flux 1/2 for the given coupling.
HalfFluxAnalytic half_flux_analytic(double lambda);

/// Record plus the twisted-frame field sampled on an n_grid-point ring.
/// The sampled norm must come out 1 to 1e-10 (a theorem once the modulus
/// equation holds); violation means the grid cannot resolve the state and
/// raises an error.
std::pair<HalfFluxAnalytic, WaveField> half_flux_state(double lambda,
                                                       Eigen::Index n_grid);

double half_flux_mu(const HalfFluxAnalytic& a);
double half_flux_energy(const HalfFluxAnalytic& a);

/// Plane-wave branch exp(i n phi)/sqrt(2 pi):  (n - alpha)^2/2 - lambda/(4 pi).
double uniform_branch_energy(double lambda, double alpha, int winding);

/// Coupling threshold pi/2 above which the zero-flux ground state is a lump.
double critical_coupling();

/// Energy of the rotating-soliton branch: the zero-flux ground-state energy
/// plus the rotational cost alpha^2/2 per particle.  alpha must already be
/// canonical in (-1/2, 1/2].
double wilczek_rotating_energy(double eps_zero_flux, double alpha);

/// Strong-coupling flux dependence of the ground-state energy,
///   delta_eps = -3 [1 - cos(2 pi alpha)] lambda^2 exp(-pi lambda),
/// always <= 0.
double asymptotic_delta_energy(double lambda, double alpha);

}  // namespace ringcrystal
