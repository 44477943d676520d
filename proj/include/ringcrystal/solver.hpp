#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ringcrystal/analytic.hpp"
#include "ringcrystal/field.hpp"

namespace ringcrystal {

struct SolverConfig {
  Eigen::Index n_points = 256;
  double dtau = 1e-3;          ///< imaginary-time step (initial; annealed on stall)
  double dt = 1e-3;            ///< real-time step
  long max_iters = 2'000'000;
  double residual_tol = 1e-9;
  double energy_tol = 1e-13;   ///< energy change per step at the nominal dtau
  std::uint64_t seed = 42;     ///< seeds the symmetry-breaking start noise
  double noise_amplitude = 1e-3;
};

struct StationaryState {
  WaveField field;  ///< lab frame, unit norm
  double mu = 0.0;
  double eps = 0.0;
  double residual = 0.0;  ///< L2 norm of (H - mu) psi
  long iterations = 0;
  bool converged = false;
};

struct EnergyMu {
  double eps;
  double mu;
};

/// H psi with H = (1/2)(-i d/dphi - alpha)^2 - lambda |psi|^2, kinetic part
/// applied spectrally as the multiplier (n - alpha)^2 / 2 on integer modes
/// n in [-N/2, N/2).  Lab frame only; result is not normalized.
Eigen::ArrayXcd apply_hamiltonian(const WaveField& field,
                                  const RingProblem& problem);

/// Energy per particle and chemical potential of a unit-normalized lab-frame
/// field:
///   eps = <(1/2)|(-i d - alpha) psi|^2> - (lambda/2) <|psi|^4>,
///   mu  = eps - (lambda/2) <|psi|^4>  shifted, i.e. <psi|H psi>.
/// Both come from one spectral derivative plus grid quadrature, so the
/// identity eps = mu + (lambda/2) int |psi|^4 holds to roundoff.
EnergyMu energy_and_mu(const WaveField& field, const RingProblem& problem);

/// Same functionals evaluated through the twisted-frame route: the samples
/// are first carried to periodic form by the gauge phase and the kinetic
/// multiplier acts on the shifted mode numbers nu = n - alpha.  Used to
/// check gauge invariance against the lab-frame path.
EnergyMu energy_and_mu_twisted(const WaveField& field,
                               const RingProblem& problem);

/// || (H - <H>) psi ||_{L2} by grid quadrature; unit-normalized lab frame.
double residual_norm(const WaveField& field, const RingProblem& problem);

/// Canonical angular momentum <-i d/dphi> of a unit-normalized field.
double angular_momentum(const WaveField& field);

/// Ground state by second-order (Strang) split-step evolution in imaginary
/// time with renormalization each step, started from the uniform mode plus
/// seeded noise.  Stops when the energy change per step drops below
/// energy_tol AND the residual is below residual_tol; on a stall with the
/// residual still high the step is annealed downward (the split-step fixed
/// point carries an O(dtau^2) bias) until the residual target is met or no
/// further progress is possible.  Never silently: non-convergence comes back
/// with converged = false.  A NaN/overflow in the field throws.
///
/// energy_trace, when given, records the energy after every step.
StationaryState imaginary_time_ground_state(
    const RingProblem& problem, const SolverConfig& config,
    std::vector<double>* energy_trace = nullptr);

/// Time-dependent flux alpha(t); an empty function means constant flux.
using FluxSchedule = std::function<double(double)>;

struct TrajectorySample {
  double t = 0.0;
  double norm = 0.0;
  double eps = 0.0;                 ///< at the instantaneous flux
  double contrast = 0.0;
  double centroid = 0.0;            ///< NaN when the field is too uniform
  double angular_momentum = 0.0;    ///< canonical <-i d/dphi>
  double kinetic_angular_momentum = 0.0;  ///< <-i d/dphi - alpha(t)>
  double sup_density_drift = 0.0;   ///< max_j |rho_j(t) - rho_j(0)|
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  WaveField initial;
  WaveField final_state;
};

/// Strang split-step real-time propagation.  The nonlinear phase conserves
/// |psi| pointwise, so the norm is preserved to roundoff; a norm drift
/// beyond 1e-6 aborts with a diagnostic.  Observables are recorded every
/// sample_every steps and at the last step.
Trajectory real_time_evolve(const WaveField& start, const RingProblem& problem,
                            double t_final, const SolverConfig& config,
                            const FluxSchedule& schedule = {},
                            long sample_every = 50);

}  // namespace ringcrystal
