#include "ringcrystal/solver.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ringcrystal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Complex kImag(0.0, 1.0);

void require_lab(const WaveField& field, const char* who) {
  if (field.frame != Frame::lab) {
    throw std::logic_error(std::string(who) + ": field must be in the lab frame");
  }
}

void require_unit_norm(const WaveField& field, const char* who) {
  const double nrm = field_norm(field);
  if (std::abs(nrm - 1.0) > 1e-6) {
    throw std::invalid_argument(std::string(who) +
                                ": field must be unit-normalized, norm = " +
                                std::to_string(nrm));
  }
}

// Forward/inverse transform pair with persistent buffers.  Forward is the
// plain unnormalized DFT, inverse carries the 1/N.
class SpectralOps {
 public:
  explicit SpectralOps(const RingGrid& grid)
      : time_(grid.n()), freq_(grid.n()) {}

  const Eigen::VectorXcd& fwd(const Eigen::ArrayXcd& in) {
    time_ = in.matrix();
    fft_.fwd(freq_, time_);
    return freq_;
  }

  void inv(const Eigen::VectorXcd& in, Eigen::ArrayXcd& out) {
    fft_.inv(time_, in);
    out = time_.array();
  }

  Eigen::VectorXcd& freq() { return freq_; }

 private:
  Eigen::FFT<double> fft_;
  Eigen::VectorXcd time_;
  Eigen::VectorXcd freq_;
};

// Kinetic Fourier multipliers (n - alpha)^2 / 2 in transform order.
Eigen::ArrayXd kinetic_multiplier(const RingGrid& grid, double alpha) {
  return 0.5 * (grid.modes() - alpha).square();
}

struct EnergyParts {
  double kinetic;  // <(1/2)|(-i d - alpha) psi|^2>
  double quartic;  // int |psi|^4 dphi
};

EnergyParts energy_parts(SpectralOps& ops, const Eigen::ArrayXcd& psi,
                         const Eigen::ArrayXd& kin, const RingGrid& grid) {
  const auto& c = ops.fwd(psi);
  const double n = static_cast<double>(grid.n());
  const double spectral_weight = 2.0 * kPi / (n * n);
  const double kinetic = (c.array().abs2() * kin).sum() * spectral_weight;
  const double quartic = psi.abs2().square().sum() * grid.spacing();
  return {kinetic, quartic};
}

EnergyMu parts_to_energy(const EnergyParts& p, double lambda) {
  return {p.kinetic - 0.5 * lambda * p.quartic, p.kinetic - lambda * p.quartic};
}

Eigen::ArrayXcd hamiltonian_apply(SpectralOps& ops, const Eigen::ArrayXcd& psi,
                                  const Eigen::ArrayXd& kin, double lambda) {
  Eigen::VectorXcd c = ops.fwd(psi);
  c.array() *= kin;
  Eigen::ArrayXcd out(psi.size());
  ops.inv(c, out);
  out -= lambda * psi.abs2() * psi;
  return out;
}

double residual_from(SpectralOps& ops, const Eigen::ArrayXcd& psi,
                     const Eigen::ArrayXd& kin, double lambda, double h) {
  const Eigen::ArrayXcd hpsi = hamiltonian_apply(ops, psi, kin, lambda);
  const double mu = ((psi.conjugate() * hpsi).real()).sum() * h;
  return std::sqrt((hpsi - mu * psi).abs2().sum() * h);
}

}  // namespace

Eigen::ArrayXcd apply_hamiltonian(const WaveField& field,
                                  const RingProblem& problem) {
  require_lab(field, "apply_hamiltonian");
  SpectralOps ops(field.grid);
  return hamiltonian_apply(ops, field.psi,
                           kinetic_multiplier(field.grid, problem.alpha),
                           problem.lambda);
}

EnergyMu energy_and_mu(const WaveField& field, const RingProblem& problem) {
  require_lab(field, "energy_and_mu");
  require_unit_norm(field, "energy_and_mu");
  SpectralOps ops(field.grid);
  return parts_to_energy(
      energy_parts(ops, field.psi,
                   kinetic_multiplier(field.grid, problem.alpha), field.grid),
      problem.lambda);
}

EnergyMu energy_and_mu_twisted(const WaveField& field,
                               const RingProblem& problem) {
  if (field.frame != Frame::twisted) {
    throw std::logic_error("energy_and_mu_twisted: field must be twisted");
  }
  require_unit_norm(field, "energy_and_mu_twisted");
  // Carry the samples to periodic form; the spectral content of the twisted
  // field then sits on the shifted modes nu = n - alpha, which is exactly
  // the multiplier applied below.
  const Eigen::ArrayXd phi = field.grid.nodes();
  Eigen::ArrayXcd periodic =
      field.psi * (kImag * problem.alpha * phi.cast<Complex>()).exp();
  SpectralOps ops(field.grid);
  const auto& c = ops.fwd(periodic);
  const Eigen::ArrayXd nu = field.grid.modes() - problem.alpha;
  const double n = static_cast<double>(field.grid.n());
  const double kinetic =
      (c.array().abs2() * (0.5 * nu.square())).sum() * 2.0 * kPi / (n * n);
  const double quartic =
      field.psi.abs2().square().sum() * field.grid.spacing();
  return parts_to_energy({kinetic, quartic}, problem.lambda);
}

double residual_norm(const WaveField& field, const RingProblem& problem) {
  require_lab(field, "residual_norm");
  require_unit_norm(field, "residual_norm");
  SpectralOps ops(field.grid);
  return residual_from(ops, field.psi,
                       kinetic_multiplier(field.grid, problem.alpha),
                       problem.lambda, field.grid.spacing());
}

double angular_momentum(const WaveField& field) {
  require_lab(field, "angular_momentum");
  SpectralOps ops(field.grid);
  const auto& c = ops.fwd(field.psi);
  const double n = static_cast<double>(field.grid.n());
  return (c.array().abs2() * field.grid.modes()).sum() * 2.0 * kPi / (n * n);
}

StationaryState imaginary_time_ground_state(const RingProblem& problem,
                                            const SolverConfig& config,
                                            std::vector<double>* energy_trace) {
  if (!(config.dtau > 0.0) || !(config.energy_tol > 0.0) ||
      !(config.residual_tol > 0.0)) {
    throw std::invalid_argument(
        "imaginary_time_ground_state: steps and tolerances must be positive");
  }
  const RingGrid grid(config.n_points);
  const Eigen::Index n = grid.n();
  const double h = grid.spacing();
  const double lambda = problem.lambda;
  const Eigen::ArrayXd kin = kinetic_multiplier(grid, problem.alpha);
  SpectralOps ops(grid);

  // Uniform mode plus seeded Box-Muller noise to break the positional
  // degeneracy of the lump.
  std::mt19937_64 rng(config.seed);
  auto uniform01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  Eigen::ArrayXcd psi(n);
  const double background = 1.0 / std::sqrt(2.0 * kPi);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u1 = std::max(uniform01(), 1e-300);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    psi[j] = background + config.noise_amplitude *
                              Complex(r * std::cos(2.0 * kPi * u2),
                                      r * std::sin(2.0 * kPi * u2));
  }
  psi /= std::sqrt(psi.abs2().sum() * h);

  const double dtau = config.dtau;
  const Eigen::ArrayXd half_kick = (-0.5 * dtau * kin).exp();

  constexpr long kCheckEvery = 64;
  constexpr long kPlateauChecks = 8;
  constexpr long kMinSplitStepIters = 2048;
  double eps_prev = std::numeric_limits<double>::infinity();
  double plateau_ref = std::numeric_limits<double>::infinity();
  long plateau_age = 0;
  long iter = 0;
  bool converged = false;
  bool polish = false;

  auto throw_divergence = [&](long at) {
    std::ostringstream msg;
    msg << "imaginary_time_ground_state: field diverged at iteration " << at
        << " (dtau = " << dtau << ")";
    throw std::runtime_error(msg.str());
  };

  // Stage one: Strang split-step descent.  This carries the field through
  // the nonlinear transient (lump formation, symmetry breaking) quickly but
  // its fixed point sits a distance O(dtau) from the true stationary state,
  // so it cannot push the residual arbitrarily low on its own.
  while (iter < config.max_iters) {
    ++iter;
    Eigen::VectorXcd c = ops.fwd(psi);
    c.array() *= half_kick;
    ops.inv(c, psi);

    // Exact flow of the nonlinear part in imaginary time:
    // |psi(dtau)|^2 = |psi|^2 / (1 - 2 lambda dtau |psi|^2),
    // with the density referred to the normalized shape.
    Eigen::ArrayXd rho = psi.abs2();
    const double scale = rho.sum() * h;
    if (!std::isfinite(scale) || scale == 0.0) {
      throw_divergence(iter);
    }
    Eigen::ArrayXd denom = 1.0 - (2.0 * lambda * dtau / scale) * rho;
    if (denom.minCoeff() < 0.25) {
      throw_divergence(iter);
    }
    psi *= denom.rsqrt();

    c = ops.fwd(psi);
    c.array() *= half_kick;
    ops.inv(c, psi);

    const double nrm2 = psi.abs2().sum() * h;
    if (!std::isfinite(nrm2) || nrm2 == 0.0) {
      throw_divergence(iter);
    }
    psi /= std::sqrt(nrm2);

    if (energy_trace != nullptr) {
      energy_trace->push_back(
          parts_to_energy(energy_parts(ops, psi, kin, grid), lambda).eps);
    }

    if (iter % kCheckEvery == 0 || iter == config.max_iters) {
      const double eps =
          parts_to_energy(energy_parts(ops, psi, kin, grid), lambda).eps;
      const double de_step =
          (eps_prev - eps) / static_cast<double>(kCheckEvery);
      eps_prev = eps;
      const double residual = residual_from(ops, psi, kin, lambda, h);
      if (std::abs(de_step) < config.energy_tol &&
          residual < config.residual_tol) {
        converged = true;
        break;
      }
      // Residual improvement has slowed from transient to linear decay:
      // hand over to the polishing stage, which contracts far faster per
      // step and has the exact stationary state as its fixed point.
      if (residual > 0.65 * plateau_ref) {
        if (++plateau_age >= kPlateauChecks && iter >= kMinSplitStepIters) {
          polish = true;
          break;
        }
      } else {
        plateau_ref = residual;
        plateau_age = 0;
      }
    }
  }

  // Stage two: semi-implicit descent steps
  //   psi <- normalize((1 + eta T)^{-1} [psi - eta (V - mu) psi]),
  // still the imaginary-time flow of the same functional, but discretized
  // with the kinetic term implicit.  The exact discrete stationary state is
  // a fixed point of this map ((V - mu) psi = -T psi there), so the
  // residual can be driven to the roundoff floor, and there is no grid
  // step-size ceiling.  Steps are accepted only if the energy does not rise.
  if (polish && iter < config.max_iters) {
    double eta = 0.0;
    double eps_cur =
        parts_to_energy(energy_parts(ops, psi, kin, grid), lambda).eps;
    double best_residual = std::numeric_limits<double>::infinity();
    long stale = 0;
    while (iter < config.max_iters) {
      ++iter;
      Eigen::VectorXcd c = ops.fwd(psi);
      c.array() *= kin;
      Eigen::ArrayXcd tpsi(n);
      ops.inv(c, tpsi);
      const Eigen::ArrayXd rho = psi.abs2();
      const Eigen::ArrayXcd vpsi = -lambda * rho * psi;
      const double mu = ((psi.conjugate() * (tpsi + vpsi)).real()).sum() * h;
      const double residual =
          std::sqrt((tpsi + vpsi - mu * psi).abs2().sum() * h);
      if (residual < config.residual_tol) {
        converged = true;
        break;
      }
      if (residual < 0.5 * best_residual) {
        best_residual = residual;
        stale = 0;
      } else if (++stale > 4000) {
        break;  // residual floor for this grid; report flagged
      }
      if (eta == 0.0) {
        eta = 0.9 / (1.0 + std::abs(mu) + lambda * rho.maxCoeff());
      }

      const Eigen::ArrayXcd rhs = psi - eta * (vpsi - mu * psi);
      c = ops.fwd(rhs);
      c.array() /= (1.0 + eta * kin);
      Eigen::ArrayXcd candidate(n);
      ops.inv(c, candidate);
      const double nrm2 = candidate.abs2().sum() * h;
      if (!std::isfinite(nrm2) || nrm2 == 0.0) {
        throw_divergence(iter);
      }
      candidate /= std::sqrt(nrm2);
      const double eps_new =
          parts_to_energy(energy_parts(ops, candidate, kin, grid), lambda).eps;
      if (eps_new > eps_cur + 1e-13) {
        eta *= 0.5;  // monotone safeguard
        if (energy_trace != nullptr) energy_trace->push_back(eps_cur);
        continue;
      }
      psi = candidate;
      eps_cur = eps_new;
      if (energy_trace != nullptr) energy_trace->push_back(eps_cur);
    }
  }

  StationaryState out{WaveField{grid, psi, Frame::lab}, 0.0, 0.0, 0.0, iter,
                      converged};
  const EnergyMu em =
      parts_to_energy(energy_parts(ops, psi, kin, grid), lambda);
  out.eps = em.eps;
  out.mu = em.mu;
  out.residual = residual_from(ops, psi, kin, lambda, h);
  if (out.residual < config.residual_tol && !out.converged) {
    out.converged = true;
  }
  return out;
}

Trajectory real_time_evolve(const WaveField& start, const RingProblem& problem,
                            double t_final, const SolverConfig& config,
                            const FluxSchedule& schedule, long sample_every) {
  require_lab(start, "real_time_evolve");
  require_unit_norm(start, "real_time_evolve");
  if (!(t_final > 0.0) || !(config.dt > 0.0)) {
    throw std::invalid_argument("real_time_evolve: t_final and dt must be > 0");
  }
  if (sample_every < 1) sample_every = 1;

  const RingGrid grid = start.grid;
  const Eigen::Index n = grid.n();
  const double lambda = problem.lambda;
  const long steps =
      std::max<long>(1, static_cast<long>(std::ceil(t_final / config.dt - 1e-12)));
  const double dt = t_final / static_cast<double>(steps);

  SpectralOps ops(grid);
  const Eigen::ArrayXd modes = grid.modes();
  const Eigen::ArrayXd rho0 = start.psi.abs2();

  double alpha_cached = std::numeric_limits<double>::quiet_NaN();
  Eigen::ArrayXcd half_phase(n);
  auto ensure_phase = [&](double alpha) {
    if (alpha == alpha_cached) return;
    alpha_cached = alpha;
    const Eigen::ArrayXd kin = 0.5 * (modes - alpha).square();
    half_phase = (-kImag * (0.5 * dt) * kin.cast<Complex>()).exp();
  };
  auto alpha_at = [&](double t) {
    return schedule ? schedule(t) : problem.alpha;
  };

  Trajectory traj{{}, start, start};
  Eigen::ArrayXcd psi = start.psi;

  auto record = [&](double t) {
    TrajectorySample s;
    s.t = t;
    WaveField snap{grid, psi, Frame::lab};
    s.norm = field_norm(snap);
    if (std::abs(s.norm - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "real_time_evolve: norm drift " << s.norm - 1.0 << " at t = " << t
          << " (dt = " << dt << "); step is unstable";
      throw std::runtime_error(msg.str());
    }
    const double alpha_now = alpha_at(t);
    const Eigen::ArrayXd kin = 0.5 * (modes - alpha_now).square();
    const EnergyMu em =
        parts_to_energy(energy_parts(ops, psi, kin, grid), lambda);
    s.eps = em.eps;
    const auto& c = ops.freq();
    const double nn = static_cast<double>(n);
    s.angular_momentum =
        (c.array().abs2() * modes).sum() * 2.0 * kPi / (nn * nn);
    s.kinetic_angular_momentum = s.angular_momentum - alpha_now;
    s.contrast = density_contrast(snap);
    s.centroid = centroid_angle(snap);
    s.sup_density_drift = (psi.abs2() - rho0).abs().maxCoeff();
    traj.samples.push_back(s);
  };

  record(0.0);
  for (long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;

    ensure_phase(alpha_at(t + 0.25 * dt));
    Eigen::VectorXcd c = ops.fwd(psi);
    c.array() *= half_phase;
    ops.inv(c, psi);

    // Nonlinear phase: exact, conserves |psi| pointwise.
    const Eigen::ArrayXd rho = psi.abs2();
    psi *= (kImag * (lambda * dt) * rho.cast<Complex>()).exp();

    ensure_phase(alpha_at(t + 0.75 * dt));
    c = ops.fwd(psi);
    c.array() *= half_phase;
    ops.inv(c, psi);

    if ((step + 1) % sample_every == 0 || step + 1 == steps) {
      record(static_cast<double>(step + 1) * dt);
    }
    if (!std::isfinite(psi[0].real())) {
      throw std::runtime_error("real_time_evolve: field became non-finite");
    }
  }

  traj.final_state = WaveField{grid, psi, Frame::lab};
  return traj;
}

}  // namespace ringcrystal
