#include "ringcrystal/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ringcrystal {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Residual of the modulus equation at a given modulus pair.
double modulus_residual(const EllipticModulus& m, double target) {
  const auto ke = complete_KE(m);
  return (ke.E - m.mc() * ke.K) * ke.K - target;
}

// Bracketed root solve for f on [lo, hi] with f(lo) < 0 < f(hi) or the
// reverse; bisection with a safeguarded secant refinement.  Converges the
// bracket to a few ulp or the residual to |f| <= ftol.
template <typename F>
double solve_bracketed(F f, double lo, double hi, double ftol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "solve_modulus: root not bracketed on [" << lo << ", " << hi
        << "], residuals " << flo << ", " << fhi;
    throw std::runtime_error(msg.str());
  }
  double x = lo;
  double fx = flo;
  for (int iter = 0; iter < 200; ++iter) {
    // Secant proposal from the current bracket ends, bisection fallback.
    double mid = 0.5 * (lo + hi);
    double cand = mid;
    const double denom = fhi - flo;
    if (denom != 0.0) {
      const double secant = lo - flo * (hi - lo) / denom;
      if (secant > lo && secant < hi) {
        cand = secant;
      }
    }
    x = cand;
    fx = f(x);
    if (std::abs(fx) <= ftol) {
      return x;
    }
    if ((fx > 0.0) == (fhi > 0.0)) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(lo) + std::abs(hi))) {
      return 0.5 * (lo + hi);
    }
    // Force occasional bisection so a stagnant secant cannot stall.
    if (iter % 3 == 2) {
      const double m2 = 0.5 * (lo + hi);
      const double fm = f(m2);
      if (std::abs(fm) <= ftol) return m2;
      if ((fm > 0.0) == (fhi > 0.0)) {
        hi = m2;
        fhi = fm;
      } else {
        lo = m2;
        flo = fm;
      }
    }
  }
  std::ostringstream msg;
  msg << "solve_modulus: no convergence, bracket [" << lo << ", " << hi
      << "], residual " << fx;
  throw std::runtime_error(msg.str());
}

}  // namespace

RingProblem::RingProblem(double lambda_, double alpha_)
    : lambda(lambda_), alpha(alpha_) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("RingProblem: lambda must be positive");
  }
  if (!std::isfinite(alpha)) {
    throw std::invalid_argument("RingProblem: alpha must be finite");
  }
}

double RingProblem::alpha_canonical() const { return canonical_alpha(alpha); }

double canonical_alpha(double alpha) {
  // Reduce to (-1/2, 1/2]; the half-integer boundary maps to +1/2.
  double r = alpha - std::ceil(alpha - 0.5);
  if (r == -0.5) r = 0.5;
  return r;
}

EllipticModulus solve_modulus(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("solve_modulus: lambda must be positive");
  }
  const double target = 0.5 * kPi * lambda;
  const double ftol = 1e-13 * std::max(1.0, target);

  if (lambda < 0.5) {
    // Small-k regime: the equation is well conditioned in k itself.
    const double k = solve_bracketed(
        [target](double kk) {
          return modulus_residual(EllipticModulus::from_k(kk), target);
        },
        1e-300, 0.7072, ftol);
    return EllipticModulus::from_k(k);
  }
  if (lambda <= 8.0) {
    // kc is the well-conditioned variable once k crowds the endpoint.
    // The left side decreases in kc, so swap the bracket orientation by
    // negating.
    const double kc = solve_bracketed(
        [target](double kcc) {
          return -modulus_residual(EllipticModulus::from_kc(kcc), target);
        },
        1e-8, 0.7072, ftol);
    return EllipticModulus::from_kc(kc);
  }
  // Strong coupling: solve in s = log(kc).  kc ~ 4 exp(-pi*lambda/2).
  const double s_guess = std::log(4.0) - 0.5 * kPi * lambda;
  const double s = solve_bracketed(
      [target](double ss) {
        return -modulus_residual(EllipticModulus::from_kc(std::exp(ss)),
                                 target);
      },
      s_guess - 3.0, s_guess + 3.0, ftol);
  return EllipticModulus::from_kc(std::exp(s));
}

HalfFluxAnalytic half_flux_analytic(double lambda) {
  const EllipticModulus m = solve_modulus(lambda);
  const auto ke = complete_KE(m);
  HalfFluxAnalytic rec{m, ke.K, ke.E, 0.0, 0.0, lambda, false};
  rec.mu = half_flux_mu(rec);
  rec.eps = half_flux_energy(rec);
  rec.small_lambda_limit = m.k() < 1e-6;
  return rec;
}

double half_flux_mu(const HalfFluxAnalytic& a) {
  // (1/2 - k^2) = (kc^2 - 1/2): the complement form survives k -> 1.
  return (a.bigK * a.bigK / (kPi * kPi)) * (a.modulus.mc() - 0.5);
}

double half_flux_energy(const HalfFluxAnalytic& a) {
  const double k = a.modulus.k();
  if (k < 1e-6) {
    // 0/0 in the printed form; the limit is the kinetic energy of the
    // uniform antiperiodic mode.
    return 0.125;
  }
  const double mc = a.modulus.mc();
  const double K = a.bigK;
  const double E = a.bigE;
  // Printed form rewritten in the complementary parameter:
  //   2k^2-1 = 1-2mc,  1-k^2 = mc,  3k^2-1 = 2-3mc.
  const double numer = (1.0 - 2.0 * mc) * E - mc * (2.0 - 3.0 * mc) * K;
  const double denom = E - mc * K;
  return -(K * K * numer) / (6.0 * kPi * kPi * denom);
}

std::pair<HalfFluxAnalytic, WaveField> half_flux_state(double lambda,
                                                       Eigen::Index n_grid) {
  const HalfFluxAnalytic rec = half_flux_analytic(lambda);
  const RingGrid grid(n_grid);

  const double amp = rec.modulus.k() * rec.bigK / (kPi * std::sqrt(lambda));
  const double scale = rec.bigK / kPi;
  WaveField field{grid, Eigen::ArrayXcd(grid.n()), Frame::twisted};
  const Eigen::ArrayXd phi = grid.nodes();
  for (Eigen::Index j = 0; j < grid.n(); ++j) {
    field.psi[j] = amp * jacobi_cn_sn_dn(phi[j] * scale, rec.modulus).cn;
  }

  const double nrm2 = field.psi.abs2().sum() * grid.spacing();
  if (std::abs(nrm2 - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "half_flux_state: sampled norm deviates from 1 by " << nrm2 - 1.0
        << " (lambda=" << lambda << ", n_grid=" << n_grid
        << "); the grid cannot resolve this state";
    throw std::runtime_error(msg.str());
  }
  return {rec, field};
}

double uniform_branch_energy(double lambda, double alpha, int winding) {
  if (lambda < 0.0) {
    throw std::invalid_argument("uniform_branch_energy: lambda must be >= 0");
  }
  const double v = static_cast<double>(winding) - alpha;
  return 0.5 * v * v - lambda / (4.0 * kPi);
}

double critical_coupling() { return 0.5 * kPi; }

double wilczek_rotating_energy(double eps_zero_flux, double alpha) {
  if (!(alpha > -0.5 && alpha <= 0.5)) {
    throw std::invalid_argument(
        "wilczek_rotating_energy: alpha must be canonical in (-1/2, 1/2]");
  }
  return eps_zero_flux + 0.5 * alpha * alpha;
}

double asymptotic_delta_energy(double lambda, double alpha) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("asymptotic_delta_energy: lambda must be > 0");
  }
  // 1 - cos(2 pi alpha) = 2 sin^2(pi alpha), exact and cancellation-free.
  const double s = std::sin(kPi * alpha);
  return -6.0 * s * s * lambda * lambda * std::exp(-kPi * lambda);
}

}  // namespace ringcrystal
