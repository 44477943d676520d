#include "ringcrystal/analytic.hpp"

#include <doctest.h>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

using namespace ringcrystal;

namespace {

constexpr double kPi = 3.14159265358979323846;

double modulus_lhs(const EllipticModulus& m) {
  const auto ke = complete_KE(m);
  return (ke.E - m.mc() * ke.K) * ke.K;
}

// Plain bisection on the modulus equation, the independent oracle for the
// production root finder.  Monotone left side makes [lo, hi] global.
double bisect_modulus_kc(double lambda) {
  const double target = 0.5 * kPi * lambda;
  double lo = 1e-12;        // kc: strong-coupling side, lhs large
  double hi = 1.0 - 1e-12;  // kc -> 1: lhs -> 0
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (modulus_lhs(EllipticModulus::from_kc(mid)) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("canonical_alpha reduction") {
  CHECK(canonical_alpha(0.0) == 0.0);
  CHECK(canonical_alpha(0.5) == 0.5);
  CHECK(canonical_alpha(-0.5) == 0.5);
  CHECK(canonical_alpha(0.75) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(canonical_alpha(1.0) == 0.0);
  CHECK(canonical_alpha(2.5) == 0.5);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pick(-3.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = pick(rng);
    const double c = canonical_alpha(a);
    CHECK(c > -0.5);
    CHECK(c <= 0.5);
    CHECK(canonical_alpha(c) == c);  // idempotent
    CHECK(std::abs(canonical_alpha(a + 1.0) - c) < 1e-12);
  }
}

TEST_CASE("RingProblem validation") {
  CHECK_THROWS_AS(RingProblem(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(RingProblem(-1.0, 0.0), std::invalid_argument);
  const RingProblem p(2.0, 1.25);
  CHECK(p.alpha == 1.25);  // stored as given; flux-periodicity sweeps rely on it
  CHECK(p.alpha_canonical() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("modulus equation at the Legendre point") {
  // [E - (1-k^2)K]K = pi/4 exactly at k = kc = 1/sqrt(2), so lambda = 1/2
  // maps to that k with no numerics in the way.
  const auto m = solve_modulus(0.5);
  CHECK(m.k() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(m.kc() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("modulus solve against the bisection oracle at lambda = 5") {
  const auto m = solve_modulus(5.0);
  const double kc_oracle = bisect_modulus_kc(5.0);
  CHECK(std::abs(m.kc() - kc_oracle) <= 1e-12 * kc_oracle + 1e-15);
  CHECK(m.kc() == doctest::Approx(1.5526964191009591e-3).epsilon(1e-12));
}

TEST_CASE("modulus residual across the supported range") {
  for (double lambda : {0.1, 0.5, 1.0, 2.0, 5.0, 7.9, 8.1, 10.0, 12.0}) {
    const auto m = solve_modulus(lambda);
    const double target = 0.5 * kPi * lambda;
    CHECK(std::abs(modulus_lhs(m) - target) <= 1e-12 * std::max(1.0, target));
  }
}

TEST_CASE("small-coupling expansion of the modulus") {
  for (double lambda : {1e-4, 1e-6}) {
    const auto m = solve_modulus(lambda);
    const double series = 2.0 * std::sqrt(lambda / kPi);
    CHECK(std::abs(m.k() - series) <= std::pow(lambda, 1.5));
  }
}

TEST_CASE("complement shrinks monotonically with coupling") {
  CHECK(solve_modulus(10.0).kc() < solve_modulus(5.0).kc());
  double prev = solve_modulus(1.0).kc();
  for (double lambda = 2.0; lambda <= 12.0; lambda += 1.0) {
    const double kc = solve_modulus(lambda).kc();
    CHECK(kc < prev);
    prev = kc;
  }
  // Strong coupling tracks kc ~ 4 exp(-pi lambda / 2).
  CHECK(solve_modulus(12.0).kc() ==
        doctest::Approx(4.0 * std::exp(-6.0 * kPi)).epsilon(0.01));
}

TEST_CASE("half-flux closed forms at lambda = 5") {
  const auto rec = half_flux_analytic(5.0);
  CHECK(rec.bigK == doctest::Approx(7.8540607263985832).epsilon(1e-13));
  CHECK(rec.bigE == doctest::Approx(1.0000088648305073).epsilon(1e-13));
  CHECK(rec.mu == doctest::Approx(-3.1250478718511543).epsilon(1e-12));
  CHECK(rec.eps == doctest::Approx(-1.0416628993506916).epsilon(1e-12));
  CHECK_FALSE(rec.small_lambda_limit);
  CHECK(half_flux_mu(rec) == rec.mu);
  CHECK(half_flux_energy(rec) == rec.eps);
}

TEST_CASE("chemical potential vanishes at k^2 = 1/2") {
  // k^2 = 1/2 is lambda = 1/2 by the Legendre relation.
  const auto rec = half_flux_analytic(0.5);
  CHECK(std::abs(rec.mu) < 1e-12);
  CHECK(rec.eps == doctest::Approx(0.063519638996111206).epsilon(1e-12));
}

TEST_CASE("weak-coupling limit of mu and eps") {
  const auto rec = half_flux_analytic(1e-13);
  CHECK(rec.small_lambda_limit);
  CHECK(rec.eps == 0.125);  // uniform antiperiodic mode (n - 1/2)^2 / 2
  CHECK(rec.mu == doctest::Approx(0.125).epsilon(1e-6));
}

TEST_CASE("half-flux state sampling: peak, reality, norm") {
  const auto [rec, field] = half_flux_state(5.0, 256);
  CHECK(field.frame == Frame::twisted);

  const double peak = rec.modulus.k() * rec.bigK / (kPi * std::sqrt(5.0));
  CHECK(field.psi[0].real() == doctest::Approx(peak).epsilon(1e-14));
  CHECK(field.psi.imag().abs().maxCoeff() == 0.0);
  CHECK(field.psi.real().maxCoeff() == doctest::Approx(peak).epsilon(1e-14));

  const double nrm = field.psi.abs2().sum() * field.grid.spacing();
  CHECK(std::abs(nrm - 1.0) < 1e-10);  // the modulus equation forces this
}

TEST_CASE("half-flux norm and energy identity across couplings") {
  // log-ish grid over [0.1, 12]; larger grid where the lump sharpens.
  for (double lambda : {0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0, 12.0}) {
    const Eigen::Index n = lambda > 8.0 ? 1024 : 256;
    const auto [rec, field] = half_flux_state(lambda, n);
    const double h = field.grid.spacing();
    const double nrm = field.psi.abs2().sum() * h;
    CHECK(std::abs(nrm - 1.0) < 1e-10);

    const double quartic = field.psi.abs2().square().sum() * h;
    CHECK(std::abs(rec.eps - (rec.mu + 0.5 * lambda * quartic)) < 1e-8);
  }
}

TEST_CASE("under-resolved grid is rejected, not silently accepted") {
  CHECK_THROWS_AS(half_flux_state(12.0, 64), std::runtime_error);
  CHECK_THROWS_AS(half_flux_state(5.0, 100), std::invalid_argument);
}

TEST_CASE("gauged half-flux state is integer-mode band-limited") {
  // Trig interpolation on integer modes of the lab-frame samples must
  // reproduce the closed form off-grid; for the bare antiperiodic samples it
  // could not.  This pins the gauge convention psi_lab = exp(i alpha phi) psi.
  const Eigen::Index n = 256;
  const auto [rec, field] = half_flux_state(5.0, n);
  const WaveField lab = gauge_transform(field, 0.5, Frame::lab);

  Eigen::FFT<double> fft;
  Eigen::VectorXcd samples = lab.psi.matrix();
  Eigen::VectorXcd coeff(n);
  fft.fwd(coeff, samples);

  const double h = lab.grid.spacing();
  const double amp = rec.modulus.k() * rec.bigK / (kPi * std::sqrt(5.0));
  double worst = 0.0;
  for (int probe = 0; probe < 32; ++probe) {
    const double phi = (static_cast<double>(probe) + 0.5) * 8.0 * h;
    std::complex<double> interp(0.0, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double mode = static_cast<double>(j < n / 2 ? j : j - n);
      interp += coeff[j] * std::exp(std::complex<double>(0.0, mode * phi));
    }
    interp /= static_cast<double>(n);
    const double cn = jacobi_cn_sn_dn(phi * rec.bigK / kPi, rec.modulus).cn;
    const std::complex<double> exact =
        amp * cn * std::exp(std::complex<double>(0.0, 0.5 * phi));
    worst = std::max(worst, std::abs(interp - exact));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("half-flux state beats the uniform branch above threshold") {
  CHECK(half_flux_analytic(5.0).eps < uniform_branch_energy(5.0, 0.5, 0));
  CHECK(half_flux_analytic(2.0).eps < uniform_branch_energy(2.0, 0.5, 0));
}

TEST_CASE("uniform branch energy") {
  CHECK(uniform_branch_energy(0.0, 0.0, 0) == 0.0);
  CHECK(uniform_branch_energy(2.0 * kPi, 0.0, 0) == -0.5);
  CHECK(uniform_branch_energy(3.0, 0.5, 0) ==
        uniform_branch_energy(3.0, 0.5, 1));  // degenerate windings
  CHECK(uniform_branch_energy(1.0, 0.3, 1) ==
        doctest::Approx(0.5 * 0.49 - 1.0 / (4.0 * kPi)).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_branch_energy(-1.0, 0.0, 0), std::invalid_argument);
}

TEST_CASE("critical coupling") {
  CHECK(critical_coupling() ==
        doctest::Approx(1.5707963267948966).epsilon(1e-16));
}

TEST_CASE("rotating-soliton branch") {
  const double eps0 = -1.04;
  CHECK(wilczek_rotating_energy(eps0, 0.0) == eps0);
  CHECK(wilczek_rotating_energy(eps0, 0.5) == eps0 + 0.125);
  CHECK(wilczek_rotating_energy(eps0, 0.25) == eps0 + 0.03125);
  CHECK_THROWS_AS(wilczek_rotating_energy(eps0, 0.75), std::invalid_argument);
}

TEST_CASE("strong-coupling flux law") {
  CHECK(asymptotic_delta_energy(10.0, 0.0) == 0.0);
  CHECK(asymptotic_delta_energy(10.0, 0.5) ==
        doctest::Approx(-1.3626606409944563e-11).epsilon(1e-13));
  // Log-slope between consecutive couplings is an algebraic identity.
  const double d6 = asymptotic_delta_energy(6.0, 0.5);
  const double d7 = asymptotic_delta_energy(7.0, 0.5);
  CHECK(std::log(std::abs(d7)) - std::log(std::abs(d6)) ==
        doctest::Approx(-kPi + 2.0 * std::log(7.0 / 6.0)).epsilon(1e-12));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pick_l(0.5, 12.0);
  std::uniform_real_distribution<double> pick_a(-1.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(asymptotic_delta_energy(pick_l(rng), pick_a(rng)) <= 0.0);
  }
}

}  // TEST_SUITE
