#include "ringcrystal/elliptic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ringcrystal {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.14159265358979323846;

// Below this complement the AGM is abandoned for the log expansion about
// k = 1 (truncation error O(kc^4 log kc), far below double roundoff).
constexpr double kLogBranchKc = 1e-5;

void check_modulus_range(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1], got " +
                            std::to_string(x));
  }
}

}  // namespace

EllipticModulus EllipticModulus::from_k(double k) {
  check_modulus_range(k, "elliptic modulus k");
  // (1-k)(1+k) keeps full precision where 1 - k*k would cancel.
  return EllipticModulus(k, std::sqrt((1.0 - k) * (1.0 + k)));
}

EllipticModulus EllipticModulus::from_kc(double kc) {
  check_modulus_range(kc, "complementary modulus kc");
  return EllipticModulus(std::sqrt((1.0 - kc) * (1.0 + kc)), kc);
}

CompleteIntegrals complete_KE(const EllipticModulus& m) {
  const double k = m.k();
  const double kc = m.kc();

  if (kc == 0.0) {
    throw std::domain_error("complete_KE: K(k) diverges at k = 1");
  }
  if (k == 0.0) {
    return {kPi / 2.0, kPi / 2.0};
  }
  if (kc < kLogBranchKc) {
    // K = ln(4/kc) + (kc^2/4)[ln(4/kc) - 1],  E = 1 + (kc^2/2)[ln(4/kc) - 1/2].
    const double l = std::log(4.0 / kc);
    const double mc = kc * kc;
    return {l + 0.25 * mc * (l - 1.0), 1.0 + 0.5 * mc * (l - 0.5)};
  }

  // AGM: a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n), c_n = (a_n - b_n)/2,
  // K = pi / (2 a_inf),  E = K (1 - sum 2^{n-1} c_n^2)  with c_0 = k.
  double a = 1.0;
  double b = kc;
  double sum = 0.5 * k * k;
  double pow2 = 1.0;
  for (int i = 0; i < 64; ++i) {
    const double an = 0.5 * (a + b);
    const double c = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    sum += 0.5 * pow2 * c * c;
    if (std::abs(a - b) <= 8.0 * kEps * a) {
      break;
    }
  }
  const double K = kPi / (2.0 * a);
  return {K, K * (1.0 - sum)};
}

double complete_K(const EllipticModulus& m) { return complete_KE(m).K; }

double complete_E(const EllipticModulus& m) {
  if (m.kc() == 0.0) {
    return 1.0;
  }
  return complete_KE(m).E;
}

JacobiTriple jacobi_cn_sn_dn(double u, const EllipticModulus& m) {
  if (!std::isfinite(u)) {
    throw std::domain_error("jacobi_cn_sn_dn: argument must be finite");
  }

  if (m.k() == 0.0) {
    return {std::cos(u), std::sin(u), 1.0};
  }
  if (m.kc() == 0.0) {
    const double sech = 1.0 / std::cosh(u);
    return {sech, std::tanh(u), sech};
  }

  // Bulirsch's sncndn: build the AGM chain on (1, kc), take trigonometric
  // seeds at the contracted argument, then descend the Landen chain.
  constexpr int kMaxChain = 24;
  const double tol = std::sqrt(0.01 * kEps);
  double chain_a[kMaxChain];
  double chain_b[kMaxChain];

  double mc = m.mc();
  double a = 1.0;
  double c = 1.0;
  int depth = 0;
  for (; depth < kMaxChain; ++depth) {
    chain_a[depth] = a;
    mc = std::sqrt(mc);
    chain_b[depth] = mc;
    c = 0.5 * (a + mc);
    if (std::abs(a - mc) <= tol * a) {
      ++depth;
      break;
    }
    mc *= a;
    a = c;
  }

  const double x = c * u;
  double sn = std::sin(x);
  double cn = std::cos(x);
  double dn = 1.0;
  if (sn != 0.0) {
    double t = cn / sn;
    c *= t;
    for (int l = depth; l-- > 0;) {
      const double base = chain_a[l];
      t *= c;
      c *= dn;
      dn = (chain_b[l] + t) / (base + t);
      t = c / base;
    }
    t = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn < 0.0 ? -t : t;
    cn = c * sn;
  }
  return {cn, sn, dn};
}

}  // namespace ringcrystal
