#pragma once

namespace ringcrystal {

/// Elliptic modulus k stored together with its complement kc = sqrt(1 - k^2).
///
/// The pair is kept jointly because near k -> 1 the complement is the only
/// accurate handle on the state: 1 - k^2 rounds to zero long before kc
/// underflows, and the strong-coupling regime of this code lives exactly
/// there (kc ~ exp(-pi*lambda/2)).  All arithmetic near the singular
/// endpoint is done in kc.
class EllipticModulus {
 public:
  /// Builds from the modulus k in [0, 1].
  static EllipticModulus from_k(double k);
  /// Builds from the complementary modulus kc in [0, 1].
  static EllipticModulus from_kc(double kc);

  double k() const { return k_; }
  double kc() const { return kc_; }
  /// Parameter m = k^2.
  double m() const { return k_ * k_; }
  /// Complementary parameter mc = kc^2 = 1 - m.
  double mc() const { return kc_ * kc_; }

 private:
  EllipticModulus(double k, double kc) : k_(k), kc_(kc) {}
  double k_;
  double kc_;
};

struct CompleteIntegrals {
  double K;  ///< complete elliptic integral of the first kind
  double E;  ///< complete elliptic integral of the second kind
};

/// Complete elliptic integrals of the first and second kind, modulus
/// convention:
///   K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta),
///   E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 theta) dtheta.
///
/// Evaluated with the arithmetic-geometric mean; for kc < 1e-5 the
/// logarithmic expansion about k = 1 takes over.  Relative accuracy is a
/// few ulp.  Throws std::domain_error at k = 1, where K diverges.
CompleteIntegrals complete_KE(const EllipticModulus& m);

double complete_K(const EllipticModulus& m);   ///< throws where K diverges
double complete_E(const EllipticModulus& m);   ///< E(1) = 1 is fine

struct JacobiTriple {
  double cn;
  double sn;
  double dn;
};

/// Jacobi elliptic functions cn, sn, dn evaluated jointly (they share the
/// descending Landen recursion seeded by the AGM scale).  Absolute accuracy
/// is a few ulp for |u| up to several periods.
JacobiTriple jacobi_cn_sn_dn(double u, const EllipticModulus& m);

}  // namespace ringcrystal
