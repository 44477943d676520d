#pragma once

// Adaptive Gauss-Kronrod (G7, K15) quadrature, used as the independent
// oracle for the complete elliptic integrals.  Deliberately knows nothing
// about the library under test.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace testsupport {

namespace detail {

// Kronrod-15 abscissae on [0, 1] side (symmetric) and weights; the odd
// entries are the embedded Gauss-7 nodes.
inline constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr double kWg[4] = {0.12948496616886969327, 0.27970539148927666790,
                                  0.38183005050511894495, 0.41795918367346938776};

struct PanelResult {
  double kronrod;
  double err;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double resk = 0.0;
  double resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = hw * kXgk[i];
    const double fsum =
        (i == 7) ? f(c) : f(c - dx) + f(c + dx);
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) {
      resg += kWg[i / 2] * fsum;
    }
  }
  resk *= hw;
  resg *= hw;
  return {resk, std::abs(resk - resg)};
}

template <typename F>
double adapt(const F& f, double a, double b, double tol, int depth) {
  const PanelResult r = gk15(f, a, b);
  if (r.err <= tol || depth > 48) {
    return r.kronrod;
  }
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, 0.5 * tol, depth + 1) +
         adapt(f, c, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-13) {
  if (!(b > a)) {
    throw std::invalid_argument("integrate: need b > a");
  }
  return detail::adapt(f, a, b, tol, 0);
}

}  // namespace testsupport
