#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ringcrystal/grid.hpp"

namespace ringcrystal {

using Complex = std::complex<double>;

/// Gauge frame of a field on the ring.
///
/// lab:     strictly periodic samples; the flux sits in the kinetic operator.
/// twisted: flux gauged out of the operator; the continuum field obeys the
///          boundary phase psi(phi + 2*pi) = exp(-i*2*pi*alpha) psi(phi).
enum class Frame { lab, twisted };

/// Complex amplitudes on a ring grid, tagged with their gauge frame.
struct WaveField {
  RingGrid grid;
  Eigen::ArrayXcd psi;
  Frame frame = Frame::lab;
};

/// Lab-frame uniform state 1/sqrt(2*pi), exactly unit norm.
WaveField uniform_state(const RingGrid& grid);

/// L2 norm sqrt(sum |psi_j|^2 * spacing).
double field_norm(const WaveField& field);

/// Rescales to unit norm; throws if the norm is zero or not finite.
void normalize(WaveField& field);

Eigen::ArrayXd density(const WaveField& field);

/// (max - min) / (max + min) of the density.
double density_contrast(const WaveField& field);

/// Circular mean angle arg(sum rho_j exp(i phi_j)).  Meaningless for nearly
/// uniform fields; returns NaN when the contrast is below 1e-3.
double centroid_angle(const WaveField& field);

/// Pointwise gauge phase between the frames: psi_lab = exp(i*alpha*phi) *
/// psi_twisted.  Norm is preserved exactly; the frame tag flips.  Requesting
/// the frame the field is already in is a contract violation.
WaveField gauge_transform(const WaveField& field, double alpha, Frame target);

/// Circularly shifts the samples so the density maximum sits at phi = pi.
/// Integer-offset roll: sample values are untouched.
WaveField align_density_max(const WaveField& field);

}  // namespace ringcrystal
