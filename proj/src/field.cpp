#include "ringcrystal/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ringcrystal {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kCentroidContrastFloor = 1e-3;
}  // namespace

RingGrid::RingGrid(Eigen::Index n_points) : n_(n_points) {
  if (n_points < 64 || (n_points & (n_points - 1)) != 0) {
    throw std::invalid_argument(
        "RingGrid: n_points must be a power of two >= 64");
  }
  spacing_ = 2.0 * kPi / static_cast<double>(n_points);
}

Eigen::ArrayXd RingGrid::nodes() const {
  Eigen::ArrayXd phi(n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    phi[j] = static_cast<double>(j) * spacing_;
  }
  return phi;
}

Eigen::ArrayXd RingGrid::modes() const {
  Eigen::ArrayXd m(n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    m[j] = static_cast<double>(j < n_ / 2 ? j : j - n_);
  }
  return m;
}

WaveField uniform_state(const RingGrid& grid) {
  WaveField f{grid, Eigen::ArrayXcd::Constant(grid.n(), 1.0 / std::sqrt(2.0 * kPi)),
              Frame::lab};
  return f;
}

double field_norm(const WaveField& field) {
  return std::sqrt(field.psi.abs2().sum() * field.grid.spacing());
}

void normalize(WaveField& field) {
  const double nrm = field_norm(field);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw std::runtime_error("normalize: field norm is zero or not finite");
  }
  field.psi /= nrm;
}

Eigen::ArrayXd density(const WaveField& field) { return field.psi.abs2(); }

double density_contrast(const WaveField& field) {
  const Eigen::ArrayXd rho = density(field);
  const double hi = rho.maxCoeff();
  const double lo = rho.minCoeff();
  return (hi - lo) / (hi + lo);
}

double centroid_angle(const WaveField& field) {
  if (density_contrast(field) < kCentroidContrastFloor) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const Eigen::ArrayXd rho = density(field);
  const Eigen::ArrayXd phi = field.grid.nodes();
  const double re = (rho * phi.cos()).sum();
  const double im = (rho * phi.sin()).sum();
  return std::atan2(im, re);
}

WaveField gauge_transform(const WaveField& field, double alpha, Frame target) {
  if (field.frame == target) {
    throw std::logic_error("gauge_transform: field is already in the target frame");
  }
  const double sign = (target == Frame::lab) ? 1.0 : -1.0;
  const Eigen::ArrayXd phase = sign * alpha * field.grid.nodes();
  WaveField out{field.grid, Eigen::ArrayXcd(field.grid.n()), target};
  out.psi = field.psi * (phase.cast<Complex>() * Complex(0.0, 1.0)).exp();
  return out;
}

WaveField align_density_max(const WaveField& field) {
  const Eigen::ArrayXd rho = density(field);
  Eigen::Index j_max = 0;
  rho.maxCoeff(&j_max);
  const Eigen::Index n = field.grid.n();
  const Eigen::Index shift = (n / 2 - j_max + n) % n;
  WaveField out{field.grid, Eigen::ArrayXcd(n), field.frame};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.psi[(j + shift) % n] = field.psi[j];
  }
  return out;
}

}  // namespace ringcrystal
