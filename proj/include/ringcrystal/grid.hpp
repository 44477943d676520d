#pragma once

#include <Eigen/Dense>

namespace ringcrystal {

/// Uniform periodic grid over [0, 2*pi).  The point count is restricted to
/// powers of two so the spacing 2*pi/n is exact in binary and the spectral
/// transform stays radix-2.
class RingGrid {
 public:
  explicit RingGrid(Eigen::Index n_points);

  Eigen::Index n() const { return n_; }
  double spacing() const { return spacing_; }

  /// Node angles phi_j = j * spacing.
  Eigen::ArrayXd nodes() const;

  /// Integer mode numbers in transform order: 0, 1, ..., n/2-1, -n/2, ..., -1.
  Eigen::ArrayXd modes() const;

  bool operator==(const RingGrid& other) const { return n_ == other.n_; }

 private:
  Eigen::Index n_;
  double spacing_;
};

}  // namespace ringcrystal
