#pragma once

#include "fl/common.hpp"

#include <vector>

namespace fl {

enum class NormFamily { kEuclidean, kEllipse, kPNorm, kShifted, kCustomTabulated };

/** Name used in serialized norm specs ("euclidean", "ellipse", ...). */
const char* family_name(NormFamily f);

struct EllipticityScan {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool uniformly_elliptic = false;
  int samples = 0;
};

/**
 * Positively 1-homogeneous convex gauge H on R^n, smooth away from 0 for the
 * closed-form families.  Asymmetry (H(-xi) != H(xi)) is allowed and exercised
 * by the shifted family.
 */
class AnisotropyNorm {
 public:
  static AnisotropyNorm euclidean(int dim);

  /** H(xi) = sqrt(xi^T A xi) for symmetric positive definite A. */
  static AnisotropyNorm ellipse(const Mat& A);

  /** H(xi) = |xi|_p with finite p > 1. */
  static AnisotropyNorm pnorm(int dim, double p);

  /** H(xi) = |xi| + <b, xi> with |b| < 0.999; asymmetric for b != 0. */
  static AnisotropyNorm shifted(const Vec& b);

  /**
   * Gauge of the convex polygon with the given boundary vertices (2D only).
   * The polygon must be strictly convex with 0 in its interior.
   */
  static AnisotropyNorm custom_tabulated(const std::vector<Vec>& boundary_points);

  int dim() const { return dim_; }
  NormFamily family() const { return family_; }

  const Mat& matrix() const { return A_; }
  const Mat& matrix_inverse() const { return A_inv_; }
  double exponent() const { return p_; }
  const Vec& shift() const { return b_; }
  const std::vector<Vec>& vertices() const { return vertices_; }

  /** H(xi).  Throws ZeroVectorError when |xi| < 1e-14. */
  double value(const Vec& xi) const;

  /**
   * Gradient of H.  Closed form for all families except custom_tabulated,
   * which uses central differences with step 1e-6*|xi|.
   */
  Vec gradient(const Vec& xi) const;

  /**
   * Hessian of H^2 (0-homogeneous).  Entries can be +inf on coordinate
   * hyperplanes for the pnorm family with p < 2.
   */
  Mat hessian_H2(const Vec& xi) const;

  /**
   * Samples hessian_H2 over a quasi-uniform sphere grid (plus the +-e_i axis
   * directions) and reports the eigenvalue range.  The verdict requires
   * lambda_min > 1e-8 at every sample.
   */
  EllipticityScan check_uniform_ellipticity(int samples = 128) const;

 private:
  AnisotropyNorm(int dim, NormFamily family) : dim_(dim), family_(family) {}

  void require_nonzero(const Vec& xi) const;

  int dim_;
  NormFamily family_;
  Mat A_, A_inv_;          // ellipse
  double p_ = 2.0;         // pnorm
  Vec b_;                  // shifted
  std::vector<Vec> vertices_;  // custom: polygon boundary, counter-clockwise
  std::vector<Vec> edge_normals_;
  std::vector<double> edge_offsets_;
};

}  // namespace fl
