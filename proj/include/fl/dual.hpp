#pragma once

#include "fl/anisotropy.hpp"

#include <cstdint>
#include <functional>
#include <memory>

namespace fl {

enum class DualMode { kClosedForm, kOptimized };

/**
 * Dual gauge H0(x) = sup_{xi != 0} <x, xi> / H(xi), together with the reversed
 * gauge x -> H0(-x) whose unit ball is the Wulff shape of H.  Closed forms are
 * used for the analytic families; the custom family (and any family when the
 * optimized mode is forced) goes through a sphere optimizer.
 */
class DualGauge {
 public:
  explicit DualGauge(std::shared_ptr<const AnisotropyNorm> base);
  DualGauge(std::shared_ptr<const AnisotropyNorm> base, DualMode mode);

  const AnisotropyNorm& base() const { return *base_; }
  std::shared_ptr<const AnisotropyNorm> base_ptr() const { return base_; }
  DualMode mode() const { return mode_; }
  int dim() const { return base_->dim(); }

  /** H0(x).  Throws ZeroVectorError when |x| < 1e-14. */
  double value(const Vec& x) const;

  /** Reversed dual gauge H0(-x); its sublevel sets are the Wulff shapes. */
  double reversed(const Vec& x) const;

  /** Gradient of H0 (closed form, or the envelope rule through the argmax). */
  Vec gradient(const Vec& x) const;

  /** Gradient of the reversed gauge: -grad H0 at -x. */
  Vec reversed_gradient(const Vec& x) const;

  /** Maximizer eta of <x, eta> over {H(eta) = 1}, so value(x) = <x, eta>. */
  Vec support_argmax(const Vec& x) const;

 private:
  double value_optimized(const Vec& x, Vec* argmax) const;
  double optimize_2d(const Vec& x, Vec* argmax) const;
  double optimize_sphere(const Vec& x, Vec* argmax) const;

  std::shared_ptr<const AnisotropyNorm> base_;
  DualMode mode_;
  double q_ = 2.0;  // dual exponent for the pnorm family
};

/** Wulff ball {x : reversed dual gauge of (x - center) < radius}. */
class WulffShape {
 public:
  WulffShape(std::shared_ptr<const DualGauge> gauge, Vec center, double radius);

  /** Same shape, reusing a precomputed unit volume. */
  WulffShape(std::shared_ptr<const DualGauge> gauge, Vec center, double radius,
             double unit_volume);

  const DualGauge& gauge() const { return *gauge_; }
  std::shared_ptr<const DualGauge> gauge_ptr() const { return gauge_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return gauge_->dim(); }

  bool contains(const Vec& x) const;
  double volume() const;
  double unit_volume() const { return unit_volume_; }

  /** Boundary point center + radius * w / reversed(w) for a unit direction w. */
  Vec boundary_point(const Vec& w) const;

 private:
  std::shared_ptr<const DualGauge> gauge_;
  Vec center_;
  double radius_;
  double unit_volume_;
};

/**
 * Volume of the unit Wulff ball via the polar formula
 * (1/n) * integral over S^{n-1} of (reversed gauge)^{-n}.
 * Trapezoid in 2D, Gauss x trapezoid product in 3D, sphere QMC above.
 */
double wulff_unit_volume(const DualGauge& gauge);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/** Rejection Monte Carlo cross-check of the unit Wulff volume. */
McEstimate wulff_unit_volume_mc(const DualGauge& gauge, std::int64_t samples,
                                std::uint64_t seed);

struct BoundaryQuadrature {
  double value = 0.0;
  double est_error = 0.0;
  int nodes = 0;
};

/**
 * Integral over the Wulff sphere boundary of f(x, nu) against surface measure,
 * where nu is the outward unit normal.  2D and 3D shapes only.  The node count
 * doubles until the result is stable to rtol; exceeding 2^20 nodes without
 * converging throws ConvergenceError.
 */
BoundaryQuadrature boundary_quadrature(
    const WulffShape& shape,
    const std::function<double(const Vec&, const Vec&)>& integrand,
    double rtol = 1e-8);

/** Anisotropic perimeter: boundary integral of H(-nu). */
double anisotropic_perimeter(const WulffShape& shape, double rtol = 1e-8);

}  // namespace fl
