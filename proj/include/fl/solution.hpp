#pragma once

#include "fl/dual.hpp"

#include <memory>

namespace fl {

/**
 * Explicit finite-mass solution of the gauge N-Laplace Liouville equation
 *   -div( H^{N-1}(grad u) gradH(grad u) ) = e^u  on R^N,
 * namely
 *   u(x) = log( N A lambda^N / (1 + (lambda rho)^q)^N ),
 * with rho the reversed dual gauge of x - center, q = N/(N-1) and
 * A = (N^2/(N-1))^{N-1}.  All evaluations are log-domain and stay finite for
 * arbitrarily large |x|.
 */
class LiouvilleSolution {
 public:
  LiouvilleSolution(int n, double lambda, Vec center,
                    std::shared_ptr<const DualGauge> gauge);

  /** Same solution, reusing a precomputed unit Wulff volume. */
  LiouvilleSolution(int n, double lambda, Vec center,
                    std::shared_ptr<const DualGauge> gauge, double unit_volume);

  int n() const { return n_; }
  double lambda() const { return lambda_; }
  const Vec& center() const { return center_; }
  const DualGauge& gauge() const { return *gauge_; }
  std::shared_ptr<const DualGauge> gauge_ptr() const { return gauge_; }
  double unit_volume() const { return unit_volume_; }

  /** Reversed dual gauge of x - center (0 at the center). */
  double rho(const Vec& x) const;

  double value(const Vec& x) const;

  /** Radial profile: the value of u on the Wulff sphere of radius rho. */
  double value_radial(double rho) const;

  /** Gradient of u; the center maps to the zero vector by convention. */
  Vec gradient(const Vec& x) const;

  /** H(grad u) on the Wulff sphere of radius rho (constant there). */
  double gradient_gauge_radial(double rho) const;

  /** Maximum of u, attained at the center. */
  double t0() const;

  /** Total mass integral of e^u: N (N^2/(N-1))^{N-1} vol. */
  double quantized_mass() const;

  /** Decay exponent N^2/(N-1) of u against -log rho. */
  double gamma0() const;

  /** (N-1)-th root of the quantized mass. */
  double kappa() const;

  /** Wulff radius of the level set {u = t}; throws RangeError for t > t0. */
  double level_radius(double t) const;

  /** Mass of the superlevel set {u > t} (closed form). */
  double level_mass(double t) const;

  /** Mass of the Wulff ball of radius R around the center (closed form). */
  double mass_in_radius(double R) const;

  /** Inverse of t0: the scale lambda whose solution peaks at the given t0. */
  static double lambda_from_t0(int n, double t0);

  /** Decay exponent recovered from a mass value: (M / (n vol))^{1/(n-1)}. */
  static double gamma0_from_mass(double mass, double vol, int n);

 private:
  int n_;
  double lambda_;
  Vec center_;
  std::shared_ptr<const DualGauge> gauge_;
  double unit_volume_;
  double q_;       // N/(N-1)
  double log_a_;   // (N-1) log(N^2/(N-1))
};

}  // namespace fl
