#pragma once

#include "fl/anisotropy.hpp"
#include "fl/solution.hpp"

#include <functional>
#include <memory>

namespace fl {

/**
 * Flux H^{p-1}(g) gradH(g) of the gauge p-Laplace operator, evaluated on a
 * caller-supplied gradient field g.  The operator itself is recovered as the
 * divergence of this flux.
 */
class FluxField {
 public:
  FluxField(std::shared_ptr<const AnisotropyNorm> norm, double p,
            std::function<Vec(const Vec&)> gradient_source);

  int dim() const { return norm_->dim(); }
  double p() const { return p_; }
  const AnisotropyNorm& norm() const { return *norm_; }

  /** Flux at x; the zero vector wherever |g(x)| < 1e-12. */
  Vec flux(const Vec& x) const;

  /** Flux evaluated directly on a gradient value. */
  Vec flux_from_gradient(const Vec& g) const;

  /**
   * Central-difference divergence of the flux at step h.  Every stencil point
   * must carry |g| > 1e-10, otherwise DegenerateRegionError is thrown.
   */
  double divergence(const Vec& x, double h) const;

  /** Richardson-extrapolated divergence: (4 D(h/2) - D(h)) / 3. */
  double divergence_richardson(const Vec& x, double h) const;

 private:
  std::shared_ptr<const AnisotropyNorm> norm_;
  double p_;
  std::function<Vec(const Vec&)> grad_;
};

/**
 * Gauge p-Laplacian of the field behind `field` at x, by Richardson-extrapolated
 * central differences.  Nonpositive h requests the default step 1e-4 (1 + |x|).
 */
double finsler_p_laplacian(const FluxField& field, const Vec& x, double h = 0.0);

struct ResidualSample {
  double rhs = 0.0;           // e^u at the sample point
  double lap_h = 0.0;         // divergence at step h
  double lap_h2 = 0.0;        // divergence at step h/2
  double lap_richardson = 0.0;
  double residual_rel = 0.0;  // |lap_richardson + rhs| / rhs
  double order = 0.0;         // log2 of the raw residual ratio
};

/**
 * Verifies the Liouville equation -div flux = e^u at one point by comparing
 * the numeric divergence of the analytic flux against -e^u.  The sample point
 * must satisfy rho in [1e-2, 1e3].
 */
ResidualSample pde_residual(const LiouvilleSolution& u, const Vec& x,
                            double h = 0.0);

}  // namespace fl
