#pragma once

#include "fl/dual.hpp"
#include "fl/solution.hpp"

#include <cstdint>
#include <functional>

namespace fl {

struct QuadratureConfig {
  double rtol = 1e-9;
  int max_subdivisions = 1 << 15;
  std::int64_t mc_samples = std::int64_t{1} << 22;
  std::uint64_t seed = 0x5eedf1;
};

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;
  bool converged = false;  // est_error <= rtol * |value|; the value is returned either way
};

/** Adaptive Gauss-Kronrod integral of f over the finite interval [a, b]. */
QuadResult adaptive_finite(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& cfg);

/**
 * Integral of f over [0, inf), computed through the compactifying substitution
 * rho = s/(1-s) followed by adaptive nested Gauss-Kronrod on [0, 1).
 */
QuadResult radial_improper(const std::function<double(double)>& f,
                           const QuadratureConfig& cfg);

/**
 * Total mass integral of e^u by importance sampling: uniform sphere directions
 * combined with a heavy-tailed radial proposal matched to the solution decay,
 * giving bounded weights.  Deterministic for a fixed config, including under
 * any FL_THREADS setting.
 */
McEstimate monte_carlo_mass(const LiouvilleSolution& u,
                            const QuadratureConfig& cfg);

/** Mass inside the Wulff ball of radius R, by a uniform polar proposal. */
McEstimate monte_carlo_mass_in_ball(const LiouvilleSolution& u, double R,
                                    const QuadratureConfig& cfg);

/**
 * Integral of g over a Wulff ball: polar decomposition with an adaptive radial
 * rule and an angular grid that doubles until the result is stable to rtol.
 */
QuadResult wulff_interior(const WulffShape& shape,
                          const std::function<double(const Vec&)>& g,
                          const QuadratureConfig& cfg);

/**
 * Total mass of e^u through the 1D radial reduction
 * N * vol * integral of e^{u(rho)} rho^{N-1}, integrated in the log-radial
 * variable where the kernel decays exponentially toward both ends; the
 * optional detail records the combined raw quadrature result.
 */
double mass_radial_1d(const LiouvilleSolution& u, const QuadratureConfig& cfg,
                      QuadResult* detail = nullptr);

}  // namespace fl
