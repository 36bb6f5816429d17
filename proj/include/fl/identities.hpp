#pragma once

#include "fl/flux.hpp"
#include "fl/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fl {

/**
 * Outcome of one verification check.  computed and target hold the raw values
 * side by side; abs_err and rel_err are the worst element-wise deviations,
 * with targets at zero compared absolutely.  passed is equivalent to
 * rel_err <= tolerance (abs_err for zero targets).
 *
 * Checks that combine estimators with different intrinsic accuracies (a
 * deterministic quadrature leg next to a Monte Carlo leg) normalize each leg's
 * error by that leg's own budget and report the worst multiple with
 * tolerance 1; config_note spells out the legs.
 */
struct CheckResult {
  std::string name;
  std::string anchor;
  std::vector<double> computed;
  std::vector<double> target;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::uint64_t seed = 0;
  std::string config_note;
  double wall_ms = 0.0;
};

/** Registered anchor identifiers; every CheckResult must carry one of these. */
const std::vector<std::string>& known_anchors();

/** True when the anchor is registered. */
bool is_known_anchor(const std::string& anchor);

/**
 * Total mass of e^u against the quantized constant N (N^2/(N-1))^{N-1} vol,
 * checked through the 1D radial reduction (budget 1e-7 relative) and through
 * Monte Carlo importance sampling (budget three standard errors).
 */
CheckResult verify_mass_quantization(const LiouvilleSolution& u,
                                     const QuadratureConfig& cfg);

/**
 * Mass of e^u never falls below the quantized constant, and the explicit
 * family attains it; two-sided at 1e-6 relative.
 */
CheckResult verify_mass_lower_bound(const LiouvilleSolution& u,
                                    const QuadratureConfig& cfg);

/**
 * Divergence-theorem balance on the Wulff ball of radius R: the interior
 * integral of e^u equals the outward boundary flux of -H^{N-1}(grad u)
 * gradH(grad u).  R must lie in [1e-1, 1e3]; 1e-6 relative.
 */
CheckResult verify_flux_balance(const LiouvilleSolution& u, double R,
                                const QuadratureConfig& cfg);

/**
 * The boundary flux at a large radius approaches the total quantized mass;
 * checked at R = 1e3 with budget 1e-4 relative, the size of the omitted tail.
 */
CheckResult verify_flux_tail(const LiouvilleSolution& u,
                             const QuadratureConfig& cfg);

/** Gradient and source fields for the general domain-scaling identity. */
struct PohozaevFields {
  std::function<Vec(const Vec&)> grad_u;
  std::function<double(const Vec&)> source;  // f with -div flux = f
};

/**
 * Domain-scaling (Pohozaev-type) identity for the gauge p-Laplacian on a
 * Wulff ball: (p-N)/p * interior H^p(grad u) - interior f <x-y, grad u>
 * equals the boundary integral
 * H^{p-1} <gradH(grad u), nu> <x-y, grad u> - H^p(grad u)/p <x-y, nu>.
 */
CheckResult verify_pohozaev(std::shared_ptr<const AnisotropyNorm> norm,
                            double p, const PohozaevFields& fields,
                            const WulffShape& domain, const Vec& y,
                            const QuadratureConfig& cfg, double tolerance,
                            const std::string& name);

/**
 * The identity on a linear field u = <a, x> with zero source: both sides
 * reduce to (p-N)/p H^p(a) |domain|, checked against that closed form at
 * 1e-10 relative.
 */
CheckResult verify_pohozaev_linear(std::shared_ptr<const AnisotropyNorm> norm,
                                   double p, const Vec& a,
                                   const WulffShape& domain,
                                   const QuadratureConfig& cfg);

/**
 * Closed-form split of the superlevel mass on level sets:
 * M(t) = e^t vol R(t)^N + (N-1)/N H^N(grad u) vol R(t)^N with the gradient
 * gauge sampled on the level set; 1e-8 relative over the t grid.
 */
CheckResult verify_pohozaev_wulff_split(const LiouvilleSolution& u,
                                        const std::vector<double>& t_grid);

/**
 * Coarea derivatives at level t: central t-differences of the level-set
 * volume and superlevel mass against boundary integrals of 1/|grad u| and
 * e^t/|grad u|, plus the level-flux identity M(t) = boundary integral of
 * H^N(grad u)/|grad u|; 1e-5 relative.
 */
CheckResult verify_coarea(const LiouvilleSolution& u, double t, double delta,
                          const QuadratureConfig& cfg);

/**
 * Per-radius decay curves: sup |u + gamma0 log H0rev| sampled on euclidean
 * spheres and the weighted gradient sup |x| |grad(u + gamma0 log H0rev)|
 * sampled on Wulff spheres, on fixed direction streams.  Both asymptotic
 * checks and the plotting CSV read these.
 */
struct AsymptoticCurves {
  std::vector<double> radius;
  std::vector<double> profile_sup;
  std::vector<double> gradient_sup;
};

AsymptoticCurves asymptotic_curves(const LiouvilleSolution& u,
                                   const std::vector<double>& radii,
                                   int sphere_samples);

/**
 * Far-field profile: the sampled sup of |u + gamma0 log rho| stabilizes along
 * an ascending radius curve, with last-decade variation at most 1e-3.
 */
CheckResult verify_asymptotic_profile(const LiouvilleSolution& u,
                                      const std::vector<double>& radii,
                                      int sphere_samples);

/**
 * Weighted gradient decay: max of |x| |grad(u + gamma0 log rho)| decreases
 * along the radius curve and ends at most 1e-3.
 */
CheckResult verify_asymptotic_gradient(const LiouvilleSolution& u,
                                       const std::vector<double>& radii,
                                       int sphere_samples);

/**
 * The decay exponent recovered from the quadrature mass equals N^2/(N-1) to
 * 1e-6 relative.
 */
CheckResult verify_gamma0_recovery(const LiouvilleSolution& u,
                                   const QuadratureConfig& cfg);

/**
 * Sampled upper envelope: the per-decade sup of u + N log rho never exceeds
 * the near-field sup; reported as a sampled check, not a certified bound.
 */
CheckResult verify_upper_envelope(const LiouvilleSolution& u,
                                  int sphere_samples);

/** Level sets coincide with Wulff spheres: radii, gradient gauge constancy,
 * and fitted centers, each at 1e-9. */
CheckResult verify_level_rigidity(const LiouvilleSolution& u,
                                  const std::vector<double>& t_grid);

/**
 * Negative control for the rigidity detector: on the perturbed field
 * u + amplitude sin(x_1) the gradient-gauge spread must exceed 1e-4, so the
 * result passes exactly when the detector fires.
 */
CheckResult verify_rigidity_negative_control(const LiouvilleSolution& u,
                                             double amplitude);

/** Scale and peak determine each other: lambda -> t0 -> lambda to 1e-12. */
CheckResult verify_lambda_roundtrip(const LiouvilleSolution& u);

/**
 * Superlevel mass closed form against interior quadrature of e^u over the
 * level ball, at 1e-7 relative.
 */
CheckResult verify_level_mass_profile(const LiouvilleSolution& u, double t,
                                      const QuadratureConfig& cfg);

/**
 * Isoperimetric ratio Q = perimeter / (N vol^{1/N} |body|^{(N-1)/N}) on
 * random convex polygons: the one-sided deficit below 1 stays within 1e-6,
 * and the smallest margin above 1 is recorded.
 */
CheckResult verify_isoperimetric_polygons(
    std::shared_ptr<const AnisotropyNorm> norm, int count, std::uint64_t seed);

/** Q on the Wulff shape of the same gauge equals 1 to 1e-4. */
CheckResult verify_isoperimetric_wulff(
    std::shared_ptr<const AnisotropyNorm> norm, const QuadratureConfig& cfg);

/** Euclidean gauge on the unit square: Q = 2/sqrt(pi) to 1e-6. */
CheckResult verify_isoperimetric_square();

/**
 * Duality inversion: H0(gradH(x)) = 1 and H(gradH0(x)) = 1 over sampled
 * directions, at 1e-6.
 */
CheckResult verify_duality_pairing(std::shared_ptr<const AnisotropyNorm> norm,
                                   int samples, std::uint64_t seed);

/** Closed-form dual values against a dense 2D support scan, at 1e-8. */
CheckResult verify_dual_support_scan(
    std::shared_ptr<const AnisotropyNorm> norm, int samples,
    std::uint64_t seed);

/** Quadrature Wulff volume against the rejection Monte Carlo oracle, in
 * units of three standard errors. */
CheckResult verify_wulff_volume(std::shared_ptr<const AnisotropyNorm> norm,
                                const QuadratureConfig& cfg);

/** Anisotropic perimeter of the unit Wulff shape equals N times its volume,
 * at 1e-6. */
CheckResult verify_perimeter_volume(std::shared_ptr<const AnisotropyNorm> norm,
                                    const QuadratureConfig& cfg);

/** Uniform ellipticity scan of Hess(H^2); passes when the verdict is
 * positive, recording the sampled eigenvalue range. */
CheckResult verify_uniform_ellipticity(
    std::shared_ptr<const AnisotropyNorm> norm);

/**
 * Equation residual over a sampled grid of Wulff radii in [0.1, 100]: the
 * worst relative residual after Richardson stays within 1e-4.
 */
CheckResult verify_pde_residual(const LiouvilleSolution& u, int samples,
                                std::uint64_t seed);

/**
 * Median empirical order of the residual stencil over the same grid is 2
 * within 10 percent; the median ignores far samples whose raw differences
 * sit at roundoff.
 */
CheckResult verify_pde_residual_order(const LiouvilleSolution& u, int samples,
                                      std::uint64_t seed);

/** Full report over the selected suites. */
struct VerificationReport {
  std::string norm_spec;
  std::string solution_spec;
  std::string version;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/** Everything run_suites needs: resolved gauge, solution parameters,
 * quadrature configuration, and the suite selection. */
struct SuiteRequest {
  std::shared_ptr<const AnisotropyNorm> norm;
  int n = 2;
  double lambda = 1.0;
  Vec center;
  QuadratureConfig quad;
  std::vector<std::string> suites;  // empty selects every suite
  Vec pohozaev_y;                   // size 0 keeps the default offset pivot
};

/** Names of the check suites run_suites understands. */
const std::vector<std::string>& known_suites();

/**
 * Runs the selected suites and assembles the report, checks sorted by name.
 * Unknown suite names throw BadParameterError.
 */
VerificationReport run_suites(const SuiteRequest& request);

}  // namespace fl
