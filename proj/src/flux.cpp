#include "fl/flux.hpp"

#include <cmath>
#include <limits>

namespace fl {

FluxField::FluxField(std::shared_ptr<const AnisotropyNorm> norm, double p,
                     std::function<Vec(const Vec&)> gradient_source)
    : norm_(std::move(norm)), p_(p), grad_(std::move(gradient_source)) {
  if (!norm_) throw BadParameterError("flux field needs a norm");
  if (!(p_ > 1.0)) throw BadParameterError("flux exponent must exceed 1");
  if (!grad_) throw BadParameterError("flux field needs a gradient source");
}

Vec FluxField::flux_from_gradient(const Vec& g) const {
  if (g.norm() < 1e-12) return Vec::Zero(norm_->dim());
  const double h = norm_->value(g);
  return std::pow(h, p_ - 1.0) * norm_->gradient(g);
}

Vec FluxField::flux(const Vec& x) const { return flux_from_gradient(grad_(x)); }

double FluxField::divergence(const Vec& x, double h) const {
  if (!(h > 0.0)) throw BadParameterError("divergence step must be positive");
  const int n = norm_->dim();
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    const Vec ghi = grad_(hi);
    const Vec glo = grad_(lo);
    if (ghi.norm() <= 1e-10 || glo.norm() <= 1e-10)
      throw DegenerateRegionError(
          "divergence stencil crossed a vanishing-gradient region");
    div += (flux_from_gradient(ghi)[i] - flux_from_gradient(glo)[i]) / (2.0 * h);
  }
  return div;
}

double FluxField::divergence_richardson(const Vec& x, double h) const {
  const double d1 = divergence(x, h);
  const double d2 = divergence(x, 0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

double finsler_p_laplacian(const FluxField& field, const Vec& x, double h) {
  if (h <= 0.0) h = 1e-4 * (1.0 + x.norm());
  return field.divergence_richardson(x, h);
}

ResidualSample pde_residual(const LiouvilleSolution& u, const Vec& x, double h) {
  const double r = u.rho(x);
  if (r < 1e-2 || r > 1e3)
    throw BadParameterError("residual sample point must satisfy rho in [1e-2, 1e3]");
  if (h <= 0.0) h = 1e-4 * (1.0 + x.norm());

  FluxField field(u.gauge().base_ptr(), static_cast<double>(u.n()),
                  [&u](const Vec& y) { return u.gradient(y); });

  ResidualSample s;
  s.rhs = std::exp(u.value(x));
  s.lap_h = field.divergence(x, h);
  s.lap_h2 = field.divergence(x, 0.5 * h);
  s.lap_richardson = (4.0 * s.lap_h2 - s.lap_h) / 3.0;
  s.residual_rel = std::abs(s.lap_richardson + s.rhs) / s.rhs;
  const double r1 = std::abs(s.lap_h + s.rhs);
  const double r2 = std::abs(s.lap_h2 + s.rhs);
  s.order = (r1 > 0.0 && r2 > 0.0) ? std::log2(r1 / r2)
                                   : std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace fl
