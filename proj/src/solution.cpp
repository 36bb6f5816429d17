#include "fl/solution.hpp"

#include <cmath>

namespace fl {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LiouvilleSolution::LiouvilleSolution(int n, double lambda, Vec center,
                                     std::shared_ptr<const DualGauge> gauge)
    : LiouvilleSolution(n, lambda, std::move(center), gauge,
                        gauge ? wulff_unit_volume(*gauge) : 0.0) {}

LiouvilleSolution::LiouvilleSolution(int n, double lambda, Vec center,
                                     std::shared_ptr<const DualGauge> gauge,
                                     double unit_volume)
    : n_(n),
      lambda_(lambda),
      center_(std::move(center)),
      gauge_(std::move(gauge)),
      unit_volume_(unit_volume) {
  if (!gauge_) throw BadParameterError("solution needs a dual gauge");
  if (n_ < 2) throw BadParameterError("solution dimension must be at least 2");
  if (n_ != gauge_->dim())
    throw BadParameterError("solution dimension does not match the gauge");
  if (!(lambda_ > 0.0)) throw BadParameterError("lambda must be positive");
  if (center_.size() != n_)
    throw BadParameterError("solution center has wrong dimension");
  if (!(unit_volume_ > 0.0)) throw BadParameterError("unit volume must be positive");
  q_ = static_cast<double>(n_) / (n_ - 1.0);
  log_a_ = (n_ - 1.0) * std::log(static_cast<double>(n_) * n_ / (n_ - 1.0));
}

double LiouvilleSolution::rho(const Vec& x) const {
  const Vec d = x - center_;
  if (d.norm() < 1e-14) return 0.0;
  return gauge_->reversed(d);
}

double LiouvilleSolution::value(const Vec& x) const { return value_radial(rho(x)); }

double LiouvilleSolution::value_radial(double rho) const {
  if (rho < 0.0) throw BadParameterError("rho must be nonnegative");
  if (rho == 0.0) return t0();
  const double z = q_ * (std::log(lambda_) + std::log(rho));
  return t0() - n_ * softplus(z);
}

Vec LiouvilleSolution::gradient(const Vec& x) const {
  const Vec d = x - center_;
  if (d.norm() < 1e-14) return Vec::Zero(n_);
  const double r = gauge_->reversed(d);
  return -gradient_gauge_radial(r) * gauge_->reversed_gradient(d);
}

double LiouvilleSolution::gradient_gauge_radial(double rho) const {
  if (rho <= 0.0) return 0.0;
  const double z = q_ * (std::log(lambda_) + std::log(rho));
  return gamma0() / rho * sigmoid(z);
}

double LiouvilleSolution::t0() const {
  return std::log(static_cast<double>(n_)) + log_a_ + n_ * std::log(lambda_);
}

double LiouvilleSolution::quantized_mass() const {
  return n_ * std::exp(log_a_) * unit_volume_;
}

double LiouvilleSolution::gamma0() const {
  return static_cast<double>(n_) * n_ / (n_ - 1.0);
}

double LiouvilleSolution::kappa() const {
  return std::pow(quantized_mass(), 1.0 / (n_ - 1.0));
}

double LiouvilleSolution::level_radius(double t) const {
  if (t > t0()) throw RangeError("level above the solution maximum");
  const double e = std::expm1((t0() - t) / n_);
  return std::pow(e, 1.0 / q_) / lambda_;
}

double LiouvilleSolution::level_mass(double t) const {
  if (t > t0()) throw RangeError("level above the solution maximum");
  const double w = -std::expm1((t - t0()) / n_);  // 1 - e^{(t-t0)/N} in [0,1)
  return quantized_mass() * std::pow(w, n_ - 1.0);
}

double LiouvilleSolution::mass_in_radius(double R) const {
  if (R < 0.0) throw BadParameterError("radius must be nonnegative");
  if (R == 0.0) return 0.0;
  const double z = q_ * (std::log(lambda_) + std::log(R));
  return quantized_mass() * std::pow(sigmoid(z), n_ - 1.0);
}

double LiouvilleSolution::lambda_from_t0(int n, double t0) {
  if (n < 2) throw BadParameterError("dimension must be at least 2");
  const double log_na = std::log(static_cast<double>(n)) +
                        (n - 1.0) * std::log(static_cast<double>(n) * n / (n - 1.0));
  return std::exp((t0 - log_na) / n);
}

double LiouvilleSolution::gamma0_from_mass(double mass, double vol, int n) {
  if (n < 2 || !(vol > 0.0) || !(mass > 0.0))
    throw BadParameterError("gamma0 recovery needs n >= 2 and positive mass, volume");
  return std::pow(mass / (n * vol), 1.0 / (n - 1.0));
}

}  // namespace fl
