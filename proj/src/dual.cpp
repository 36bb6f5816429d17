#include "fl/dual.hpp"

#include <cmath>
#include <limits>

namespace fl {

namespace {

void require_nonzero(const Vec& x) {
  if (x.norm() < 1e-14) throw ZeroVectorError("dual gauge argument is numerically 0");
}

double lq_norm(const Vec& x, double q) {
  const double m = x.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, q);
  return m * std::pow(s, 1.0 / q);
}

Vec lq_gradient(const Vec& x, double q) {
  const double m = x.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]) / m, q);
  const double denom = std::pow(s, (q - 1.0) / q);
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double t = std::abs(x[i]) / m;
    g[i] = (x[i] < 0.0 ? -1.0 : 1.0) * std::pow(t, q - 1.0) / denom;
  }
  return g;
}

}  // namespace

DualGauge::DualGauge(std::shared_ptr<const AnisotropyNorm> base)
    : base_(std::move(base)), mode_(DualMode::kClosedForm) {
  if (!base_) throw BadParameterError("dual gauge needs a base norm");
  if (base_->family() == NormFamily::kCustomTabulated) mode_ = DualMode::kOptimized;
  if (base_->family() == NormFamily::kPNorm) {
    const double p = base_->exponent();
    q_ = p / (p - 1.0);
  }
}

DualGauge::DualGauge(std::shared_ptr<const AnisotropyNorm> base, DualMode mode)
    : base_(std::move(base)), mode_(mode) {
  if (!base_) throw BadParameterError("dual gauge needs a base norm");
  if (base_->family() == NormFamily::kPNorm) {
    const double p = base_->exponent();
    q_ = p / (p - 1.0);
  }
  if (mode_ == DualMode::kClosedForm &&
      base_->family() == NormFamily::kCustomTabulated)
    throw BadParameterError("tabulated norms have no closed-form dual");
}

double DualGauge::value(const Vec& x) const {
  require_nonzero(x);
  if (mode_ == DualMode::kOptimized) return value_optimized(x, nullptr);
  switch (base_->family()) {
    case NormFamily::kEuclidean:
      return x.norm();
    case NormFamily::kEllipse:
      return std::sqrt(x.dot(base_->matrix_inverse() * x));
    case NormFamily::kPNorm:
      return lq_norm(x, q_);
    case NormFamily::kShifted: {
      const Vec& b = base_->shift();
      const double beta = b.squaredNorm();
      const double bx = b.dot(x);
      const double S = std::sqrt(bx * bx + (1.0 - beta) * x.squaredNorm());
      return (S - bx) / (1.0 - beta);
    }
    case NormFamily::kCustomTabulated:
      break;
  }
  throw Error("unreachable");
}

double DualGauge::reversed(const Vec& x) const { return value(-x); }

Vec DualGauge::gradient(const Vec& x) const {
  require_nonzero(x);
  if (mode_ == DualMode::kOptimized) return support_argmax(x);
  switch (base_->family()) {
    case NormFamily::kEuclidean:
      return x / x.norm();
    case NormFamily::kEllipse: {
      const Vec Ax = base_->matrix_inverse() * x;
      return Ax / std::sqrt(x.dot(Ax));
    }
    case NormFamily::kPNorm:
      return lq_gradient(x, q_);
    case NormFamily::kShifted: {
      const Vec& b = base_->shift();
      const double beta = b.squaredNorm();
      const double bx = b.dot(x);
      const double S = std::sqrt(bx * bx + (1.0 - beta) * x.squaredNorm());
      return ((bx * b + (1.0 - beta) * x) / S - b) / (1.0 - beta);
    }
    case NormFamily::kCustomTabulated:
      break;
  }
  throw Error("unreachable");
}

Vec DualGauge::reversed_gradient(const Vec& x) const { return -gradient(-x); }

Vec DualGauge::support_argmax(const Vec& x) const {
  require_nonzero(x);
  if (mode_ == DualMode::kClosedForm) {
    // for the analytic families the envelope maximizer is the dual gradient
    return gradient(x);
  }
  Vec eta;
  value_optimized(x, &eta);
  return eta;
}

double DualGauge::value_optimized(const Vec& x, Vec* argmax) const {
  return dim() == 2 ? optimize_2d(x, argmax) : optimize_sphere(x, argmax);
}

double DualGauge::optimize_2d(const Vec& x, Vec* argmax) const {
  const auto& H = *base_;
  auto f = [&](double th) {
    Vec w(2);
    w << std::cos(th), std::sin(th);
    return x.dot(w) / H.value(w);
  };

  const int scan = 2048;
  int best = 0;
  double fbest = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < scan; ++k) {
    const double v = f(2.0 * M_PI * k / scan);
    if (v > fbest) {
      fbest = v;
      best = k;
    }
  }

  // golden-section refinement inside the bracketing pair of scan cells
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 2.0 * M_PI * (best - 1) / scan;
  double b = 2.0 * M_PI * (best + 1) / scan;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double th = 0.5 * (a + b);
  Vec w(2);
  w << std::cos(th), std::sin(th);
  const double val = x.dot(w) / H.value(w);
  if (argmax) *argmax = w / H.value(w);
  return std::max(val, fbest);
}

double DualGauge::optimize_sphere(const Vec& x, Vec* argmax) const {
  const auto& H = *base_;
  const int n = dim();
  const double xnorm = x.norm();
  const Vec xh = x / xnorm;

  auto f = [&](const Vec& xi) { return xh.dot(xi) / H.value(xi); };

  auto tangent_gradient = [&](const Vec& xi, double fcur) {
    const double h = H.value(xi);
    const Vec grad = xh / h - (fcur / h) * H.gradient(xi);
    return Vec(grad - grad.dot(xi) * xi);
  };

  // orthonormal basis of the tangent plane of the unit sphere at xi
  auto tangent_basis = [&](const Vec& xi) {
    Eigen::HouseholderQR<Mat> qr(xi);
    const Mat q = qr.householderQ() * Mat::Identity(n, n);
    return Mat(q.rightCols(n - 1));
  };

  // Tangent-space Newton polish.  Projected gradient ascent alone crawls once
  // the iterate enters a curved valley of the objective: with the step capped
  // near the inverse curvature it zigzags, gaining only the line-search
  // minimum per iteration.  Newton steps in the reduced coordinates restore
  // quadratic local convergence.  The reduced Hessian comes from central
  // differences of the analytic tangent gradient field.
  auto polish = [&](Vec& xi, double& fcur) {
    const double delta = 1e-6;
    for (int it = 0; it < 50; ++it) {
      const Mat q = tangent_basis(xi);
      const Vec gt = q.transpose() * tangent_gradient(xi, fcur);
      const double gn = gt.norm();
      if (gn <= 1e-13 * (1.0 + std::abs(fcur))) break;
      Mat ht(n - 1, n - 1);
      for (int j = 0; j < n - 1; ++j) {
        const Vec xp = (xi + delta * q.col(j)).normalized();
        const Vec xm = (xi - delta * q.col(j)).normalized();
        ht.col(j) = q.transpose() *
                    (tangent_gradient(xp, f(xp)) - tangent_gradient(xm, f(xm))) /
                    (2.0 * delta);
      }
      ht = 0.5 * (ht + ht.transpose()).eval();
      Vec d = -ht.fullPivLu().solve(gt);
      // near a maximum the reduced Hessian is negative definite and the
      // Newton step ascends; anywhere else fall back to the gradient
      if (!d.allFinite() || d.dot(gt) <= 0.0) d = gt;
      double s = 1.0;
      bool moved = false;
      for (int back = 0; back < 40; ++back) {
        const Vec trial = (xi + s * (q * d)).normalized();
        const double ftrial = f(trial);
        if (ftrial > fcur) {
          xi = trial;
          fcur = ftrial;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      if (!moved) break;
    }
  };

  double fbest = -std::numeric_limits<double>::infinity();
  Vec xibest;
  for (const Vec& start : sphere_grid(n, 32)) {
    Vec xi = start;
    double fcur = f(xi);
    double step = 1.0;
    for (int it = 0; it < 200; ++it) {
      const Vec pg = tangent_gradient(xi, fcur);
      const double pgn = pg.norm();
      if (pgn <= 1e-13) break;
      bool moved = false;
      while (step > 1e-18) {
        const Vec trial = (xi + step * pg).normalized();
        const double ftrial = f(trial);
        if (ftrial >= fcur + 1e-4 * step * pgn * pgn) {
          xi = trial;
          fcur = ftrial;
          step = std::min(1.0, 2.0 * step);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    polish(xi, fcur);
    if (fcur > fbest) {
      fbest = fcur;
      xibest = xi;
    }
  }
  if (tangent_gradient(xibest, fbest).norm() > 1e-6 * (1.0 + std::abs(fbest)))
    throw ConvergenceError("dual sphere optimizer stalled on every start");
  if (argmax) *argmax = xibest / H.value(xibest);
  return xnorm * fbest;
}

WulffShape::WulffShape(std::shared_ptr<const DualGauge> gauge, Vec center,
                       double radius)
    : WulffShape(gauge, std::move(center), radius,
                 wulff_unit_volume(*gauge)) {}

WulffShape::WulffShape(std::shared_ptr<const DualGauge> gauge, Vec center,
                       double radius, double unit_volume)
    : gauge_(std::move(gauge)),
      center_(std::move(center)),
      radius_(radius),
      unit_volume_(unit_volume) {
  if (!gauge_) throw BadParameterError("Wulff shape needs a gauge");
  if (!(radius_ > 0.0)) throw BadParameterError("Wulff radius must be positive");
  if (center_.size() != gauge_->dim())
    throw BadParameterError("Wulff center has wrong dimension");
}

bool WulffShape::contains(const Vec& x) const {
  const Vec d = x - center_;
  if (d.norm() < 1e-14) return true;
  return gauge_->reversed(d) < radius_;
}

double WulffShape::volume() const {
  return std::pow(radius_, dim()) * unit_volume_;
}

Vec WulffShape::boundary_point(const Vec& w) const {
  return center_ + radius_ * w / gauge_->reversed(w);
}

double wulff_unit_volume(const DualGauge& gauge) {
  const int n = gauge.dim();
  if (n == 2) {
    const int m = 1 << 16;
    std::vector<double> terms(m);
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * M_PI * (k + 0.5) / m;
      Vec w(2);
      w << std::cos(th), std::sin(th);
      terms[k] = std::pow(gauge.reversed(w), -2.0);
    }
    return 0.5 * (2.0 * M_PI / m) * pairwise_sum(terms);
  }
  if (n == 3) {
    std::vector<double> u, wu;
    gauss_legendre(64, u, wu);
    const int mphi = 128;
    std::vector<double> terms;
    terms.reserve(64 * mphi);
    for (int i = 0; i < 64; ++i) {
      const double r = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
      for (int j = 0; j < mphi; ++j) {
        const double ph = 2.0 * M_PI * (j + 0.5) / mphi;
        Vec w(3);
        w << r * std::cos(ph), r * std::sin(ph), u[i];
        terms.push_back(wu[i] * std::pow(gauge.reversed(w), -3.0));
      }
    }
    return (1.0 / 3.0) * (2.0 * M_PI / mphi) * pairwise_sum(terms);
  }
  const std::size_t m = std::size_t{1} << 20;
  const auto pts = sphere_qmc(n, m);
  std::vector<double> terms(m);
  for (std::size_t k = 0; k < m; ++k)
    terms[k] = std::pow(gauge.reversed(pts[k]), -static_cast<double>(n));
  return sphere_area(n) / n * pairwise_sum(terms) / static_cast<double>(m);
}

namespace {

// exact euclidean radius of the unit Wulff ball, used to size the sampling box
double bounding_radius(const DualGauge& gauge) {
  const AnisotropyNorm& H = gauge.base();
  switch (H.family()) {
    case NormFamily::kEuclidean:
      return 1.0;
    case NormFamily::kEllipse: {
      Eigen::SelfAdjointEigenSolver<Mat> es(H.matrix());
      return std::sqrt(es.eigenvalues().maxCoeff());
    }
    case NormFamily::kPNorm: {
      const double p = H.exponent();
      const double q = p / (p - 1.0);
      const double expo = std::max(0.0, 0.5 - 1.0 / q);
      return std::pow(static_cast<double>(H.dim()), expo);
    }
    case NormFamily::kShifted:
      return 1.0 + H.shift().norm();
    case NormFamily::kCustomTabulated: {
      // the Wulff ball is the reflected polar body; its vertices are
      // edge_normal / edge_offset, and all normals are unit length
      double r = 0.0;
      const auto& verts = H.vertices();
      const std::size_t m = verts.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Vec& a = verts[i];
        const Vec& b = verts[(i + 1) % m];
        Vec nrm(2);
        nrm << (b - a)[1], -(b - a)[0];
        nrm.normalize();
        r = std::max(r, 1.0 / nrm.dot(a));
      }
      return r;
    }
  }
  throw Error("unreachable");
}

}  // namespace

McEstimate wulff_unit_volume_mc(const DualGauge& gauge, std::int64_t samples,
                                std::uint64_t seed) {
  const int n = gauge.dim();
  const double R = bounding_radius(gauge);
  const CounterRng rng(seed, 7701);

  const int blocks = 1024;
  std::vector<std::int64_t> hits(blocks, 0);
  const std::int64_t per = samples / blocks;
  const std::int64_t extra = samples % blocks;
  parallel_blocks(blocks, [&](int b) {
    const std::int64_t lo = b * per + std::min<std::int64_t>(b, extra);
    const std::int64_t hi = lo + per + (b < extra ? 1 : 0);
    std::int64_t count = 0;
    Vec x(n);
    for (std::int64_t j = lo; j < hi; ++j) {
      for (int i = 0; i < n; ++i)
        x[i] = (2.0 * rng.u01(static_cast<std::uint64_t>(j) * n + i) - 1.0) * R;
      if (x.norm() < 1e-14 * R || gauge.reversed(x) < 1.0) ++count;
    }
    hits[b] = count;
  });

  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  const double box = std::pow(2.0 * R, n);
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  McEstimate est;
  est.value = box * p;
  est.std_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

namespace {

// The boundary is the radial graph rho(w) = r / H0rev(w) over the unit
// sphere, whose surface element is rho^{n-1} dw / <w, nu>.  With Euler's
// relation <w, grad H0rev(w)> = H0rev(w) that collapses to the closed form
// r^{n-1} |grad H0rev(w)| / H0rev(w)^n dw, so no differencing of the
// parametrization is needed.
double boundary_term(const WulffShape& shape,
                     const std::function<double(const Vec&, const Vec&)>& f,
                     const Vec& w) {
  const DualGauge& g = shape.gauge();
  const int n = shape.dim();
  const double r = shape.radius();
  const double hw = g.reversed(w);
  const Vec grad = g.reversed_gradient(w);
  const Vec x = shape.center() + r * w / hw;
  return f(x, grad / grad.norm()) * std::pow(r, n - 1.0) * grad.norm() /
         std::pow(hw, static_cast<double>(n));
}

double boundary_pass_2d(const WulffShape& shape,
                        const std::function<double(const Vec&, const Vec&)>& f,
                        int m) {
  std::vector<double> terms(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / m;
    Vec w(2);
    w << std::cos(th), std::sin(th);
    terms[k] = boundary_term(shape, f, w);
  }
  return (2.0 * M_PI / m) * pairwise_sum(terms);
}

double boundary_pass_3d(const WulffShape& shape,
                        const std::function<double(const Vec&, const Vec&)>& f,
                        int k) {
  std::vector<double> u, wu;
  gauss_legendre(k, u, wu);
  const int mphi = 2 * k;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k) * mphi);
  for (int i = 0; i < k; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
    for (int j = 0; j < mphi; ++j) {
      const double ph = 2.0 * M_PI * (j + 0.5) / mphi;
      Vec w(3);
      w << s * std::cos(ph), s * std::sin(ph), u[i];
      terms.push_back(wu[i] * boundary_term(shape, f, w));
    }
  }
  return (2.0 * M_PI / mphi) * pairwise_sum(terms);
}

}  // namespace

BoundaryQuadrature boundary_quadrature(
    const WulffShape& shape,
    const std::function<double(const Vec&, const Vec&)>& integrand,
    double rtol) {
  const int n = shape.dim();
  if (n != 2 && n != 3)
    throw BadParameterError("boundary quadrature supports 2D and 3D shapes");

  BoundaryQuadrature out;
  double prev = 0.0;
  bool have_prev = false;
  if (n == 2) {
    for (int m = 256; m <= (1 << 20); m *= 2) {
      const double cur = boundary_pass_2d(shape, integrand, m);
      if (have_prev) {
        const double diff = std::abs(cur - prev);
        if (diff <= rtol * std::max(std::abs(cur), 1e-300)) {
          out.value = cur;
          out.est_error = diff;
          out.nodes = m;
          return out;
        }
      }
      prev = cur;
      have_prev = true;
    }
  } else {
    for (int k = 16; k <= 512; k *= 2) {
      const double cur = boundary_pass_3d(shape, integrand, k);
      if (have_prev) {
        const double diff = std::abs(cur - prev);
        if (diff <= rtol * std::max(std::abs(cur), 1e-300)) {
          out.value = cur;
          out.est_error = diff;
          out.nodes = 2 * k * k;
          return out;
        }
      }
      prev = cur;
      have_prev = true;
    }
  }
  throw ConvergenceError("boundary quadrature hit the node cap before " +
                         std::to_string(rtol) + " relative stability");
}

double anisotropic_perimeter(const WulffShape& shape, double rtol) {
  const AnisotropyNorm& H = shape.gauge().base();
  return boundary_quadrature(
             shape, [&](const Vec&, const Vec& nu) { return H.value(-nu); },
             rtol)
      .value;
}

}  // namespace fl
