#include "fl/anisotropy.hpp"

#include <cmath>
#include <limits>

namespace fl {

const char* family_name(NormFamily f) {
  switch (f) {
    case NormFamily::kEuclidean: return "euclidean";
    case NormFamily::kEllipse: return "ellipse";
    case NormFamily::kPNorm: return "pnorm";
    case NormFamily::kShifted: return "shifted";
    case NormFamily::kCustomTabulated: return "custom_tabulated";
  }
  return "unknown";
}

namespace {

void require_dim(int dim) {
  if (dim < 2) throw BadParameterError("norm dimension must be at least 2");
}

double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

AnisotropyNorm AnisotropyNorm::euclidean(int dim) {
  require_dim(dim);
  return AnisotropyNorm(dim, NormFamily::kEuclidean);
}

AnisotropyNorm AnisotropyNorm::ellipse(const Mat& A) {
  const int dim = static_cast<int>(A.rows());
  require_dim(dim);
  if (A.cols() != A.rows()) throw BadParameterError("ellipse matrix must be square");
  const double scale = A.cwiseAbs().maxCoeff();
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw BadParameterError("ellipse matrix must be symmetric");
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw BadParameterError("ellipse matrix must be positive definite");
  AnisotropyNorm n(dim, NormFamily::kEllipse);
  n.A_ = A;
  n.A_inv_ = llt.solve(Mat::Identity(dim, dim));
  return n;
}

AnisotropyNorm AnisotropyNorm::pnorm(int dim, double p) {
  require_dim(dim);
  if (!std::isfinite(p) || p <= 1.0)
    throw BadParameterError("pnorm exponent must be finite and > 1");
  AnisotropyNorm n(dim, NormFamily::kPNorm);
  n.p_ = p;
  return n;
}

AnisotropyNorm AnisotropyNorm::shifted(const Vec& b) {
  const int dim = static_cast<int>(b.size());
  require_dim(dim);
  if (b.norm() >= 0.999)
    throw BadParameterError("shift vector must satisfy |b| < 0.999");
  AnisotropyNorm n(dim, NormFamily::kShifted);
  n.b_ = b;
  return n;
}

AnisotropyNorm AnisotropyNorm::custom_tabulated(const std::vector<Vec>& pts) {
  if (pts.size() < 3) throw BoundaryError("polygon needs at least 3 vertices");
  for (const Vec& v : pts)
    if (v.size() != 2) throw BoundaryError("tabulated boundaries are 2D only");

  std::vector<Vec> verts = pts;
  const std::size_t m = verts.size();
  double area2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) area2 += cross2(verts[i], verts[(i + 1) % m]);
  if (std::abs(area2) < 1e-14) throw BoundaryError("polygon is degenerate");
  if (area2 < 0.0) std::reverse(verts.begin(), verts.end());

  double scale = 0.0;
  for (const Vec& v : verts) scale = std::max(scale, v.norm());

  AnisotropyNorm n(2, NormFamily::kCustomTabulated);
  n.vertices_ = verts;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = verts[i];
    const Vec& b = verts[(i + 1) % m];
    const Vec& c = verts[(i + 2) % m];
    if (cross2(b - a, c - b) <= 1e-12 * scale * scale)
      throw BoundaryError("polygon must be strictly convex");
    Vec normal(2);
    normal << (b - a)[1], -(b - a)[0];
    normal.normalize();
    const double offset = normal.dot(a);
    if (offset <= 1e-9 * scale)
      throw BoundaryError("polygon must contain 0 in its interior");
    n.edge_normals_.push_back(normal);
    n.edge_offsets_.push_back(offset);
  }
  return n;
}

void AnisotropyNorm::require_nonzero(const Vec& xi) const {
  if (xi.size() != dim_) throw BadParameterError("argument has wrong dimension");
  if (xi.norm() < 1e-14) throw ZeroVectorError("gauge argument is numerically 0");
}

double AnisotropyNorm::value(const Vec& xi) const {
  require_nonzero(xi);
  switch (family_) {
    case NormFamily::kEuclidean:
      return xi.norm();
    case NormFamily::kEllipse:
      return std::sqrt(xi.dot(A_ * xi));
    case NormFamily::kPNorm: {
      // scale out the max component so large exponents cannot overflow
      const double m = xi.cwiseAbs().maxCoeff();
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(xi[i]) / m, p_);
      return m * std::pow(s, 1.0 / p_);
    }
    case NormFamily::kShifted:
      return xi.norm() + b_.dot(xi);
    case NormFamily::kCustomTabulated: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < edge_normals_.size(); ++i)
        best = std::max(best, edge_normals_[i].dot(xi) / edge_offsets_[i]);
      return best;
    }
  }
  throw Error("unreachable");
}

Vec AnisotropyNorm::gradient(const Vec& xi) const {
  require_nonzero(xi);
  switch (family_) {
    case NormFamily::kEuclidean:
      return xi / xi.norm();
    case NormFamily::kEllipse: {
      const Vec Axi = A_ * xi;
      return Axi / std::sqrt(xi.dot(Axi));
    }
    case NormFamily::kPNorm: {
      const double m = xi.cwiseAbs().maxCoeff();
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += std::pow(std::abs(xi[i]) / m, p_);
      const double denom = std::pow(s, (p_ - 1.0) / p_);
      Vec g(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double t = std::abs(xi[i]) / m;
        g[i] = (xi[i] < 0.0 ? -1.0 : 1.0) * std::pow(t, p_ - 1.0) / denom;
      }
      return g;
    }
    case NormFamily::kShifted:
      return xi / xi.norm() + b_;
    case NormFamily::kCustomTabulated: {
      const double h = 1e-6 * xi.norm();
      Vec g(dim_);
      for (int i = 0; i < dim_; ++i) {
        Vec lo = xi, hi = xi;
        hi[i] += h;
        lo[i] -= h;
        g[i] = (value(hi) - value(lo)) / (2.0 * h);
      }
      return g;
    }
  }
  throw Error("unreachable");
}

Mat AnisotropyNorm::hessian_H2(const Vec& xi) const {
  require_nonzero(xi);
  switch (family_) {
    case NormFamily::kEuclidean:
      return 2.0 * Mat::Identity(dim_, dim_);
    case NormFamily::kEllipse:
      return 2.0 * A_;
    case NormFamily::kPNorm: {
      // 0-homogeneous, so evaluate on the rescaled argument
      const Vec t = xi / xi.cwiseAbs().maxCoeff();
      const double H = value(t);
      Vec sig(dim_);
      for (int i = 0; i < dim_; ++i)
        sig[i] = (t[i] < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(t[i]), p_ - 1.0);
      Mat M = 2.0 * (2.0 - p_) * std::pow(H, 2.0 - 2.0 * p_) * sig * sig.transpose();
      for (int i = 0; i < dim_; ++i)
        M(i, i) += 2.0 * (p_ - 1.0) * std::pow(H, 2.0 - p_) *
                   std::pow(std::abs(t[i]), p_ - 2.0);
      return M;
    }
    case NormFamily::kShifted: {
      const double r = xi.norm();
      const Vec u = xi / r;
      const Mat P = Mat::Identity(dim_, dim_) - u * u.transpose();
      return 2.0 * (Mat::Identity(dim_, dim_) + (b_.dot(xi) / r) * P +
                    u * b_.transpose() + b_ * u.transpose() + b_ * b_.transpose());
    }
    case NormFamily::kCustomTabulated: {
      const double h = 1e-5 * xi.norm();
      auto f = [this](const Vec& z) {
        const double v = value(z);
        return v * v;
      };
      Mat M(dim_, dim_);
      const double f0 = f(xi);
      for (int i = 0; i < dim_; ++i) {
        Vec hi = xi, lo = xi;
        hi[i] += h;
        lo[i] -= h;
        M(i, i) = (f(hi) - 2.0 * f0 + f(lo)) / (h * h);
        for (int j = i + 1; j < dim_; ++j) {
          Vec pp = xi, pm = xi, mp = xi, mm = xi;
          pp[i] += h; pp[j] += h;
          pm[i] += h; pm[j] -= h;
          mp[i] -= h; mp[j] += h;
          mm[i] -= h; mm[j] -= h;
          M(i, j) = M(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
      }
      return M;
    }
  }
  throw Error("unreachable");
}

EllipticityScan AnisotropyNorm::check_uniform_ellipticity(int samples) const {
  const int n = std::max(samples, 100);
  std::vector<Vec> pts = sphere_grid(dim_, n);
  for (int i = 0; i < dim_; ++i) {
    pts.push_back(Vec::Unit(dim_, i));
    pts.push_back(-Vec::Unit(dim_, i));
  }

  EllipticityScan scan;
  scan.lambda_min = std::numeric_limits<double>::infinity();
  scan.lambda_max = -std::numeric_limits<double>::infinity();
  scan.samples = static_cast<int>(pts.size());
  for (const Vec& w : pts) {
    Mat M = hessian_H2(w);
    const bool finite = M.allFinite();
    if (!finite) {
      // unbounded curvature direction: cap the entries so the finite
      // eigenvalues (and hence lambda_min) stay meaningful
      scan.lambda_max = std::numeric_limits<double>::infinity();
      M = M.unaryExpr([](double v) {
        if (std::isnan(v)) return 1e12;
        return std::clamp(v, -1e12, 1e12);
      });
    }
    const Mat S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolve failed");
    scan.lambda_min = std::min(scan.lambda_min, es.eigenvalues().minCoeff());
    if (finite)
      scan.lambda_max = std::max(scan.lambda_max, es.eigenvalues().maxCoeff());
  }
  scan.uniformly_elliptic = scan.lambda_min > 1e-8;
  return scan;
}

}  // namespace fl
