#pragma once

#include "fl/anisotropy.hpp"
#include "fl/dual.hpp"

#include <memory>
#include <string>
#include <vector>

namespace flt {

using fl::Mat;
using fl::Vec;

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline Vec vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

/** Diagonal matrix diag(4, 1, ..., 1), the stock anisotropic test ellipse. */
inline Mat stretched_diag(int n) {
  Mat a = Mat::Identity(n, n);
  a(0, 0) = 4.0;
  return a;
}

/** Shift vector 0.3 e1. */
inline Vec shift_vector(int n, double s = 0.3) {
  Vec b = Vec::Zero(n);
  b[0] = s;
  return b;
}

inline std::shared_ptr<const fl::AnisotropyNorm> make_norm(
    const std::string& family, int n) {
  using fl::AnisotropyNorm;
  if (family == "euclidean") {
    return std::make_shared<const AnisotropyNorm>(AnisotropyNorm::euclidean(n));
  }
  if (family == "ellipse") {
    return std::make_shared<const AnisotropyNorm>(
        AnisotropyNorm::ellipse(stretched_diag(n)));
  }
  if (family == "pnorm") {
    return std::make_shared<const AnisotropyNorm>(AnisotropyNorm::pnorm(n, 3.0));
  }
  if (family == "shifted") {
    return std::make_shared<const AnisotropyNorm>(
        AnisotropyNorm::shifted(shift_vector(n)));
  }
  throw fl::BadParameterError("unknown test family " + family);
}

inline std::shared_ptr<const fl::DualGauge> make_gauge(const std::string& family,
                                                       int n) {
  return std::make_shared<const fl::DualGauge>(make_norm(family, n));
}

inline const std::vector<std::string>& smooth_families() {
  static const std::vector<std::string> f = {"euclidean", "ellipse", "shifted"};
  return f;
}

inline const std::vector<std::string>& closed_form_families() {
  static const std::vector<std::string> f = {"euclidean", "ellipse", "pnorm",
                                             "shifted"};
  return f;
}

/** Central-difference gradient of a scalar functional, for oracle comparisons. */
template <class F>
Vec fd_gradient(const F& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

/** Deterministic generic direction away from coordinate axes. */
inline Vec generic_dir(const fl::CounterRng& rng, int n, std::uint64_t idx,
                       double min_component = 0.0) {
  for (std::uint64_t k = 0;; ++k) {
    const Vec w = rng.sphere(n, idx * 1000 + k);
    if (w.cwiseAbs().minCoeff() > min_component) return w;
  }
}

/** A scalene strictly convex pentagon with 0 in its interior. */
inline std::vector<Vec> pentagon() {
  return {vec2(1.3, 0.1), vec2(0.3, 1.1), vec2(-1.0, 0.7), vec2(-1.2, -0.6),
          vec2(0.5, -1.0)};
}

/** Regular m-gon inscribed in the unit circle. */
inline std::vector<Vec> regular_polygon(int m) {
  std::vector<Vec> pts;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * M_PI * k / m;
    pts.push_back(vec2(std::cos(th), std::sin(th)));
  }
  return pts;
}

}  // namespace flt
