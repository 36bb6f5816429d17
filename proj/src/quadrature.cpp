#include "fl/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace fl {

namespace {

unsigned depth_from_subdivisions(int max_subdivisions) {
  unsigned d = 1;
  while ((1 << (d + 1)) <= max_subdivisions && d < 30) ++d;
  return d;
}

struct AngularGrid {
  std::vector<Vec> scaled_dirs;   // w / reversed(w)
  std::vector<double> weights;    // quadrature weight times reversed(w)^{-n}
};

// Angular panels split at the coordinate planes, with Gauss nodes inside
// each panel, so gauges whose duals kink there stay smooth on every panel.
AngularGrid angular_grid(const DualGauge& g, int level) {
  AngularGrid grid;
  const int n = g.dim();
  if (n == 2) {
    const int k = 16 << level;
    std::vector<double> t, wt;
    gauss_legendre(k, t, wt);
    for (int quad = 0; quad < 4; ++quad) {
      for (int i = 0; i < k; ++i) {
        const double th = (quad + 0.5 * (t[i] + 1.0)) * 0.5 * M_PI;
        Vec w(2);
        w << std::cos(th), std::sin(th);
        const double hw = g.reversed(w);
        grid.scaled_dirs.push_back(w / hw);
        grid.weights.push_back(0.25 * M_PI * wt[i] * std::pow(hw, -2.0));
      }
    }
  } else {
    const int k = 4 << level;
    std::vector<double> t, wt;
    gauss_legendre(k, t, wt);
    for (int half = 0; half < 2; ++half) {
      for (int i = 0; i < k; ++i) {
        const double u = 0.5 * (t[i] + (half == 0 ? -1.0 : 1.0));
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int quad = 0; quad < 4; ++quad) {
          for (int j = 0; j < k; ++j) {
            const double ph = (quad + 0.5 * (t[j] + 1.0)) * 0.5 * M_PI;
            Vec w(3);
            w << s * std::cos(ph), s * std::sin(ph), u;
            const double hw = g.reversed(w);
            grid.scaled_dirs.push_back(w / hw);
            grid.weights.push_back(0.5 * wt[i] * 0.25 * M_PI * wt[j] *
                                   std::pow(hw, -3.0));
          }
        }
      }
    }
  }
  return grid;
}

}  // namespace

QuadResult adaptive_finite(const std::function<double(double)>& f, double a,
                           double b, const QuadratureConfig& cfg) {
  const unsigned depth = depth_from_subdivisions(cfg.max_subdivisions);
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, depth, 0.25 * cfg.rtol, &err);
  QuadResult r;
  r.value = val;
  r.est_error = err;
  r.converged = err <= cfg.rtol * std::max(std::abs(val), 1e-300);
  return r;
}

QuadResult radial_improper(const std::function<double(double)>& f,
                           const QuadratureConfig& cfg) {
  auto g = [&f](double s) {
    const double one = 1.0 - s;
    return f(s / one) / (one * one);
  };
  return adaptive_finite(g, 0.0, 1.0, cfg);
}

McEstimate monte_carlo_mass(const LiouvilleSolution& u,
                            const QuadratureConfig& cfg) {
  const std::int64_t total = cfg.mc_samples;
  if (total < 2) throw BadParameterError("mc_samples must be at least 2");
  const int n = u.n();
  const double q = static_cast<double>(n) / (n - 1.0);
  const double loglam = std::log(u.lambda());
  const double t0 = u.t0();
  const double area = sphere_area(n);
  const DualGauge& g = u.gauge();

  const CounterRng dir(cfg.seed, 101);
  const CounterRng rad(cfg.seed, 102);

  const int blocks = 1024;
  std::vector<double> s1(blocks), s2(blocks);
  const std::int64_t per = total / blocks;
  const std::int64_t extra = total % blocks;
  parallel_blocks(blocks, [&](int b) {
    const std::int64_t lo = b * per + std::min<std::int64_t>(b, extra);
    const std::int64_t hi = lo + per + (b < extra ? 1 : 0);
    std::vector<double> t1, t2;
    t1.reserve(hi - lo);
    t2.reserve(hi - lo);
    for (std::int64_t j = lo; j < hi; ++j) {
      const Vec w = dir.sphere(n, static_cast<std::uint64_t>(j));
      const double v = rad.u01(static_cast<std::uint64_t>(j));
      // heavy-tailed radial proposal with cdf z/(1+z), z = (lambda rho)^q;
      // the importance weight below is bounded over the whole half-line
      const double logrho = (std::log(v) - std::log1p(-v)) / q - loglam;
      const double z = q * (loglam + logrho);
      const double hw = g.reversed(w);
      const double logterm = t0 - (n - 2.0) * softplus(z) - std::log(q) -
                             q * loglam + (n - q) * logrho - n * std::log(hw);
      const double term = std::exp(logterm);
      t1.push_back(term);
      t2.push_back(term * term);
    }
    s1[b] = pairwise_sum(t1);
    s2[b] = pairwise_sum(t2);
  });

  const double sum1 = pairwise_sum(s1);
  const double sum2 = pairwise_sum(s2);
  const double mean = sum1 / static_cast<double>(total);
  const double var = std::max(0.0, sum2 / static_cast<double>(total) - mean * mean) *
                     (static_cast<double>(total) / (total - 1.0));
  McEstimate est;
  est.value = area * mean;
  est.std_error = area * std::sqrt(var / static_cast<double>(total));
  est.samples = total;
  return est;
}

McEstimate monte_carlo_mass_in_ball(const LiouvilleSolution& u, double R,
                                    const QuadratureConfig& cfg) {
  const std::int64_t total = cfg.mc_samples;
  if (total < 2) throw BadParameterError("mc_samples must be at least 2");
  if (!(R > 0.0)) throw BadParameterError("ball radius must be positive");
  const int n = u.n();
  const double area = sphere_area(n);
  const DualGauge& g = u.gauge();

  const CounterRng dir(cfg.seed, 201);
  const CounterRng rad(cfg.seed, 202);

  const int blocks = 1024;
  std::vector<double> s1(blocks), s2(blocks);
  const std::int64_t per = total / blocks;
  const std::int64_t extra = total % blocks;
  parallel_blocks(blocks, [&](int b) {
    const std::int64_t lo = b * per + std::min<std::int64_t>(b, extra);
    const std::int64_t hi = lo + per + (b < extra ? 1 : 0);
    std::vector<double> t1, t2;
    t1.reserve(hi - lo);
    t2.reserve(hi - lo);
    for (std::int64_t j = lo; j < hi; ++j) {
      const Vec w = dir.sphere(n, static_cast<std::uint64_t>(j));
      const double v = rad.u01(static_cast<std::uint64_t>(j));
      const double rho = R * std::pow(v, 1.0 / n);
      const double hw = g.reversed(w);
      const double term =
          std::exp(u.value_radial(rho) - n * std::log(hw));
      t1.push_back(term);
      t2.push_back(term * term);
    }
    s1[b] = pairwise_sum(t1);
    s2[b] = pairwise_sum(t2);
  });

  const double scale = area * std::pow(R, n) / n;
  const double sum1 = pairwise_sum(s1);
  const double sum2 = pairwise_sum(s2);
  const double mean = sum1 / static_cast<double>(total);
  const double var = std::max(0.0, sum2 / static_cast<double>(total) - mean * mean) *
                     (static_cast<double>(total) / (total - 1.0));
  McEstimate est;
  est.value = scale * mean;
  est.std_error = scale * std::sqrt(var / static_cast<double>(total));
  est.samples = total;
  return est;
}

QuadResult wulff_interior(const WulffShape& shape,
                          const std::function<double(const Vec&)>& g,
                          const QuadratureConfig& cfg) {
  const int n = shape.dim();
  if (n != 2 && n != 3)
    throw BadParameterError("interior quadrature supports 2D and 3D shapes");
  const Vec& c = shape.center();
  const double r = shape.radius();

  QuadratureConfig inner = cfg;
  inner.rtol = 0.1 * cfg.rtol;

  const int max_level = n == 2 ? 9 : 4;  // angular nodes up to 32768 each
  double prev = 0.0;
  bool have_prev = false;
  QuadResult out;
  for (int level = 0; level <= max_level; ++level) {
    const AngularGrid grid = angular_grid(shape.gauge(), level);
    auto radial = [&](double rho) {
      double s = 0.0;
      for (std::size_t k = 0; k < grid.scaled_dirs.size(); ++k)
        s += grid.weights[k] * g(c + rho * grid.scaled_dirs[k]);
      return std::pow(rho, n - 1.0) * s;
    };
    const QuadResult radial_result = adaptive_finite(radial, 0.0, r, inner);
    const double cur = radial_result.value;
    if (have_prev) {
      const double diff = std::abs(cur - prev);
      out.value = cur;
      out.est_error = diff;
      if (diff <= cfg.rtol * std::max(std::abs(cur), 1e-300)) {
        out.converged = true;
        return out;
      }
    }
    prev = cur;
    have_prev = true;
  }
  out.converged = false;
  return out;
}

}  // namespace fl

namespace fl {

double mass_radial_1d(const LiouvilleSolution& u, const QuadratureConfig& cfg,
                      QuadResult* detail) {
  const int n = u.n();
  // in the log-radial variable the kernel e^{u} rho^{n-1} drho decays
  // exponentially toward both ends, where the direct compactification would
  // leave a fractional endpoint power rho^{-n/(n-1)} in the tail
  auto kernel = [&u, n](double t) {
    return std::exp(u.value_radial(std::exp(t)) + n * t);
  };
  const QuadResult right = radial_improper(kernel, cfg);
  const QuadResult left =
      radial_improper([&kernel](double t) { return kernel(-t); }, cfg);
  QuadResult combined;
  combined.value = right.value + left.value;
  combined.est_error = right.est_error + left.est_error;
  combined.converged = right.converged && left.converged;
  if (detail) *detail = combined;
  return n * u.unit_volume() * combined.value;
}

}  // namespace fl
