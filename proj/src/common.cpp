#include "fl/common.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace fl {

double softplus(double z) {
  if (z > 36.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ (stream * 0xd6e8feb86659fd93ULL))) {}

double CounterRng::u01(std::uint64_t ctr) const {
  const std::uint64_t r = mix64(key_ ^ (ctr * 0xda942042e4dd58b5ULL));
  return static_cast<double>(r >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::gauss(std::uint64_t ctr) const {
  const double u1 = u01(2 * ctr);
  const double u2 = u01(2 * ctr + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec CounterRng::sphere(int n, std::uint64_t idx) const {
  Vec v(n);
  for (int j = 0; j < n; ++j) v[j] = gauss(idx * n + j);
  const double r = v.norm();
  if (r < 1e-8) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / r;
}

std::vector<Vec> sphere_grid(int n, int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * M_PI * (k + 0.5) / count;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      pts.push_back(v);
    }
  } else if (n == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = golden * k;
      Vec v(3);
      v << r * std::cos(ph), r * std::sin(ph), z;
      pts.push_back(v);
    }
  } else {
    const CounterRng rng(0x5f3e8a1c9b2d6e47ULL, 0);
    for (int k = 0; k < count; ++k) pts.push_back(rng.sphere(n, k));
  }
  return pts;
}

namespace {

double normal_quantile(double u) {
  return M_SQRT2 * boost::math::erf_inv(2.0 * u - 1.0);
}

}  // namespace

std::vector<Vec> sphere_qmc(int n, std::size_t count) {
  static const int primes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                 23, 29, 31, 37, 41, 43, 47, 53};
  if (n > 16) throw BadParameterError("sphere_qmc: dimension above 16");
  std::vector<double> alpha(n);
  for (int j = 0; j < n; ++j) {
    double a = std::sqrt(static_cast<double>(primes[j]));
    alpha[j] = a - std::floor(a);
  }
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vec v(n);
    for (int j = 0; j < n; ++j) {
      double u = 0.5 + (k + 1.0) * alpha[j];
      u -= std::floor(u);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      v[j] = normal_quantile(u);
    }
    const double r = v.norm();
    v = (r < 1e-8) ? Vec::Unit(n, 0) : Vec(v / r);
    pts.push_back(v);
  }
  return pts;
}

int thread_count() {
  if (const char* env = std::getenv("FL_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_blocks(int blocks, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), blocks);
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

void gauss_legendre(int k, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (k < 1) throw BadParameterError("gauss_legendre needs at least one node");
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  {
    const std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find(k);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  // Newton on P_k from the Tricomi guess; each root lands in a few steps
  nodes.assign(k, 0.0);
  weights.assign(k, 0.0);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (k + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 60; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < k; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      dp = k * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(x))) break;
    }
    nodes[i] = -x;
    nodes[k - 1 - i] = x;
    weights[i] = weights[k - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  const std::lock_guard<std::mutex> lock(mu);
  cache.emplace(k, std::make_pair(nodes, weights));
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw RootFindError("brent_root: no sign change on bracket");
  std::uintmax_t iters = 200;
  auto stop = [xtol](double lo, double hi) { return std::abs(hi - lo) <= xtol; };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace fl
