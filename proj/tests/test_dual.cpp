#include "fl/dual.hpp"

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace fl;
using namespace flt;

namespace {

// independent oracle: sup over a dense angle grid of <x, w>/H(w)
double brute_dual_2d(const AnisotropyNorm& H, const Vec& x, int grid = 1 << 20) {
  double best = -1e300;
  for (int k = 0; k < grid; ++k) {
    const double th = 2.0 * M_PI * k / grid;
    const Vec w = vec2(std::cos(th), std::sin(th));
    best = std::max(best, x.dot(w) / H.value(w));
  }
  return best;
}

// independent oracle for polygon gauges: the support function over vertices
double vertex_support(const std::vector<Vec>& verts, const Vec& x) {
  double best = -1e300;
  for (const Vec& v : verts) best = std::max(best, x.dot(v));
  return best;
}

}  // namespace

// ============================================================
// closed-form dual values
// ============================================================

TEST_CASE("euclidean dual is the 2-norm again") {
  const auto g = make_gauge("euclidean", 3);
  CHECK(g->value(vec3(3, 4, 12)) == doctest::Approx(13.0).epsilon(1e-14));
  CHECK(g->reversed(vec3(3, 4, 12)) == doctest::Approx(13.0).epsilon(1e-14));
}

TEST_CASE("ellipse dual uses the inverse matrix") {
  const auto g = make_gauge("ellipse", 2);
  CHECK(g->value(vec2(1, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g->value(vec2(0, 1)) == doctest::Approx(1.0).epsilon(1e-14));
  const CounterRng rng(3, 0);
  for (int k = 0; k < 8; ++k) {
    const Vec x = 2.0 * rng.sphere(2, k);
    CHECK(g->value(x) ==
          doctest::Approx(brute_dual_2d(g->base(), x)).epsilon(1e-10));
  }
}

TEST_CASE("p-norm dual is the conjugate-exponent norm") {
  const auto g = make_gauge("pnorm", 2);  // p = 3, dual exponent 3/2
  const auto oracle = [](const Vec& x) {
    return std::pow(std::pow(std::abs(x[0]), 1.5) + std::pow(std::abs(x[1]), 1.5),
                    1.0 / 1.5);
  };
  const CounterRng rng(5, 0);
  for (int k = 0; k < 8; ++k) {
    const Vec x = 1.7 * rng.sphere(2, k);
    CHECK(g->value(x) == doctest::Approx(oracle(x)).epsilon(1e-13));
    CHECK(g->value(x) ==
          doctest::Approx(brute_dual_2d(g->base(), x)).epsilon(1e-10));
  }
}

TEST_CASE("shifted dual closed form against the grid oracle") {
  const auto norm = std::make_shared<const AnisotropyNorm>(
      AnisotropyNorm::shifted(vec2(0.5, 0.0)));
  const DualGauge g(norm);
  CHECK(g.value(vec2(1, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(g.value(vec2(-1, 0)) == doctest::Approx(2.0).epsilon(1e-14));
  const CounterRng rng(8, 0);
  for (int k = 0; k < 8; ++k) {
    const Vec x = 0.8 * rng.sphere(2, k);
    CHECK(g.value(x) == doctest::Approx(brute_dual_2d(*norm, x)).epsilon(1e-10));
  }
}

TEST_CASE("shifted dual unit ball is the translated euclidean ball") {
  // {H0 <= 1} = B1(b), so H0(b + w) = 1 for every unit w
  const auto g = make_gauge("shifted", 3);
  const Vec b = shift_vector(3);
  const CounterRng rng(21, 0);
  for (int k = 0; k < 32; ++k) {
    const Vec w = rng.sphere(3, k);
    CHECK(g->value(b + w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g->reversed(-b + w) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

// ============================================================
// duality identities
// ============================================================

TEST_CASE("dual pairing identities on every closed-form family") {
  const CounterRng rng(31, 0);
  for (const auto& fam : closed_form_families()) {
    for (int n : {2, 3, 4}) {
      const auto g = make_gauge(fam, n);
      const auto& H = g->base();
      for (int k = 0; k < 16; ++k) {
        const Vec x = 2.0 * generic_dir(rng, n, 50 * k + n, 0.05);
        // H0(grad H) = 1 and H(grad H0) = 1
        CHECK(g->value(H.gradient(x)) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(H.value(g->gradient(x)) == doctest::Approx(1.0).epsilon(1e-6));
        // grad H o grad H0 recovers the ray through x
        const Vec back = H.gradient(g->gradient(x));
        CHECK((back - x / g->value(x)).norm() <= 1e-6 * (1.0 + x.norm()));
        // Euler identity for the dual
        CHECK(g->gradient(x).dot(x) ==
              doctest::Approx(g->value(x)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("generalized Cauchy-Schwarz pairing bound") {
  const CounterRng rng(37, 0);
  for (const auto& fam : closed_form_families()) {
    const auto g = make_gauge(fam, 3);
    for (int k = 0; k < 64; ++k) {
      const Vec x = 1.5 * rng.sphere(3, 2 * k);
      const Vec xi = 2.5 * rng.sphere(3, 2 * k + 1);
      CHECK(x.dot(xi) <= g->value(x) * g->base().value(xi) + 1e-12);
    }
  }
}

TEST_CASE("reversed gauge identities") {
  const CounterRng rng(41, 0);
  const auto g = make_gauge("shifted", 3);
  for (int k = 0; k < 16; ++k) {
    const Vec x = rng.sphere(3, k);
    CHECK(g->reversed(x) == doctest::Approx(g->value(-x)).epsilon(1e-14));
    CHECK((g->reversed_gradient(x) + g->gradient(-x)).norm() <= 1e-14);
    // H(-grad reversed) = 1: the outward normal map lands on the unit H-sphere
    CHECK(g->base().value(-g->reversed_gradient(x)) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("dual gradients match finite differences") {
  const CounterRng rng(43, 0);
  for (const auto& fam : closed_form_families()) {
    for (int n : {2, 3}) {
      const auto g = make_gauge(fam, n);
      for (int k = 0; k < 8; ++k) {
        const Vec x = 1.3 * generic_dir(rng, n, 70 * k + n, 0.05);
        const Vec fd = fd_gradient([&](const Vec& z) { return g->value(z); }, x,
                                   1e-6 * x.norm());
        CHECK((g->gradient(x) - fd).norm() <= 1e-6);
      }
    }
  }
}

// ============================================================
// optimizer path against closed forms and the vertex oracle
// ============================================================

TEST_CASE("forced optimizer agrees with closed forms in 2D") {
  const CounterRng rng(47, 0);
  for (const auto& fam : closed_form_families()) {
    const auto norm = make_norm(fam, 2);
    const DualGauge closed(norm);
    const DualGauge opt(norm, DualMode::kOptimized);
    for (int k = 0; k < 12; ++k) {
      const Vec x = 2.0 * rng.sphere(2, k);
      const double a = closed.value(x);
      CHECK(opt.value(x) == doctest::Approx(a).epsilon(1e-10));
    }
  }
}

TEST_CASE("forced optimizer agrees with closed forms in 3D and 4D") {
  const CounterRng rng(53, 0);
  for (const auto& fam : closed_form_families()) {
    for (int n : {3, 4}) {
      const auto norm = make_norm(fam, n);
      const DualGauge closed(norm);
      const DualGauge opt(norm, DualMode::kOptimized);
      for (int k = 0; k < 6; ++k) {
        const Vec x = 1.5 * generic_dir(rng, n, 30 * k + n, 0.02);
        const double a = closed.value(x);
        CHECK(opt.value(x) == doctest::Approx(a).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("polygon dual equals the vertex support function") {
  const auto verts = pentagon();
  const auto norm = std::make_shared<const AnisotropyNorm>(
      AnisotropyNorm::custom_tabulated(verts));
  const DualGauge g(norm);
  CHECK(g.mode() == DualMode::kOptimized);
  const CounterRng rng(59, 0);
  for (int k = 0; k < 24; ++k) {
    const Vec x = 2.0 * rng.sphere(2, k);
    CHECK(g.value(x) == doctest::Approx(vertex_support(verts, x)).epsilon(1e-10));
  }
}

TEST_CASE("optimizer argmax lands on the unit gauge sphere") {
  const auto norm = std::make_shared<const AnisotropyNorm>(
      AnisotropyNorm::custom_tabulated(pentagon()));
  const DualGauge g(norm);
  const CounterRng rng(61, 0);
  for (int k = 0; k < 12; ++k) {
    const Vec x = rng.sphere(2, k);
    const Vec eta = g.support_argmax(x);
    CHECK(norm->value(eta) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(x.dot(eta) == doctest::Approx(g.value(x)).epsilon(1e-9));
  }
}

// ============================================================
// Wulff volumes
// ============================================================

TEST_CASE("unit Wulff volumes match closed-form geometry") {
  // euclidean balls
  CHECK(wulff_unit_volume(*make_gauge("euclidean", 2)) ==
        doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(wulff_unit_volume(*make_gauge("euclidean", 3)) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
  CHECK(wulff_unit_volume(*make_gauge("euclidean", 4)) ==
        doctest::Approx(M_PI * M_PI / 2.0).epsilon(2e-4));
  // ellipse: ball volume scaled by sqrt(det A)
  CHECK(wulff_unit_volume(*make_gauge("ellipse", 2)) ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  CHECK(wulff_unit_volume(*make_gauge("ellipse", 3)) ==
        doctest::Approx(8.0 * M_PI / 3.0).epsilon(1e-10));
  // translation leaves volume unchanged
  CHECK(wulff_unit_volume(*make_gauge("shifted", 2)) ==
        doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(wulff_unit_volume(*make_gauge("shifted", 3)) ==
        doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
  // dual of the 3-norm is the 3/2-norm ball: 2^n Gamma(1+1/q)^n / Gamma(1+n/q)
  const double q = 1.5;
  const double v2 = std::pow(2.0, 2) * std::pow(std::tgamma(1.0 + 1.0 / q), 2) /
                    std::tgamma(1.0 + 2.0 / q);
  CHECK(wulff_unit_volume(*make_gauge("pnorm", 2)) ==
        doctest::Approx(v2).epsilon(1e-8));
  // the fixed 3D product rule resolves the conjugate-norm ball, whose gauge
  // has curvature kinks on the axes, to about 4e-5 relative
  const double v3 = std::pow(2.0, 3) * std::pow(std::tgamma(1.0 + 1.0 / q), 3) /
                    std::tgamma(1.0 + 3.0 / q);
  CHECK(wulff_unit_volume(*make_gauge("pnorm", 3)) ==
        doctest::Approx(v3).epsilon(1e-4));
}

TEST_CASE("Monte Carlo volume cross-check stays within 3 sigma") {
  for (const auto& fam : closed_form_families()) {
    for (int n : {2, 3}) {
      const auto g = make_gauge(fam, n);
      const double vol = wulff_unit_volume(*g);
      const auto mc = wulff_unit_volume_mc(*g, 1 << 21, 914);
      CHECK(std::abs(mc.value - vol) <= 3.0 * mc.std_error + 1e-12 * vol);
    }
  }
}

TEST_CASE("polygon Wulff volume equals the polar polygon area") {
  // Wulff ball of the square gauge (max-norm) is the reflected polar body:
  // the 1-norm cross-polytope, of area 2
  const auto norm = std::make_shared<const AnisotropyNorm>(
      AnisotropyNorm::custom_tabulated(
          {vec2(1, 1), vec2(-1, 1), vec2(-1, -1), vec2(1, -1)}));
  const DualGauge g(norm);
  CHECK(wulff_unit_volume(g) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Wulff shape volume scales like radius^n") {
  const auto g = make_gauge("ellipse", 2);
  const WulffShape s1(g, Vec::Zero(2), 1.0);
  const WulffShape s3(g, vec2(5.0, -2.0), 3.0, s1.unit_volume());
  CHECK(s3.volume() == doctest::Approx(9.0 * s1.volume()).epsilon(1e-13));
  CHECK(s1.contains(vec2(0.0, 0.5)));
  CHECK(!s1.contains(vec2(0.0, 1.5)));
  // asymmetric containment for the shifted family: ball centered at -b
  const auto sh = make_gauge("shifted", 2);
  const WulffShape ball(sh, Vec::Zero(2), 1.0);
  CHECK(ball.contains(vec2(-1.25, 0.0)));   // toward -b the ball extends past 1
  CHECK(!ball.contains(vec2(0.75, 0.0)));   // and is shallower toward +b
}

// ============================================================
// boundary quadrature
// ============================================================

TEST_CASE("boundary quadrature recovers the circle perimeter") {
  const auto g = make_gauge("euclidean", 2);
  const WulffShape s(g, Vec::Zero(2), 1.0);
  const auto r = boundary_quadrature(
      s, [](const Vec&, const Vec&) { return 1.0; }, 1e-10);
  CHECK(r.value == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("divergence identity: integral of <x-c, nu> equals n times volume") {
  const CounterRng rng(67, 0);
  for (const auto& fam : smooth_families()) {
    for (int n : {2, 3}) {
      const auto g = make_gauge(fam, n);
      const Vec c = 0.3 * rng.sphere(n, n);
      const double radius = 1.7;
      const WulffShape s(g, c, radius);
      const auto r = boundary_quadrature(
          s, [&](const Vec& x, const Vec& nu) { return (x - c).dot(nu); }, 1e-9);
      CHECK(r.value == doctest::Approx(n * s.volume()).epsilon(1e-7));
    }
  }
}

TEST_CASE("anisotropic perimeter of the unit Wulff shape is n times volume") {
  for (const auto& fam : closed_form_families()) {
    const auto g = make_gauge(fam, 2);
    const WulffShape s(g, Vec::Zero(2), 1.0);
    CHECK(anisotropic_perimeter(s, 1e-9) ==
          doctest::Approx(2.0 * s.volume()).epsilon(1e-7));
  }
  for (const auto& fam : smooth_families()) {
    const auto g = make_gauge(fam, 3);
    const WulffShape s(g, Vec::Zero(3), 1.0);
    CHECK(anisotropic_perimeter(s, 1e-9) ==
          doctest::Approx(3.0 * s.volume()).epsilon(1e-7));
  }
}

TEST_CASE("boundary normal is the normalized reversed-gauge gradient") {
  const auto g = make_gauge("ellipse", 2);
  const WulffShape s(g, Vec::Zero(2), 2.0);
  // on the boundary of an ellipse-gauge Wulff ball the euclidean normal at x
  // is parallel to A^{-1} x (the level set is a quadric)
  const Vec w = vec2(std::cos(0.7), std::sin(0.7));
  const Vec x = s.boundary_point(w);
  const Vec nu = g->reversed_gradient(x).normalized();
  const Vec expected = (stretched_diag(2).inverse() * x).normalized();
  CHECK((nu - expected).norm() <= 1e-12);
}

// ============================================================
// guards
// ============================================================

TEST_CASE("dual guards") {
  const auto g = make_gauge("euclidean", 2);
  CHECK_THROWS_AS(g->value(vec2(0, 0)), ZeroVectorError);
  const auto poly = std::make_shared<const AnisotropyNorm>(
      AnisotropyNorm::custom_tabulated(pentagon()));
  CHECK_THROWS_AS(DualGauge(poly, DualMode::kClosedForm), BadParameterError);
  CHECK_THROWS_AS(WulffShape(g, Vec::Zero(2), -1.0), BadParameterError);
  CHECK_THROWS_AS(WulffShape(g, Vec::Zero(3), 1.0), BadParameterError);
  const auto g4 = make_gauge("euclidean", 4);
  const WulffShape s4(g4, Vec::Zero(4), 1.0);
  CHECK_THROWS_AS(boundary_quadrature(
                      s4, [](const Vec&, const Vec&) { return 1.0; }, 1e-8),
                  BadParameterError);
}
