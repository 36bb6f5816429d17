#include "fl/identities.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "helpers.hpp"

using namespace fl;
using namespace flt;

namespace {

QuadratureConfig fast_cfg() {
  QuadratureConfig cfg;
  cfg.mc_samples = 200000;
  return cfg;
}

LiouvilleSolution make_solution(const std::string& family, int n,
                                double lambda = 1.2) {
  Vec c = Vec::Zero(n);
  c[0] = 0.2;
  return LiouvilleSolution(n, lambda, c, make_gauge(family, n));
}

}  // namespace

// ============================================================
// the anchor registry
// ============================================================

TEST_CASE("anchor registry holds 22 distinct identifiers") {
  const auto& anchors = known_anchors();
  CHECK(anchors.size() == 22);
  CHECK(std::set<std::string>(anchors.begin(), anchors.end()).size() ==
        anchors.size());
  for (const auto& id : anchors) CHECK(is_known_anchor(id));
  CHECK(!is_known_anchor("made-up-anchor"));
  CHECK(!is_known_anchor(""));
}

// ============================================================
// mass checks
// ============================================================

TEST_CASE("mass quantization and the lower bound hold across families") {
  const auto cfg = fast_cfg();
  for (const auto& family : closed_form_families()) {
    for (const int n : {2, 3}) {
      const auto u = make_solution(family, n);
      const auto q = verify_mass_quantization(u, cfg);
      CHECK(q.passed);
      REQUIRE(q.computed.size() == 2);
      CHECK(q.computed[0] ==
            doctest::Approx(u.quantized_mass()).epsilon(1e-7));
      CHECK(verify_mass_lower_bound(u, cfg).passed);
    }
  }
}

TEST_CASE("gamma0 comes back from the quadrature mass") {
  for (const int n : {2, 3, 4}) {
    const auto c = verify_gamma0_recovery(make_solution("ellipse", n),
                                          fast_cfg());
    CHECK(c.passed);
    REQUIRE(c.target.size() == 1);
    CHECK(c.target[0] ==
          doctest::Approx(n * n / (n - 1.0)).epsilon(1e-14));
  }
}

// ============================================================
// flux balances
// ============================================================

TEST_CASE("divergence balance holds on wulff balls") {
  const auto cfg = fast_cfg();
  const auto u = make_solution("shifted", 2);
  CHECK(verify_flux_balance(u, 0.5, cfg).passed);
  CHECK(verify_flux_balance(u, 5.0, cfg).passed);
  CHECK_THROWS_AS(verify_flux_balance(u, 0.01, cfg), BadParameterError);
  CHECK_THROWS_AS(verify_flux_balance(u, 2e3, cfg), BadParameterError);
}

TEST_CASE("the far boundary flux carries the whole quantized mass") {
  CHECK(verify_flux_tail(make_solution("ellipse", 2), fast_cfg()).passed);
}

// ============================================================
// the domain-scaling identity
// ============================================================

TEST_CASE("manufactured quadratic fields balance for p away from n") {
  // u = |x|^2/2 on the euclidean gauge: flux = |x|^{p-2} x, so the source
  // consistent with -div flux = f is -(n + p - 2) |x|^{p-2}
  const auto cfg = fast_cfg();
  for (const int n : {2, 3}) {
    for (const double p : {2.0, 2.5}) {
      PohozaevFields fields;
      fields.grad_u = [](const Vec& x) { return Vec(x); };
      fields.source = [n, p](const Vec& x) {
        return -(n + p - 2.0) * std::pow(x.norm(), p - 2.0);
      };
      const WulffShape ball(make_gauge("euclidean", n), Vec::Zero(n), 1.0);
      for (const double yshift : {0.0, 0.2}) {
        Vec y = Vec::Zero(n);
        y[0] = yshift;
        const auto c = verify_pohozaev(make_norm("euclidean", n), p, fields,
                                       ball, y, cfg, 1e-8,
                                       "pohozaev-quadratic");
        CHECK(c.passed);
      }
    }
  }
}

TEST_CASE("linear fields reduce the identity to its closed form") {
  const auto cfg = fast_cfg();
  for (const auto& family : closed_form_families()) {
    const WulffShape ball(make_gauge(family, 2), vec2(0.1, -0.2), 0.8);
    const auto c = verify_pohozaev_linear(make_norm(family, 2), 3.0,
                                          vec2(0.8, 0.6), ball, cfg);
    CHECK(c.passed);
    CHECK(c.rel_err <= 1e-10);
  }
  CHECK_THROWS_AS(
      verify_pohozaev_linear(nullptr, 3.0, vec2(1, 0),
                             WulffShape(make_gauge("euclidean", 2),
                                        Vec::Zero(2), 1.0),
                             cfg),
      BadParameterError);
}

TEST_CASE("superlevel mass splits into volume and gradient energy") {
  // closed forms only, so the axis-sensitive family works in any dimension
  for (const auto& family : closed_form_families()) {
    for (const int n : {2, 3, 4}) {
      const auto u = make_solution(family, n);
      CHECK(verify_pohozaev_wulff_split(u, {u.t0() - 0.5, u.t0() - 3.0})
                .passed);
    }
  }
  const auto u = make_solution("euclidean", 2);
  CHECK_THROWS_AS(verify_pohozaev_wulff_split(u, {}), BadParameterError);
  CHECK_THROWS_AS(verify_pohozaev_wulff_split(u, {u.t0()}),
                  BadParameterError);
}

TEST_CASE("coarea derivatives converge at second order in the step") {
  const auto cfg = fast_cfg();
  const auto u = make_solution("ellipse", 2);
  const auto coarse = verify_coarea(u, u.t0() - 1.0, 1e-3, cfg);
  const auto fine = verify_coarea(u, u.t0() - 1.0, 5e-4, cfg);
  CHECK(coarse.passed);
  CHECK(fine.passed);
  CHECK(coarse.rel_err / fine.rel_err >= 3.5);
  CHECK(coarse.rel_err / fine.rel_err <= 4.5);
  CHECK_THROWS_AS(verify_coarea(u, u.t0() - 1.0, 0.0, cfg),
                  BadParameterError);
  CHECK_THROWS_AS(verify_coarea(u, u.t0() - 1.0, 2e-3, cfg),
                  BadParameterError);
  CHECK_THROWS_AS(verify_coarea(u, u.t0(), 1e-3, cfg), BadParameterError);
}

// ============================================================
// asymptotics
// ============================================================

TEST_CASE("asymptotic curves back both far-field checks") {
  const auto u = make_solution("shifted", 2);
  const std::vector<double> radii = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5};
  const auto curves = asymptotic_curves(u, radii, 32);
  CHECK(curves.radius == radii);
  REQUIRE(curves.profile_sup.size() == radii.size());
  REQUIRE(curves.gradient_sup.size() == radii.size());
  for (std::size_t j = 0; j + 1 < radii.size(); ++j)
    CHECK(curves.gradient_sup[j + 1] <= curves.gradient_sup[j]);
  CHECK(verify_asymptotic_profile(u, radii, 32).passed);
  CHECK(verify_asymptotic_gradient(u, {1e0, 1e1, 1e2, 1e3}, 32).passed);

  CHECK_THROWS_AS(asymptotic_curves(u, {}, 32), BadParameterError);
  CHECK_THROWS_AS(asymptotic_curves(u, radii, 0), BadParameterError);
  CHECK_THROWS_AS(verify_asymptotic_profile(u, {1e0, 1e1}, 8),
                  BadParameterError);
  CHECK_THROWS_AS(verify_asymptotic_profile(u, {1e0, 1e2, 1e1, 1e3}, 8),
                  BadParameterError);
  CHECK_THROWS_AS(verify_asymptotic_gradient(u, {1e1}, 8),
                  BadParameterError);
}

TEST_CASE("the far field never breaks the near-field envelope") {
  CHECK(verify_upper_envelope(make_solution("euclidean", 2), 32).passed);
  CHECK(verify_upper_envelope(make_solution("pnorm", 3), 32).passed);
}

// ============================================================
// rigidity
// ============================================================

TEST_CASE("level sets are wulff spheres with constant gradient gauge") {
  for (const auto& family : closed_form_families()) {
    const auto u = make_solution(family, 2, 0.7);
    CHECK(verify_level_rigidity(u, {u.t0() - 1.0, u.t0() - 6.0}).passed);
  }
  const auto u = make_solution("euclidean", 2);
  CHECK_THROWS_AS(verify_level_rigidity(u, {}), BadParameterError);
  CHECK_THROWS_AS(verify_level_rigidity(u, {u.t0() + 1.0}),
                  BadParameterError);
}

TEST_CASE("the rigidity detector fires on a perturbed field") {
  const auto u = make_solution("euclidean", 2);
  const auto c = verify_rigidity_negative_control(u, 0.01);
  CHECK(c.passed);  // passed records that the detector fired
  REQUIRE(c.computed.size() == 1);
  CHECK(c.computed[0] == 1.0);
  CHECK_THROWS_AS(verify_rigidity_negative_control(u, 0.0),
                  BadParameterError);
}

TEST_CASE("scale and peak height determine each other") {
  for (const double lambda : {0.5, 1.0, 2.0}) {
    const auto c = verify_lambda_roundtrip(make_solution("shifted", 2, lambda));
    CHECK(c.passed);
    CHECK(c.rel_err <= 1e-12);
  }
}

TEST_CASE("the superlevel mass closed form matches radial quadrature") {
  for (const auto& family : closed_form_families()) {
    for (const int n : {2, 4}) {
      const auto u = make_solution(family, n);
      CHECK(verify_level_mass_profile(u, u.t0() - 2.0, fast_cfg()).passed);
    }
  }
  const auto u = make_solution("euclidean", 2);
  CHECK_THROWS_AS(verify_level_mass_profile(u, u.t0(), fast_cfg()),
                  BadParameterError);
}

// ============================================================
// isoperimetry and geometry
// ============================================================

TEST_CASE("random convex polygons sit above the isoperimetric bound") {
  for (const std::string family : {"euclidean", "pnorm"}) {
    CHECK(verify_isoperimetric_polygons(make_norm(family, 2), 10, 0x5eedf1)
              .passed);
  }
  CHECK_THROWS_AS(verify_isoperimetric_polygons(make_norm("euclidean", 3), 5, 1),
                  BadParameterError);
  CHECK_THROWS_AS(verify_isoperimetric_polygons(make_norm("euclidean", 2), 0, 1),
                  BadParameterError);
}

TEST_CASE("wulff shapes achieve equality and the square pays 2/sqrt(pi)") {
  for (const auto& family : smooth_families())
    CHECK(verify_isoperimetric_wulff(make_norm(family, 2), fast_cfg()).passed);
  const auto sq = verify_isoperimetric_square();
  CHECK(sq.passed);
  REQUIRE(sq.computed.size() == 1);
  CHECK(sq.computed[0] ==
        doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-9));
}

TEST_CASE("dual pairings close at unit value") {
  for (const auto& family : closed_form_families())
    for (const int n : {2, 3})
      CHECK(verify_duality_pairing(make_norm(family, n), 200, 7).passed);
}

TEST_CASE("closed-form duals match the brute-force support scan") {
  for (const auto& family : closed_form_families()) {
    const auto c = verify_dual_support_scan(make_norm(family, 2), 6, 3);
    CHECK(c.passed);
    CHECK(c.rel_err <= 1e-8);
  }
  CHECK_THROWS_AS(verify_dual_support_scan(make_norm("euclidean", 3), 6, 3),
                  BadParameterError);
}

TEST_CASE("rule volumes agree with rejection sampling") {
  for (const auto& family : closed_form_families())
    CHECK(verify_wulff_volume(make_norm(family, 2), fast_cfg()).passed);
}

TEST_CASE("the unit shape's anisotropic perimeter is n times its volume") {
  for (const auto& family : smooth_families())
    for (const int n : {2, 3})
      CHECK(verify_perimeter_volume(make_norm(family, n), fast_cfg()).passed);
}

TEST_CASE("the cubic pnorm gauge fails uniform ellipticity honestly") {
  CHECK(!verify_uniform_ellipticity(make_norm("pnorm", 2)).passed);
  for (const auto& family : smooth_families())
    CHECK(verify_uniform_ellipticity(make_norm(family, 2)).passed);
}

// ============================================================
// residuals
// ============================================================

TEST_CASE("sampled residuals meet the richardson budget at second order") {
  const auto u = make_solution("ellipse", 2);
  CHECK(verify_pde_residual(u, 40, 11).passed);
  const auto order = verify_pde_residual_order(u, 40, 11);
  CHECK(order.passed);
  REQUIRE(order.computed.size() == 1);
  CHECK(order.computed[0] == doctest::Approx(2.0).epsilon(0.1));
}

// ============================================================
// suite assembly
// ============================================================

TEST_CASE("the full suite assembles a sorted passing report") {
  SuiteRequest req;
  req.norm = make_norm("shifted", 2);
  req.lambda = 1.3;
  req.quad.mc_samples = 100000;
  const auto report = run_suites(req);
  CHECK(report.checks.size() == 27);
  CHECK(report.all_passed());
  CHECK(std::is_sorted(report.checks.begin(), report.checks.end(),
                       [](const CheckResult& a, const CheckResult& b) {
                         return a.name < b.name;
                       }));
  for (const auto& c : report.checks) {
    CHECK(is_known_anchor(c.anchor));
    CHECK(c.computed.size() == c.target.size());
    CHECK(c.tolerance > 0.0);
  }
  CHECK(report.norm_spec == "shifted dim=2");
}

TEST_CASE("suite selection honors names and rejects unknown ones") {
  SuiteRequest req;
  req.norm = make_norm("euclidean", 2);
  req.quad.mc_samples = 50000;
  req.suites = {"rigidity"};
  CHECK(run_suites(req).checks.size() == 4);
  req.suites = {"bogus"};
  CHECK_THROWS_AS(run_suites(req), BadParameterError);
  req.suites = {};
  req.n = 3;
  CHECK_THROWS_AS(run_suites(req), BadParameterError);
  req.n = 2;
  req.norm.reset();
  CHECK_THROWS_AS(run_suites(req), BadParameterError);
}

TEST_CASE("identical requests give identical results, threads or not") {
  SuiteRequest req;
  req.norm = make_norm("ellipse", 2);
  req.quad.mc_samples = 100000;
  const auto a = run_suites(req);
  setenv("FL_THREADS", "3", 1);
  const auto b = run_suites(req);
  unsetenv("FL_THREADS");
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].name == b.checks[i].name);
    CHECK(a.checks[i].computed == b.checks[i].computed);
    CHECK(a.checks[i].rel_err == b.checks[i].rel_err);
  }
  setenv("FL_THREADS", "zero", 1);
  CHECK_THROWS_AS(run_suites(req), BadParameterError);
  unsetenv("FL_THREADS");
}

TEST_CASE("a caller-chosen pivot feeds the offset identity") {
  SuiteRequest req;
  req.norm = make_norm("ellipse", 2);
  req.suites = {"pohozaev"};
  req.quad.mc_samples = 50000;
  req.pohozaev_y = vec2(0.4, 0.2);
  CHECK(run_suites(req).all_passed());
  req.pohozaev_y = Vec::Zero(3);
  CHECK_THROWS_AS(run_suites(req), BadParameterError);
}
