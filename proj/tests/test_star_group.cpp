#include <cmath>
#include <random>

#include "doctest.h"
#include "algpois/star_group.hpp"
#include "test_util.hpp"

using namespace algpois;

namespace {

// x(s) = sum_k (c_k + a_k sin(s) + b_k cos(2 s)) v_k
Section trig_section(const LieAlgebra& alg, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(alg.r), sa(alg.r), cb(alg.r);
  for (int k = 0; k < alg.r; ++k) c[k] = u(rng), sa[k] = u(rng), cb[k] = u(rng);
  const int r = alg.r;
  return {SmoothMap(1, r,
                    [c, sa, cb, r](auto s, auto out) {
                      for (int k = 0; k < r; ++k) out[k] = c[k] + sa[k] * sin(s[0]) + cb[k] * cos(2.0 * s[0]);
                    }),
          alg.name};
}

}  // namespace

TEST_CASE("star product: unit and constant sections") {
  auto a = catalog_action("sl2-projective");
  std::mt19937_64 rng(1);
  auto pts = sample_points(a, 30, 2);
  auto g = exp_section(a, trig_section(a.alg, rng, 0.3), 1.0);
  CHECK(unit_residual(a, g, pts) == 0.0);
  Eigen::MatrixXd g0 = random_sl2(rng, 0.2), h0 = random_sl2(rng, 0.2);
  auto gh = star_product(a, constant_group_section(g0), constant_group_section(h0));
  for (const auto& s : pts) CHECK(max_abs(gh(s) - g0 * h0) == 0.0);
}

TEST_CASE("star product: associativity and action property") {
  for (const char* name : {"sl2-projective", "sl2-projective-right", "sl2-circle"}) {
    auto a = catalog_action(name);
    std::mt19937_64 rng(3);
    auto pts = sample_points(a, 30, 4, 0.2);
    auto g = exp_section(a, trig_section(a.alg, rng, 0.2), 1.0);
    auto h = exp_section(a, trig_section(a.alg, rng, 0.2), 1.0);
    auto f = exp_section(a, trig_section(a.alg, rng, 0.2), 1.0);
    CAPTURE(name);
    CHECK(associativity_residual(a, g, h, f, pts) < 1e-10);
    CHECK(action_property_residual(a, g, h, pts) < 1e-10);
  }
  auto so3 = catalog_action("so3-linear");
  std::mt19937_64 rng(8);
  auto x = random_polynomial_section(so3.alg, 3, 2, rng, 0.2);
  auto y = random_polynomial_section(so3.alg, 3, 2, rng, 0.2);
  auto pts = sample_points(so3, 20, 6);
  auto g = exp_section(so3, x, 1.0), h = exp_section(so3, y, 1.0);
  CHECK(associativity_residual(so3, g, h, g, pts) < 1e-10);
  CHECK(action_property_residual(so3, g, h, pts) < 1e-10);
}

TEST_CASE("star inverse") {
  auto a = catalog_action("sl2-projective");
  auto pts = sample_points(a, 30, 5, 0.2);
  auto e = unit_section(a);
  auto ei = star_inverse(a, e);
  for (const auto& s : pts) CHECK(max_abs(ei(s) - Eigen::MatrixXd::Identity(2, 2)) == 0.0);

  std::mt19937_64 rng(7);
  Eigen::MatrixXd g0 = random_sl2(rng, 0.05);
  auto ci = star_inverse(a, constant_group_section(g0));
  for (const auto& s : pts) CHECK(max_abs(ci(s) - g0.inverse()) < 1e-12);

  for (const char* name : {"sl2-projective", "sl2-projective-right", "sl2-tangent", "se2-linear"}) {
    auto b = catalog_action(name);
    auto ps = sample_points(b, 30, 9, 0.2);
    Section x = random_polynomial_section(b.alg, b.p, 2, rng, 0.01);
    auto g = exp_section(b, x, 1.0);
    require_near_unit(b, g, ps);
    CAPTURE(name);
    CHECK(inverse_residual(b, g, ps) < 1e-9);
  }

  // far from the unit: the projective point is pushed out of its chart
  auto big = exp_section(a, constant_section(a.alg, 1, {0.0, 0.0, 40.0}), 1.0);
  std::vector<double> s{0.9};
  CHECK_THROWS_AS(star_inverse(a, big)(s), Error);
  CHECK_THROWS_AS(require_near_unit(a, big, pts), Error);
}

TEST_CASE("conjugation bracket: trivial action is the commutator") {
  auto a = catalog_action("sl2-trivial");
  auto x = constant_section(a.alg, 1, {0.3, -0.5, 0.8});
  auto y = polynomial_section(a.alg, 1, {{{1, {1}}}, {{0.5, {0}}}, {{-1, {2}}}});
  std::vector<double> s{0.4};
  auto c = bracket_from_conjugation(a, x, y, s, 1e-3);
  Eigen::MatrixXd X = x.value(a.alg, s), Y = y.value(a.alg, s);
  Eigen::VectorXd want = a.alg.coordinates(X * Y - Y * X);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k] - want(k)) < 1e-6);
}

TEST_CASE("conjugation bracket: translations") {
  auto a = catalog_action("translation-1");
  // x = t^2, y = sin t
  Section x = polynomial_section(a.alg, 1, {{{1, {2}}}});
  Section y{SmoothMap(1, 1, [](auto t, auto out) { out[0] = sin(t[0]); }), a.alg.name};
  for (double t : {-1.0, 0.3, 1.2}) {
    std::vector<double> s{t};
    double want = -(t * t * std::cos(t) - std::sin(t) * 2 * t);
    CHECK(std::abs(bracket_from_conjugation(a, x, y, s, 1e-3, false)[0] - want) < 5e-4);
  }
}

TEST_CASE("conjugation bracket matches minus the second bracket") {
  for (const char* name : {"sl2-projective", "sl2-projective-right", "sl2-tangent"}) {
    auto a = catalog_action(name);
    std::mt19937_64 rng(13);
    auto x = random_polynomial_section(a.alg, a.p, 2, rng, 0.5);
    auto y = random_polynomial_section(a.alg, a.p, 2, rng, 0.5);
    auto pts = sample_points(a, 20, 17, 0.2);
    CAPTURE(name);
    CHECK(conjugation_bracket_error(a, x, y, pts, 1e-3, true) < 1e-3);
    double e1 = conjugation_bracket_error(a, x, y, pts, 4e-3, false);
    double e2 = conjugation_bracket_error(a, x, y, pts, 2e-3, false);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
  }
  auto a = catalog_action("sl2-projective");
  auto x = constant_section(a.alg, 1, {1, 0, 0});
  std::vector<double> s{0.1};
  CHECK_THROWS_AS(bracket_from_conjugation(a, x, x, s, 0.1), Error);
}
