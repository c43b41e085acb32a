#include <cmath>
#include <random>

#include "doctest.h"
#include "algpois/algebroid.hpp"
#include "test_util.hpp"

using namespace algpois;

namespace {

double max_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0;
  for (size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

// x(u) = (u, 1 + u^2, -u), y(u) = (u^2, u, 2) with hand-written derivatives.
Section hand_x(const LieAlgebra& alg) {
  return polynomial_section(alg, 1, {{{1, {1}}}, {{1, {0}}, {1, {2}}}, {{-1, {1}}}});
}
Section hand_y(const LieAlgebra& alg) {
  return polynomial_section(alg, 1, {{{1, {2}}}, {{1, {1}}}, {{2, {0}}}});
}

}  // namespace

TEST_CASE("pointwise bracket") {
  auto sl2 = catalog_algebra("sl2");
  auto vb = constant_section(sl2, 1, {0, 1, 0});
  auto vc = constant_section(sl2, 1, {0, 0, 1});
  std::vector<double> u{0.4};
  CHECK(max_vec(pointwise_bracket(sl2, vb, vc).coeffs(u), {1, 0, 0}) == 0.0);
  CHECK(max_vec(pointwise_bracket(sl2, vb, vb).coeffs(u), {0, 0, 0}) == 0.0);

  std::mt19937_64 rng(1);
  auto so3 = catalog_algebra("so3");
  auto x = random_polynomial_section(so3, 3, 2, rng), y = random_polynomial_section(so3, 3, 2, rng);
  auto br = pointwise_bracket(so3, x, y);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> z{d(rng), d(rng), d(rng)};
    Eigen::MatrixXd X = x.value(so3, z), Y = y.value(so3, z);
    CHECK(max_abs(br.value(so3, z) - (X * Y - Y * X)) < 1e-13);
  }
  auto se2 = catalog_algebra("se2");
  CHECK_THROWS_AS(pointwise_bracket(sl2, vb, constant_section(se2, 1, {0, 1, 0})), Error);
}

TEST_CASE("anchor") {
  auto proj = catalog_action("sl2-projective");
  auto x = constant_section(proj.alg, 1, {0.3, -0.7, 1.1});
  auto rho = anchor(proj, x);
  for (double u : {-1.0, 0.0, 0.6}) {
    std::vector<double> z{u};
    CHECK(rho(z)[0] == doctest::Approx(2 * u * 0.3 - 0.7 - u * u * 1.1));
  }
  auto triv = catalog_action("sl2-trivial");
  std::vector<double> z0{0.5};
  CHECK(anchor(triv, x)(z0)[0] == 0.0);
  auto se2 = catalog_action("se2-linear");
  std::vector<double> xy{0.3, 0.9};
  CHECK(max_vec(anchor(se2, constant_section(se2.alg, 2, {1, 0, 0}))(xy), {-0.9, 0.3}) < 1e-15);
}

TEST_CASE("Lie derivative of sections") {
  auto proj = catalog_action("sl2-projective");
  std::mt19937_64 rng(2);
  auto x = random_polynomial_section(proj.alg, 1, 3, rng);
  auto yc = constant_section(proj.alg, 1, {1, 2, 3});
  std::vector<double> u{0.25};
  CHECK(max_vec(lie_derivative_section(proj, x, yc).coeffs(u), {0, 0, 0}) == 0.0);

  auto tr = catalog_action("translation-1");
  // x = 1 + t^2, y = t^3 ; L_{rho x} y = x y_t
  auto xs = polynomial_section(tr.alg, 1, {{{1, {0}}, {1, {2}}}});
  auto ys = polynomial_section(tr.alg, 1, {{{1, {3}}}});
  for (double t : {-0.5, 0.7}) {
    std::vector<double> z{t};
    CHECK(lie_derivative_section(tr, xs, ys).coeffs(z)[0] == doctest::Approx((1 + t * t) * 3 * t * t));
  }

  // finite-difference oracle
  auto y = random_polynomial_section(proj.alg, 1, 3, rng);
  auto rho = anchor(proj, x);
  auto L = lie_derivative_section(proj, x, y);
  for (double t : {-0.8, 0.1, 0.9}) {
    std::vector<double> z{t};
    double dir = rho(z)[0];
    auto errs = [&](double h) {
      std::vector<double> zp{t + h * dir}, zm{t - h * dir};
      auto yp = y.coeffs(zp), ym = y.coeffs(zm), l = L.coeffs(z);
      double w = 0.0;
      for (int k = 0; k < 3; ++k) w = std::max(w, std::abs((yp[k] - ym[k]) / (2 * h) - l[k]));
      return w;
    };
    double e1 = errs(1e-3), e2 = errs(5e-4);
    CHECK(e1 < 1e-5);
    if (e1 > 1e-11) CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("second bracket examples") {
  std::mt19937_64 rng(3);
  auto triv = catalog_action("sl2-trivial");
  auto x = random_polynomial_section(triv.alg, 1, 2, rng), y = random_polynomial_section(triv.alg, 1, 2, rng);
  auto b = second_bracket(triv, x, y), pw = pointwise_bracket(triv.alg, x, y);
  for (double t : {-1.0, 0.5}) {
    std::vector<double> z{t};
    auto bv = b.coeffs(z), pv = pw.coeffs(z);
    for (int k = 0; k < 3; ++k) CHECK(bv[k] == doctest::Approx(-pv[k]));
  }

  auto tr = catalog_action("translation-1");
  auto xs = polynomial_section(tr.alg, 1, {{{2, {1}}, {1, {2}}}});  // 2t + t^2
  auto ys = polynomial_section(tr.alg, 1, {{{1, {0}}, {-1, {3}}}});  // 1 - t^3
  for (double t : {-0.3, 1.2}) {
    std::vector<double> z{t};
    double xv = 2 * t + t * t, xt = 2 + 2 * t, yv = 1 - t * t * t, yt = -3 * t * t;
    CHECK(second_bracket(tr, xs, ys).coeffs(z)[0] == doctest::Approx(xv * yt - yv * xt));
  }

  // Projective action: matrix form assembled term by term.
  auto proj = catalog_action("sl2-projective");
  auto hx = hand_x(proj.alg), hy = hand_y(proj.alg);
  auto bb = second_bracket(proj, hx, hy);
  for (double u : {-0.9, 0.2, 1.4}) {
    std::vector<double> z{u};
    double x1 = u, x2 = 1 + u * u, x3 = -u, y1 = u * u, y2 = u, y3 = 2;
    Eigen::MatrixXd X = mat(2, 2, {x1, x2, x3, -x1}), Y = mat(2, 2, {y1, y2, y3, -y1});
    Eigen::MatrixXd Xu = mat(2, 2, {1, 2 * u, -1, -1}), Yu = mat(2, 2, {2 * u, 1, 0, -2 * u});
    double rx = 2 * u * x1 + x2 - u * u * x3, ry = 2 * u * y1 + y2 - u * u * y3;
    Eigen::MatrixXd oracle = rx * Yu - ry * Xu - X * Y + Y * X;
    CHECK(max_abs(bb.value(proj.alg, z) - oracle) < 1e-13);
  }
}

TEST_CASE("Leibniz rule") {
  std::mt19937_64 rng(5);
  for (auto name : {"sl2-projective", "se2-linear", "so3-linear", "sl2-projective-right", "sl2-tangent"}) {
    CAPTURE(name);
    auto a = catalog_action(name);
    auto pts = sample_points(a, 20, 17);
    auto x = random_polynomial_section(a.alg, a.p, 2, rng), y = random_polynomial_section(a.alg, a.p, 2, rng);
    CHECK(leibniz_residual(a, x, y, constant_map(a.p, {1.0}), pts) == 0.0);
    CHECK(leibniz_residual(a, x, y, constant_map(a.p, {2.5}), pts) < 1e-12);
    CHECK(leibniz_residual(a, x, y, coordinate(a.p, 0), pts) < 1e-8);
  }
}

TEST_CASE("anchor is a homomorphism; Jacobi for the second bracket") {
  std::mt19937_64 rng(6);
  auto triv = catalog_action("sl2-trivial");
  auto pts1 = sample_points(triv, 10, 1);
  auto tx = random_polynomial_section(triv.alg, 1, 2, rng), ty = random_polynomial_section(triv.alg, 1, 2, rng);
  CHECK(anchor_homomorphism_residual(triv, tx, ty, pts1) == 0.0);

  auto se2 = catalog_action("se2-linear");
  auto c1 = constant_section(se2.alg, 2, {0.4, -1, 2}), c2 = constant_section(se2.alg, 2, {1.5, 0.3, -0.2});
  CHECK(anchor_homomorphism_residual(se2, c1, c2, sample_points(se2, 20, 2)) < 1e-10);

  for (auto name : {"sl2-projective", "sl2-projective-right", "sl2-tangent", "so3-linear", "sl2-circle"}) {
    CAPTURE(name);
    auto a = catalog_action(name);
    auto pts = sample_points(a, 20, 3);
    auto x = random_polynomial_section(a.alg, a.p, 2, rng), y = random_polynomial_section(a.alg, a.p, 2, rng),
         z = random_polynomial_section(a.alg, a.p, 2, rng);
    CHECK(anchor_homomorphism_residual(a, x, y, pts) < 1e-8);
    CHECK(jacobi_residual_sections(a, x, y, z, pts) < 1e-7);
    CHECK(antisymmetry_residual(a, x, y, pts) < 1e-12);
  }

  auto tr = catalog_action("translation-1");
  auto ptr = sample_points(tr, 20, 4);
  auto x = random_polynomial_section(tr.alg, 1, 3, rng), y = random_polynomial_section(tr.alg, 1, 3, rng),
       z = random_polynomial_section(tr.alg, 1, 3, rng);
  CHECK(jacobi_residual_sections(tr, x, y, z, ptr) < 1e-10);
  CHECK(jacobi_residual_sections(triv, tx, ty, random_polynomial_section(triv.alg, 1, 2, rng), pts1) < 1e-12);
}
