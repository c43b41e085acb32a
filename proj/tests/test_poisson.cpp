#include <cmath>
#include <random>

#include "doctest.h"
#include "algpois/poisson.hpp"
#include "test_util.hpp"

using namespace algpois;

namespace {

SmoothMap quadratic(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return u(rng); });
  Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(d, [&] { return u(rng); });
  return SmoothMap(d, 1, [A, b, d](auto x, auto out) {
    using S = typename decltype(out)::value_type;
    S s(0.0);
    for (int i = 0; i < d; ++i) {
      s += b(i) * x[i] * x[i] * x[i];
      for (int j = 0; j < d; ++j) s += A(i, j) * x[i] * x[j];
    }
    out[0] = s;
  });
}

}  // namespace

TEST_CASE("assemble: projective sl2") {
  auto P = assemble(catalog_action("sl2-projective"));
  for (double u : {-0.8, 0.0, 1.3}) {
    double x1 = 0.4, x2 = -1.1, x3 = 0.7;
    std::vector<double> pt{u, x1, x2, x3};
    Eigen::MatrixXd want = mat(4, 4, {0, 2 * u, 1, -u * u,       //
                                      -2 * u, 0, 2 * x2, -2 * x3,  //
                                      -1, -2 * x2, 0, x1,          //
                                      u * u, 2 * x3, -x1, 0});
    CHECK(max_abs(P.at(pt) - want) < 1e-14);
  }
}

TEST_CASE("assemble: translations give the Darboux block") {
  for (int r : {1, 2, 3}) {
    auto P = assemble(catalog_action("translation-" + std::to_string(r)));
    std::mt19937_64 rng(r);
    auto pts = sample_phase_points(catalog_action("translation-" + std::to_string(r)), 10, 5);
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    want.topRightCorner(r, r) = Eigen::MatrixXd::Identity(r, r);
    want.bottomLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    for (const auto& x : pts) CHECK(max_abs(P.at(x) - want) == 0.0);
    CHECK(jacobi_residual(P, pts) == 0.0);
  }
  auto t1 = assemble(catalog_action("translation-1"));
  std::vector<double> x{0.3, -0.2};
  CHECK(bracket(t1, coordinate(2, 0), coordinate(2, 1), x) == doctest::Approx(1.0));
}

TEST_CASE("assemble: so3 on the plane") {
  auto P = assemble(catalog_action("so3-mobius"));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 10; ++t) {
    double x = u(rng), y = u(rng), a = u(rng), b = u(rng), c = u(rng);
    double h1 = 0.5 * (1 + x * x - y * y), h2 = 0.5 * (1 - x * x + y * y);
    Eigen::MatrixXd want = mat(5, 5, {0, 0, y, h1, x * y,       //
                                      0, 0, -x, x * y, h2,       //
                                      -y, x, 0, -c, b,           //
                                      -h1, -x * y, c, 0, -a,     //
                                      -x * y, -h2, -b, a, 0});
    std::vector<double> pt{x, y, a, b, c};
    CHECK(max_abs(P.at(pt) - want) < 1e-14);
  }
}

TEST_CASE("assemble: right parity flips the Phi block") {
  auto right = catalog_action("sl2-projective-right");
  auto P = assemble(right);
  std::vector<double> pt{0.3, 1.0, -0.5, 0.25};
  Eigen::MatrixXd L = P.at(pt);
  Eigen::MatrixXd phi = infinitesimal_matrix(right, std::span<const double>(pt.data(), 1));
  CHECK(max_abs(L.topRightCorner(1, 3) + phi) == 0.0);
  CHECK(jacobi_residual(P, sample_phase_points(right, 50, 11)) < 1e-8);
}

TEST_CASE("bracket identities") {
  std::mt19937_64 rng(7);
  for (const char* name : {"sl2-projective", "se2-linear", "so3-linear", "sl2-frame"}) {
    auto a = catalog_action(name);
    auto P = assemble(a);
    const int d = P.dim();
    auto pts = sample_phase_points(a, 10, 2);
    for (const auto& x : pts) {
      auto F = quadratic(d, rng);
      CHECK(std::abs(bracket(P, F, F, x)) < 1e-12);
      for (int i = 0; i < a.alg.r; ++i)
        for (int j = 0; j < a.alg.r; ++j) {
          double want = 0.0;
          for (int k = 0; k < a.alg.r; ++k) want += a.alg.c(k, i, j) * x[a.p + k];
          CHECK(bracket(P, coordinate(d, a.p + i), coordinate(d, a.p + j), x) == doctest::Approx(want));
        }
    }
  }
}

TEST_CASE("Jacobi over the catalog") {
  for (const auto& name : catalog_action_names()) {
    auto a = catalog_action(name);
    auto P = assemble(a);
    auto pts = sample_phase_points(a, 100, 17);
    CAPTURE(name);
    CHECK(jacobi_residual(P, pts) < 1e-8);
    CHECK(antisymmetry_residual(P, pts) <= 1e-14);
  }
  for (const char* name : {"sl2-projective", "so3-linear", "se2-linear"}) {
    auto bad = corrupted_action(catalog_action(name));
    CAPTURE(name);
    CHECK(jacobi_residual(assemble(bad), sample_phase_points(bad, 100, 17)) > 1e-3);
  }
}

TEST_CASE("frame coordinates reproduce the six-dimensional structure") {
  auto P = assemble(catalog_action("sl2-frame"));
  std::vector<double> pt{1.2, -0.4, 0.3, 0.5, -1.0, 2.0};
  double a = pt[0], b = pt[1], c = pt[2], d = (1 + b * c) / a;
  Eigen::MatrixXd phi = mat(3, 3, {-a, 0, -b, b, -a, 0, -c, 0, -d});
  Eigen::MatrixXd L = P.at(pt);
  CHECK(max_abs(L.topRightCorner(3, 3) - phi) < 1e-14);
  CHECK(max_abs(L.topLeftCorner(3, 3)) == 0.0);
}

TEST_CASE("pencil of the two affine structures") {
  auto lin = catalog_action("aff2-linear"), aff = catalog_action("aff2-affine");
  auto P1 = assemble(lin), P2 = assemble(aff);
  auto pts = sample_phase_points(lin, 100, 23);
  CHECK(compatibility_residual(lin, aff, sample_points(lin, 100, 23)) < 1e-8);
  for (double k : {0.0, 0.5, 1.0, 2.0}) {
    auto Pk = pencil(P1, P2, k);
    CAPTURE(k);
    CHECK(jacobi_residual(Pk, pts) < 1e-8);
    std::vector<double> x{0.7, -0.3, 0.1, 0.2, -0.5, 0.9};
    // (1-k) Phi_1 + k Phi_2 = [[x, y, k, 0], [0, 0, 0, k]]
    Eigen::MatrixXd want = mat(2, 4, {x[0], x[1], k, 0, 0, 0, 0, k});
    CHECK(max_abs(Pk.at(x).topRightCorner(2, 4) - want) < 1e-14);
    Eigen::MatrixXd G = Pk.at(x).bottomRightCorner(4, 4);
    CHECK(G(0, 1) == doctest::Approx(x[3]));
    CHECK(G(0, 2) == doctest::Approx(x[4]));
    CHECK(G(1, 3) == doctest::Approx(x[4]));
  }
  CHECK(max_abs(pencil(P1, P2, 0.0).at(pts[0]) - P1.at(pts[0])) == 0.0);
  CHECK(max_abs(pencil(P1, P2, 1.0).at(pts[0]) - P2.at(pts[0])) == 0.0);
}

TEST_CASE("compatibility") {
  auto proj = catalog_action("sl2-projective");
  auto zs = sample_points(proj, 50, 4);
  CHECK(compatibility_residual(proj, proj, zs) == 0.0);
  auto dual = catalog_action("sl2-projective-dual");
  double c = compatibility_residual(proj, dual, zs);
  CHECK(c > 1e-3);
  // agreement with the pencil verdict
  auto half = pencil(assemble(proj), assemble(dual), 0.5);
  CHECK(jacobi_residual(half, sample_phase_points(proj, 50, 4)) > 1e-3);
  CHECK_THROWS_AS(compatibility_residual(proj, catalog_action("so3-linear"), zs), Error);
}

TEST_CASE("semidirect products") {
  auto sl2 = catalog_algebra("sl2");
  auto S = semidirect_lie_poisson(sl2, 2);
  std::vector<double> pt{0.6, -0.9, 0.2, 1.4, -0.3};
  double x = pt[0], y = pt[1], a = pt[2], b = pt[3], c = pt[4];
  Eigen::MatrixXd want = mat(5, 5, {0, 0, -x, 0, -y,         //
                                    0, 0, y, -x, 0,           //
                                    x, -y, 0, 2 * b, -2 * c,  //
                                    0, x, -2 * b, 0, a,       //
                                    y, 0, 2 * c, -a, 0});
  CHECK(max_abs(S.at(pt) - want) < 1e-14);

  for (auto [alg, act] : {std::pair{"sl2", "sl2-contragredient"}, std::pair{"so3", "so3-contragredient"}}) {
    auto g = catalog_algebra(alg);
    auto A = catalog_action(act);
    auto P = assemble(A), Q = semidirect_lie_poisson(g, g.n);
    auto pts = sample_phase_points(A, 50, 31);
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, max_abs(P.at(p) - Q.at(p)));
    CAPTURE(alg);
    CHECK(worst < 1e-13);
  }
  CHECK_THROWS_AS(semidirect_lie_poisson(sl2, 3), Error);
}

TEST_CASE("canonical actions") {
  std::mt19937_64 rng(41);
  for (const auto& name : catalog_action_names()) {
    auto a = catalog_action(name);
    if (!a.has_action()) continue;
    auto P = assemble(a);
    std::uniform_real_distribution<double> u(-2, 2);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      auto [g, z] = sample_pair(a, rng);
      for (int k = 0; k < a.alg.r; ++k) z.push_back(u(rng));
      worst = std::max(worst, canonical_action_residual(P, a, g, z));
      if (t == 0) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Identity(a.alg.n, a.alg.n);
        CHECK(canonical_action_residual(P, a, e, z) < 1e-14);
      }
    }
    CAPTURE(name);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("canonical: projective sl2 by hand") {
  auto a = catalog_action("sl2-projective");
  auto P = assemble(a);
  Eigen::MatrixXd g = mat(2, 2, {1.2, 0.3, -0.4, (1 + 0.3 * -0.4) / 1.2});
  double u = 0.35;
  std::vector<double> x{u, 0.5, -1.0, 0.8};
  // g^{-1}.u = (d u - b) / (a - c u) and its derivative is (cu - a)^{-2}
  double A = g(0, 0), B = g(0, 1), C = g(1, 0), D = g(1, 1);
  double w = (D * u - B) / (A - C * u);
  double dw = 1.0 / ((C * u - A) * (C * u - A));
  auto pb = pullback_point(a, g, std::span<const double>(x.data(), 1));
  CHECK(pb[0] == doctest::Approx(w));
  CHECK(pullback_jacobian(a, g, std::span<const double>(x.data(), 1))(0, 0) == doctest::Approx(dw));
  CHECK(canonical_action_residual(P, a, g, x) < 1e-8);
}
