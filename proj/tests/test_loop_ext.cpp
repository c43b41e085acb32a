#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "algpois/errors.hpp"
#include "algpois/loop_ext.hpp"
#include "test_util.hpp"

using namespace algpois;

namespace {

constexpr double kPi = std::numbers::pi;

LoopSection trig(const LoopGrid& grid, std::function<double(double)> f, int r, int slot) {
  LoopSection x{Eigen::MatrixXd::Zero(grid.N, r)};
  for (int j = 0; j < grid.N; ++j) x.c(j, slot) = f(grid.node(j));
  return x;
}

}  // namespace

TEST_CASE("loop grid: derivative and integral") {
  for (auto mode : {DerivativeMode::Spectral, DerivativeMode::FD4}) {
    LoopGrid grid(64, mode);
    Eigen::VectorXd one = Eigen::VectorXd::Constant(64, 3.0);
    CHECK(grid.derivative(one).cwiseAbs().maxCoeff() < 1e-12);
  }
  LoopGrid grid(64);
  Eigen::VectorXd s = grid.nodes();
  Eigen::VectorXd f = (3.0 * s).array().sin() + (5.0 * s).array().cos();
  Eigen::VectorXd df = 3.0 * (3.0 * s).array().cos() - 5.0 * (5.0 * s).array().sin();
  CHECK((grid.derivative(f) - df).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(grid.integrate(grid.derivative(f))) < 1e-12);
  CHECK(std::abs(grid.integrate(f.cwiseProduct(f)) - 2.0 * kPi) < 1e-12);

  LoopGrid fd(64, DerivativeMode::FD4);
  double e64 = (fd.derivative(f) - df).cwiseAbs().maxCoeff();
  LoopGrid fd2(128, DerivativeMode::FD4);
  Eigen::VectorXd s2 = fd2.nodes();
  Eigen::VectorXd f2 = (3.0 * s2).array().sin() + (5.0 * s2).array().cos();
  Eigen::VectorXd df2 = 3.0 * (3.0 * s2).array().cos() - 5.0 * (5.0 * s2).array().sin();
  double e128 = (fd2.derivative(f2) - df2).cwiseAbs().maxCoeff();
  CHECK(e64 / e128 > 12.0);
  CHECK_THROWS_AS(LoopGrid(48), Error);
}

TEST_CASE("loop cocycle: examples") {
  auto alg = catalog_algebra("sl2");
  LoopGrid grid(64);
  auto x = constant_loop_section(grid, {1.0, 2.0, -0.5});
  auto y = constant_loop_section(grid, {0.3, -1.0, 4.0});
  CHECK(std::abs(cocycle_beta(grid, alg, x, y)) < 1e-12);

  Eigen::MatrixXd G = trace_gram(alg);
  auto b = trig(grid, [](double s) { return std::cos(s); }, 3, 1);
  auto c = trig(grid, [](double s) { return std::sin(s); }, 3, 2);
  CHECK(std::abs(cocycle_beta(grid, alg, b, c) - kPi * G(1, 2)) < 1e-12);
  CHECK(std::abs(G(1, 2)) > 0.5);

  std::mt19937_64 rng(3);
  auto u = random_trig_section(grid, 3, 5, rng), v = random_trig_section(grid, 3, 5, rng);
  CHECK(std::abs(cocycle_beta(grid, alg, u, v) + cocycle_beta(grid, alg, v, u)) < 1e-10);
}

TEST_CASE("loop cocycle: first and second brackets") {
  LoopGrid grid(256);
  std::mt19937_64 rng(11);
  for (auto name : {"sl2-projective-on-s", "sl2-circle"}) {
    auto a = catalog_action(name);
    for (int trial = 0; trial < 5; ++trial) {
      int deg = 2 + trial;
      auto x = random_trig_section(grid, 3, deg, rng), y = random_trig_section(grid, 3, deg, rng),
           z = random_trig_section(grid, 3, 8, rng);
      CHECK(cocycle_residual_first(grid, a.alg, x, y, z) < 1e-8);
      CHECK(cocycle_residual_second(a, grid, x, y, z) < 1e-8);
    }
  }
  for (auto name : {"so3-trivial", "sl2-trivial"}) {
    auto a = catalog_action(name);
    auto x = random_trig_section(grid, 3, 4, rng), y = random_trig_section(grid, 3, 4, rng),
         z = random_trig_section(grid, 3, 4, rng);
    CHECK(cocycle_residual_first(grid, a.alg, x, y, z) < 1e-8);
  }
}

TEST_CASE("loop cocycle: coefficient pairing fails") {
  LoopGrid grid(256);
  std::mt19937_64 rng(5);
  auto a = catalog_action("sl2-projective-on-s");
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto x = random_trig_section(grid, 3, 3, rng), y = random_trig_section(grid, 3, 3, rng),
         z = random_trig_section(grid, 3, 3, rng);
    worst = std::max(worst, cocycle_residual_first(grid, a.alg, x, y, z, Pairing::Coefficient));
  }
  CHECK(worst > 1e-2);
}

TEST_CASE("loop cocycle: spectral convergence on smooth data") {
  auto a = catalog_action("sl2-projective-on-s");
  SmoothMap fx(1, 3, [](auto s, auto out) {
    out[0] = exp(sin(s[0]));
    out[1] = 1.0 / (2.0 + cos(s[0]));
    out[2] = cos(2.0 * s[0]) * exp(cos(s[0]));
  });
  SmoothMap fy(1, 3, [](auto s, auto out) {
    out[0] = sin(s[0]) / (1.5 + cos(s[0]));
    out[1] = exp(cos(2.0 * s[0]));
    out[2] = sin(3.0 * s[0]);
  });
  SmoothMap fz(1, 3, [](auto s, auto out) {
    out[0] = 1.0 / (1.8 - sin(s[0]));
    out[1] = cos(s[0]);
    out[2] = exp(sin(2.0 * s[0]));
  });
  double prev = 0.0;
  bool decays = true;
  for (int N : {8, 16, 32}) {
    LoopGrid grid(N);
    double res = cocycle_residual_first(grid, a.alg, sample_loop_section(grid, fx), sample_loop_section(grid, fy),
                                        sample_loop_section(grid, fz));
    if (N > 8 && res > 1e-14 && prev / res < 100.0) decays = false;
    prev = res;
  }
  CHECK(decays);
  CHECK(prev < 1e-8);
}

TEST_CASE("loop E field") {
  LoopGrid grid(64);
  for (auto name : {"sl2-projective-on-s", "sl2-circle"}) {
    auto a = catalog_action(name);
    auto E = E_field(a, grid);
    CHECK(E_field_residual(a, grid, E) < 1e-10);
    std::mt19937_64 rng(2);
    auto x = random_trig_section(grid, 3, 3, rng);
    CHECK((nodewise_pairing(a.alg, x, E) - rho_hat(a, grid, x)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(E_field(catalog_action("sl2-trivial"), grid).c.cwiseAbs().maxCoeff() == 0.0);
  auto st = catalog_action("scalar-translation");
  CHECK((E_field(st, grid).c.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(E_field(catalog_action("translation-1"), grid), Error);
  CHECK_THROWS_AS(E_field(catalog_action("sl2-tangent"), grid), Error);
}

TEST_CASE("loop second bracket: translation example") {
  LoopGrid grid(64);
  auto a = catalog_action("scalar-translation");
  auto x = trig(grid, [](double s) { return 1.0 + std::sin(s); }, 1, 0);
  auto y = trig(grid, [](double s) { return std::cos(2.0 * s); }, 1, 0);
  auto br = loop_second_bracket(a, grid, x, y);
  for (int j = 0; j < grid.N; ++j) {
    double s = grid.node(j);
    double want = (1.0 + std::sin(s)) * (-2.0 * std::sin(2.0 * s)) - std::cos(2.0 * s) * std::cos(s);
    CHECK(std::abs(br.c(j, 0) - want) < 1e-12);
  }
}

TEST_CASE("loop second bracket: sl2 circle fields") {
  LoopGrid grid(32);
  auto a = catalog_action("sl2-circle");
  Eigen::MatrixXd want(3, 3);
  for (int i = 0; i < 3; ++i) {
    auto e = constant_loop_section(grid, {i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0});
    auto rh = rho_hat(a, grid, e);
    for (int j = 0; j < grid.N; ++j) {
      double s = grid.node(j);
      double w = i == 0 ? 2.0 * std::sin(s) : i == 1 ? 1.0 + std::cos(s) : -(1.0 - std::cos(s));
      CHECK(std::abs(rh(j) - w) < 1e-12);
    }
  }
}

TEST_CASE("loop Hamiltonian fields") {
  LoopGrid grid(64);
  std::mt19937_64 rng(8);
  auto triv = catalog_action("sl2-trivial");
  auto X = random_trig_section(grid, 3, 4, rng), da = random_trig_section(grid, 3, 4, rng),
       db = random_trig_section(grid, 3, 4, rng);
  CHECK(max_abs((ham_vf_second(triv, grid, X, da) - ham_vf_first(grid, triv.alg, X, da)).c) == 0.0);

  for (auto name : {"sl2-circle", "sl2-projective-on-s"}) {
    auto a = catalog_action(name);
    for (double r : {-1.0, 0.0, 2.5}) {
      double direct1 = first_bracket(grid, a.alg, X, da, db, r);
      double via1 = pairing(grid, a.alg, ham_vf_first(grid, a.alg, X, da, r), db);
      CHECK(std::abs(direct1 - via1) < 1e-9 * (1.0 + std::abs(direct1)));
      double direct2 = second_extended_bracket(a, grid, X, da, db, r);
      double via2 = pairing(grid, a.alg, ham_vf_second(a, grid, X, da, r), db);
      CHECK(std::abs(direct2 - via2) < 1e-9 * (1.0 + std::abs(direct2)));
      CHECK(std::abs(direct2 + second_extended_bracket(a, grid, X, db, da, r)) < 1e-8 * (1.0 + std::abs(direct2)));
    }
    auto X0 = random_trig_section(grid, 3, 2, rng);
    CHECK(std::abs(zero_bracket(a, grid, X0, da, da)) < 1e-12);
    auto zero = constant_loop_section(grid, {0.0, 0.0, 0.0});
    CHECK(zero_bracket(a, grid, zero, da, db) == 0.0);
    LoopBracketSpec zs{LoopBracket::Zero, -1.0, 0.0, 1.0, X0};
    double zd = zero_bracket(a, grid, X0, da, db);
    CHECK(std::abs(functional_bracket(a, grid, zs, X, da, db) - zd) < 1e-9 * (1.0 + std::abs(zd)));
  }
}

TEST_CASE("loop functional Jacobi") {
  LoopGrid grid(64);
  auto a = catalog_action("sl2-circle");
  std::mt19937_64 rng(21);
  auto X = random_trig_section(grid, 3, 3, rng);
  auto X0 = random_trig_section(grid, 3, 2, rng);
  auto F = random_quadratic_functional(grid, a.alg, 2, rng);
  auto G = random_quadratic_functional(grid, a.alg, 2, rng);
  auto H = random_quadratic_functional(grid, a.alg, 2, rng);

  auto dF = F.gradient(X);
  auto Y = random_trig_section(grid, 3, 3, rng);
  const double h = 1e-5;
  double fd = (F.value(grid, a.alg, X + h * Y) - F.value(grid, a.alg, X - h * Y)) / (2.0 * h);
  CHECK(std::abs(fd - pairing(grid, a.alg, dF, Y)) < 1e-6 * (1.0 + std::abs(fd)));

  std::vector<LoopBracketSpec> specs = {
      {LoopBracket::First, -1.0, 0.0, 1.0, X0},  {LoopBracket::Second, -1.0, 0.0, 1.0, X0},
      {LoopBracket::Zero, -1.0, 0.0, 1.0, X0},   {LoopBracket::Pencil, -1.0, 0.0, 1.0, X0},
      {LoopBracket::Pencil, -1.0, 0.5, 1.0, X0}, {LoopBracket::Pencil, -1.0, 1.0, 1.0, X0},
      {LoopBracket::Second, 0.7, 0.0, 1.0, X0}};
  for (const auto& spec : specs) CHECK(functional_jacobi_residual(a, grid, spec, X, F, G, H) < 1e-7);

  // E entering with the wrong parity sign breaks Jacobi
  Action flipped = a;
  flipped.parity = Parity::Right;
  CHECK(functional_jacobi_residual(flipped, grid, specs[1], X, F, G, H) > 1e-3);
}

TEST_CASE("loop functional Jacobi: non-gradient operator is detected") {
  LoopGrid grid(64);
  auto a = catalog_action("sl2-circle");
  std::mt19937_64 rng(4);
  auto X = random_trig_section(grid, 3, 3, rng);
  auto F = random_quadratic_functional(grid, a.alg, 2, rng);
  auto G = random_quadratic_functional(grid, a.alg, 2, rng);
  auto H = random_quadratic_functional(grid, a.alg, 2, rng);
  LoopBracketSpec spec{LoopBracket::Second, -1.0, 0.0, 1.0, X};
  CHECK(functional_jacobi_residual(a, grid, spec, X, F, G, H) < 1e-7);
  // K no longer self-adjoint: KX + l is not the gradient of anything
  QuadraticFunctional bad = F;
  auto skew = random_quadratic_functional(grid, a.alg, 2, rng);
  bad.K += skew.K * random_quadratic_functional(grid, a.alg, 1, rng).K;
  CHECK(functional_jacobi_residual(a, grid, spec, X, bad, G, H) > 1e-3);
}
