#include <cmath>

#include "doctest.h"
#include "algpois/action.hpp"
#include "algpois/expr.hpp"

using namespace algpois;

TEST_CASE("expression parsing and evaluation") {
  auto vars = phase_variables(2, 3, {{"x", 0}, {"y", 1}});
  std::vector<double> pt{0.5, -2.0, 1.0, 3.0, -1.5};
  auto f = [&](const std::string& s) { return expression_map(s, vars, 5)(pt)[0]; };
  CHECK(f("1 + 2*3") == 7.0);
  CHECK(f("-x^2") == -0.25);
  CHECK(f("(x^2 + y^2)/5") == doctest::Approx(4.25 / 5));
  CHECK(f("z1 * xi2 - xi3^3") == doctest::Approx(0.5 * 3.0 + 3.375));
  CHECK(f("y^-2") == doctest::Approx(0.25));
  CHECK(f("sqrt(4) + exp(0) + log(1) + sin(0) + cos(0)") == doctest::Approx(4.0));
  CHECK(f("1.5e1 - .5") == 14.5);
  for (const char* bad : {"x +", "q", "x^1.5", "(x", "x y", "sin x"}) CHECK_THROWS_AS(f(bad), Error);

  auto g = expression_map("x^3*y + xi1/y", vars, 5);
  Eigen::VectorXd grad = gradient(g, pt);
  CHECK(grad(0) == doctest::Approx(3 * 0.25 * -2.0));
  CHECK(grad(1) == doctest::Approx(0.125 - 1.0 / 4.0));
  CHECK(grad(2) == doctest::Approx(-0.5));
}

TEST_CASE("hamiltonian presets") {
  for (const auto& h : hamiltonian_presets()) {
    auto a = catalog_action(h.action);
    bool lp = h.name.find("-lp") != std::string::npos;
    int p = lp ? 0 : a.p;
    CAPTURE(h.name);
    auto H = hamiltonian(h.name, lp ? "" : h.action, p, a.alg.r);
    CHECK(H.in_dim() == p + a.alg.r);
  }
  // the two forms of the frame Hamiltonian agree under u = -sb/sa, u_v = sa^-2, u_vv = 2 sc / sa^3
  auto Hs = hamiltonian("fig2-sigma", "sl2-frame", 3, 3);
  auto Hj = hamiltonian("fig2-jet", "sl2-prolonged-3", 4, 3);
  double sa = 1.3, sb = -0.4, sc = 0.7;
  std::vector<double> xs{sa, sb, sc, 0.2, -1.0, 0.5};
  std::vector<double> xj{-sb / sa, 1 / (sa * sa), 2 * sc / (sa * sa * sa), 9.0, 0.2, -1.0, 0.5};
  CHECK(Hs(xs)[0] == doctest::Approx(Hj(xj)[0]).epsilon(1e-14));
  CHECK_THROWS_AS(hamiltonian_preset("nope"), Error);
}
