#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "algpois/expr.hpp"
#include "algpois/hamilton.hpp"
#include "test_util.hpp"

using namespace algpois;

TEST_CASE("flow: harmonic oscillator") {
  auto a = catalog_action("translation-1");
  auto P = assemble(a);
  auto H = hamiltonian("oscillator", a.name, 1, 1);
  auto tr = flow(P, H, {1.0, 0.0}, 2 * std::numbers::pi, 1e-3);
  CHECK(tr.times.back() == 2 * std::numbers::pi);
  CHECK(std::abs(tr.states.back()[0] - 1.0) < 1e-6);
  CHECK(std::abs(tr.states.back()[1]) < 1e-6);
  // z' = xi, xi' = -z: quarter period lands on (0, -1)
  auto q = flow(P, H, {1.0, 0.0}, std::numbers::pi / 2, 1e-3);
  CHECK(std::abs(q.states.back()[0]) < 1e-9);
  CHECK(std::abs(q.states.back()[1] + 1.0) < 1e-9);
  for (size_t i = 1; i < tr.times.size(); ++i) REQUIRE(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("flow: constant Hamiltonian is stationary") {
  auto a = catalog_action("so3-mobius");
  auto P = assemble(a);
  auto H = hamiltonian("7/3", a.name, 2, 3);
  std::vector<double> x0{0.3, -0.2, 1, 2, 3};
  auto tr = flow(P, H, x0, 1.0, 0.1);
  CHECK(tr.states.back() == x0);
  CHECK(conserved_monitor(tr, H) == 0.0);
}

TEST_CASE("flow: fourth order energy drift") {
  auto a = catalog_action("so3-mobius");
  auto P = assemble(a);
  auto H = hamiltonian("fig1", a.name, 2, 3);
  std::vector<double> x0{1, 1, 1, 1, 1};
  double ratio = rk4_order_ratio(P, H, x0, 1.0, 0.02);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
  CHECK(conserved_monitor(flow(P, H, x0, 2.5, 1e-3), H) < 1e-8);
  CHECK_THROWS_AS(flow(P, H, {1, 1}, 1.0, 0.1), Error);
  CHECK_THROWS_AS(flow(P, H, x0, 1.0, 0.0), Error);
}

TEST_CASE("flow: domain exit and blow-up are reported") {
  auto a = catalog_action("translation-1");
  auto P = assemble(a);
  auto H = hamiltonian("-z1", a.name, 1, 1);  // xi' = 1
  DomainGuard guard = [](std::span<const double> x) { return x[1] < 0.5; };
  CHECK_THROWS_AS(flow(P, H, {0, 0}, 1.0, 0.01, guard), Error);
  try {
    flow(P, H, {0, 0}, 1.0, 0.01, guard);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainExit);
  }
  auto H2 = hamiltonian("xi1^3/3", a.name, 1, 1);    // z' = xi^2, xi' = 0
  auto tr = flow(P, H2, {0, 2}, 1.0, 0.5);
  CHECK(tr.states.back()[0] == doctest::Approx(4.0));
}

TEST_CASE("frame: closed form and Newton agree") {
  auto a = catalog_action("sl2-prolonged");
  auto f = moving_frame(a, default_normalization(a));
  CHECK(f.closed_form);
  std::vector<double> z0{1, 1, 1};
  CHECK(max_abs(f.sigma(z0) - mat(2, 2, {1, -1, 0.5, 0.5})) < 1e-15);
  auto I = f.invariants(z0);
  CHECK(std::abs(I[0]) < 1e-15);
  CHECK(std::abs(I[1] - 1) < 1e-15);
  CHECK(std::abs(I[2]) < 1e-15);
  std::vector<double> k{0, 1, 0};
  CHECK(max_abs(f.sigma(k) - Eigen::MatrixXd::Identity(2, 2)) == 0.0);

  auto fn = moving_frame(a, default_normalization(a), false);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto z = sample_point(a, rng);
    CHECK(max_abs(fn.sigma(z) - f.sigma(z)) < 1e-10);
  }
  CHECK(max_abs(fn.sigma(k) - Eigen::MatrixXd::Identity(2, 2)) == 0.0);
  std::vector<double> bad{0.0, -1.0, 0.0};
  CHECK_THROWS_AS(f.sigma(bad), Error);
}

TEST_CASE("frame: equivariance") {
  for (const char* name : {"sl2-prolonged", "sl2-prolonged-3"}) {
    auto a = catalog_action(name);
    auto f = moving_frame(a, default_normalization(a));
    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
      auto [g, z] = sample_pair(a, rng);
      CHECK(frame_equivariance_residual(f, g, z) < 1e-8);
      auto I = f.invariants(z), Ig = f.invariants(apply(a, g, z));
      for (size_t i = 0; i < I.size(); ++i) CHECK(std::abs(I[i] - Ig[i]) < 1e-8);
    }
  }
}

TEST_CASE("frame: closed-form invariants equal sigma(z).z") {
  for (const char* name : {"sl2-prolonged", "sl2-prolonged-3"}) {
    auto a = catalog_action(name);
    auto f = moving_frame(a, default_normalization(a));
    auto fn = moving_frame(a, default_normalization(a), false);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
      auto z = sample_point(a, rng);
      auto I = f.invariants(z), J = apply(a, f.sigma(z), z), K = fn.invariants(z);
      for (size_t i = 0; i < I.size(); ++i) {
        CHECK(std::abs(I[i] - J[i]) < 1e-10);
        CHECK(std::abs(I[i] - K[i]) < 1e-9);
      }
    }
  }
}

TEST_CASE("frame: singular normalisation is reported") {
  auto a = catalog_action("sl2-prolonged");
  // u_v = 1 twice leaves the system rank deficient
  Normalization n{{1, 1, 0}, {1.0, 1.0, 0.0}};
  auto f = moving_frame(a, n, false);
  std::vector<double> z{0.1, 1.2, 0.3};
  CHECK_THROWS_AS(f.sigma(z), Error);
}

TEST_CASE("frame flow") {
  auto a = catalog_action("sl2-prolonged-3");
  auto f = moving_frame(a, default_normalization(a));
  auto H = hamiltonian("fig2-jet", a.name, 4, 3);
  std::vector<double> z0{1, 1, 1, 1}, xi0{1, 1, 1};
  auto ft = frame_flow(f, H, z0, xi0, 1.0, 1e-3);
  CHECK(ft.det_defect < 1e-9);
  CHECK(ft.invariant_drift < 1e-6);
  CHECK(ft.frame_consistency < 1e-6);

  std::vector<double> x0 = z0;
  x0.insert(x0.end(), xi0.begin(), xi0.end());
  auto direct = flow(assemble(a), H, x0, 1.0, 1e-3);
  auto mapped = frame_to_phase(f, ft);
  REQUIRE(mapped.size() == direct.states.size());
  double dev = 0.0;
  for (size_t i = 0; i < mapped.size(); ++i)
    for (size_t j = 0; j < x0.size(); ++j) dev = std::max(dev, std::abs(mapped[i][j] - direct.states[i][j]));
  CHECK(dev < 1e-5);

  // the third-order invariant is constant along the full flow
  double drift = 0.0, I0 = f.invariants(std::span<const double>(direct.states[0].data(), 4))[3];
  for (const auto& x : direct.states) drift = std::max(drift, std::abs(f.invariants(std::span<const double>(x.data(), 4))[3] - I0));
  CHECK(drift < 1e-6);

  // six-dimensional frame system: u(t) = -sb/sa tracks the jet flow
  auto fig = figure2(1.0, 1e-3);
  const auto& six = fig[0].traj;
  double udev = 0.0;
  for (size_t i = 0; i < six.states.size(); ++i)
    udev = std::max(udev, std::abs(-six.states[i][1] / six.states[i][0] - direct.states[i][0]));
  CHECK(udev < 1e-5);

  auto Hz = hamiltonian("u^2 + u_vvv", a.name, 4, 3);
  auto still = frame_flow(f, Hz, z0, xi0, 0.5, 1e-2);
  for (int i = 0; i < 4; ++i) CHECK(still.traj.states.back()[i] == still.traj.states.front()[i]);
}

TEST_CASE("xi freeze") {
  auto a = catalog_action("sl2-tangent");
  auto k2 = hamiltonian("kappa2", a.name, 2, 3);
  auto rep = xi_freeze_check(a, k2);
  CHECK(rep.invariance < 1e-8);
  CHECK(rep.xi_dot_max < 1e-8);
  auto cas = hamiltonian("kappa1-corrected", a.name, 2, 3);
  CHECK(xi_freeze_check(a, cas).xi_dot_max < 1e-8);
  auto both = hamiltonian("(xi1^2 + 4*xi2*xi3)*((u^2*xi2 - u*xi1 - xi3)/v) + ((u^2*xi2 - u*xi1 - xi3)/v)^3",
                          a.name, 2, 3);
  CHECK(xi_freeze_check(a, both).xi_dot_max < 1e-8);

  auto k1 = hamiltonian("kappa1", a.name, 2, 3);
  CHECK(invariance_residual(a, k1, 100, 1) > 1e-3);
  CHECK_THROWS_AS(xi_freeze_check(a, k1), Error);

  auto proj = catalog_action("sl2-projective");
  auto lin = hamiltonian("xi1", proj.name, 1, 3);
  try {
    xi_freeze_check(proj, lin);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInvariant);
  }
}

TEST_CASE("figure scenarios") {
  auto f1 = figure1(5.0, 1e-4);
  REQUIRE(f1.size() == 3);
  auto a = catalog_action("so3-mobius");
  CHECK(conserved_monitor(f1[0].traj, hamiltonian("fig1", a.name, 2, 3)) < 1e-6);
  auto cas = hamiltonian("xi1^2 + xi2^2 + xi3^2", "", 0, 3);
  CHECK(conserved_monitor(f1[1].traj, cas) < 1e-9);
  CHECK(conserved_monitor(f1[2].traj, cas) < 1e-9);
  for (const auto& x : f1[0].traj.states)
    for (double v : x) REQUIRE(std::abs(v) < 1e3);

  auto f2 = figure2(5.0, 1e-3);
  auto Hs = hamiltonian("fig2-sigma", "sl2-frame", 3, 3);
  CHECK(conserved_monitor(f2[0].traj, Hs) < 1e-8);
  auto sl2cas = hamiltonian("xi1^2 + 4*xi2*xi3", "", 0, 3);
  CHECK(conserved_monitor(f2[1].traj, sl2cas) < 1e-9);
}
