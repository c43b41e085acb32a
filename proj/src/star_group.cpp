#include "algpois/star_group.hpp"

#include <cmath>

namespace algpois {

namespace {

Eigen::MatrixXd identity_of(const Action& a) { return Eigen::MatrixXd::Identity(a.alg.n, a.alg.n); }

std::vector<double> moved(const Action& a, const Eigen::MatrixXd& g, std::span<const double> s) {
  if (!in_domain(a, g, s)) throw Error(ErrorCode::OutOfDomain, a.name + ": star product leaves the domain");
  return act_point(a, g, s);
}

}  // namespace

GroupSection unit_section(const Action& a) {
  Eigen::MatrixXd e = identity_of(a);
  return {[e](std::span<const double>) { return e; }};
}

GroupSection constant_group_section(Eigen::MatrixXd g0) {
  return {[g0](std::span<const double>) { return g0; }};
}

GroupSection exp_section(const Action& a, const Section& x, double eps) {
  LieAlgebra alg = a.alg;
  return {[alg, x, eps](std::span<const double> s) { return matrix_exp(x.value(alg, s), eps); }};
}

std::vector<double> act_point(const Action& a, const Eigen::MatrixXd& g, std::span<const double> s) {
  return apply(a, g, s);
}

GroupSection star_product(const Action& a, const GroupSection& g, const GroupSection& h) {
  if (a.parity == Parity::Left)
    return {[a, g, h](std::span<const double> s) {
      Eigen::MatrixXd hs = h(s);
      auto w = moved(a, hs, s);
      return Eigen::MatrixXd(g(w) * hs);
    }};
  return {[a, g, h](std::span<const double> s) {
    Eigen::MatrixXd gs = g(s);
    auto w = moved(a, gs, s);
    return Eigen::MatrixXd(gs * h(w));
  }};
}

GroupSection star_inverse(const Action& a, const GroupSection& g, StarInverseOptions opt) {
  return {[a, g, opt](std::span<const double> s) {
    const int p = a.p;
    std::vector<double> w(s.begin(), s.end());
    auto F = [&](const std::vector<double>& x) {
      auto y = moved(a, g(x), x);
      Eigen::VectorXd r(p);
      for (int i = 0; i < p; ++i) r(i) = y[i] - s[i];
      return r;
    };
    Eigen::VectorXd r = F(w);
    for (int it = 0; it < opt.max_iter; ++it) {
      double scale = 1.0 + Eigen::Map<const Eigen::VectorXd>(s.data(), p).norm();
      if (r.norm() <= opt.tol * scale) return Eigen::MatrixXd(g(w).inverse());
      Eigen::MatrixXd J(p, p);
      for (int j = 0; j < p; ++j) {
        double h = 1e-6 * (1.0 + std::abs(w[j]));
        auto wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        J.col(j) = (F(wp) - F(wm)) / (2.0 * h);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible()) break;
      Eigen::VectorXd d = lu.solve(r);
      bool accepted = false;
      for (double step = 1.0; step > 1e-6 && !accepted; step *= 0.5) {
        auto trial = w;
        for (int i = 0; i < p; ++i) trial[i] -= step * d(i);
        try {
          Eigen::VectorXd rt = F(trial);
          if (rt.allFinite() && (rt.norm() < r.norm() || (step == 1.0 && rt.norm() <= 1e3 * opt.tol * scale))) {
            w = trial;
            r = rt;
            accepted = true;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::OutOfDomain) throw;
        }
      }
      if (!accepted) break;
      // stagnation at roundoff level
      if (d.norm() <= 4 * opt.tol * scale && r.norm() <= 1e3 * opt.tol * scale) return Eigen::MatrixXd(g(w).inverse());
    }
    throw Error(ErrorCode::NotInvertible, a.name + ": star inverse did not converge (section too far from the unit)");
  }};
}

double c1_distance(const Action& a, const GroupSection& g, const PointSet& pts) {
  Eigen::MatrixXd e = identity_of(a);
  double worst = 0.0;
  for (const auto& s : pts) {
    worst = std::max(worst, (g(s) - e).norm());
    for (int j = 0; j < a.p; ++j) {
      double h = 1e-5 * (1.0 + std::abs(s[j]));
      auto sp = s, sm = s;
      sp[j] += h;
      sm[j] -= h;
      worst = std::max(worst, ((g(sp) - g(sm)) / (2.0 * h)).norm());
    }
  }
  return worst;
}

void require_near_unit(const Action& a, const GroupSection& g, const PointSet& pts, double threshold) {
  double d = c1_distance(a, g, pts);
  if (!(d < threshold))
    throw Error(ErrorCode::NotInvertible,
                a.name + ": section is " + std::to_string(d) + " from the unit in C1, outside the local group");
}

double unit_residual(const Action& a, const GroupSection& g, const PointSet& pts) {
  auto e = unit_section(a);
  auto l = star_product(a, e, g), r = star_product(a, g, e);
  double worst = 0.0;
  for (const auto& s : pts) {
    Eigen::MatrixXd gs = g(s);
    worst = std::max({worst, (l(s) - gs).cwiseAbs().maxCoeff(), (r(s) - gs).cwiseAbs().maxCoeff()});
  }
  return worst;
}

double associativity_residual(const Action& a, const GroupSection& g, const GroupSection& h, const GroupSection& f,
                              const PointSet& pts) {
  auto lhs = star_product(a, star_product(a, g, h), f);
  auto rhs = star_product(a, g, star_product(a, h, f));
  double worst = 0.0;
  for (const auto& s : pts) worst = std::max(worst, (lhs(s) - rhs(s)).norm());
  return worst;
}

double action_property_residual(const Action& a, const GroupSection& g, const GroupSection& h, const PointSet& pts) {
  auto sigma = [&](const GroupSection& k, std::span<const double> s) { return moved(a, k(s), s); };
  auto gh = star_product(a, g, h);
  double worst = 0.0;
  for (const auto& s : pts) {
    auto lhs = sigma(gh, s);
    auto rhs = a.parity == Parity::Left ? sigma(g, sigma(h, s)) : sigma(h, sigma(g, s));
    for (int i = 0; i < a.p; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return worst;
}

double inverse_residual(const Action& a, const GroupSection& g, const PointSet& pts, StarInverseOptions opt) {
  auto gi = star_inverse(a, g, opt);
  auto r1 = star_product(a, g, gi), r2 = star_product(a, gi, g);
  Eigen::MatrixXd e = identity_of(a);
  double worst = 0.0;
  for (const auto& s : pts) worst = std::max({worst, (r1(s) - e).norm(), (r2(s) - e).norm()});
  return worst;
}

std::vector<double> bracket_from_conjugation(const Action& a, const Section& x, const Section& y,
                                             std::span<const double> s, double eps, bool richardson) {
  if (!(eps >= 1e-4 && eps <= 1e-2)) throw Error(ErrorCode::ConfigError, "conjugation step must lie in [1e-4, 1e-2]");
  auto conj = [&](double e, double d) {
    auto g = exp_section(a, x, e);
    auto h = exp_section(a, y, d);
    return star_product(a, star_product(a, g, h), star_inverse(a, g))(s);
  };
  auto mixed = [&](double h) {
    Eigen::MatrixXd m = (conj(h, h) - conj(h, -h) - conj(-h, h) + conj(-h, -h)) / (4.0 * h * h);
    return m;
  };
  Eigen::MatrixXd d = mixed(eps);
  if (richardson) d = (4.0 * mixed(eps / 2) - d) / 3.0;
  Eigen::VectorXd c = a.alg.coordinates(d, 1e-3 * (1.0 + d.norm()));
  return {c.data(), c.data() + c.size()};
}

double conjugation_bracket_error(const Action& a, const Section& x, const Section& y, const PointSet& pts, double eps,
                                 bool richardson) {
  Section br = second_bracket(a, x, y);
  double worst = 0.0;
  for (const auto& s : pts) {
    auto c = bracket_from_conjugation(a, x, y, s, eps, richardson);
    auto want = br.coeffs(s);
    for (size_t k = 0; k < c.size(); ++k) worst = std::max(worst, std::abs(c[k] + want[k]));
  }
  return worst;
}

}  // namespace algpois
