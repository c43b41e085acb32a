#include "algpois/algebroid.hpp"

#include <cmath>

namespace algpois {

namespace {

void require_same(const Section& x, const Section& y) {
  if (x.algebra != y.algebra || x.coeffs.out_dim() != y.coeffs.out_dim())
    throw Error(ErrorCode::AlgebraMismatch, "sections take values in different algebras");
}

void require_algebra(const Action& a, const Section& x) {
  if (x.algebra != a.alg.name || x.coeffs.out_dim() != a.alg.r)
    throw Error(ErrorCode::AlgebraMismatch, "section algebra differs from the action's algebra");
  if (x.coeffs.in_dim() != a.p) throw Error(ErrorCode::DimensionMismatch, "section domain dimension");
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

Eigen::MatrixXd Section::value(const LieAlgebra& alg, std::span<const double> z) const {
  std::vector<double> zz(z.begin(), z.end());
  auto c = coeffs(zz);
  return alg.element(c);
}

Section constant_section(const LieAlgebra& alg, int p, std::vector<double> coeffs) {
  return {constant_map(p, std::move(coeffs)), alg.name};
}

SmoothMap scalar_polynomial(int p, std::vector<Monomial> terms) {
  return SmoothMap(p, 1, [terms](auto z, auto out) {
    using S = typename decltype(out)::value_type;
    S acc(0.0);
    for (const auto& m : terms) {
      S t(m.coef);
      for (size_t i = 0; i < m.exps.size(); ++i)
        if (m.exps[i] != 0) t = t * ipow(z[i], m.exps[i]);
      acc += t;
    }
    out[0] = acc;
  });
}

Section polynomial_section(const LieAlgebra& alg, int p, PolynomialCoeffs poly) {
  if (static_cast<int>(poly.size()) != alg.r) throw Error(ErrorCode::DimensionMismatch, "section components");
  return {SmoothMap(p, alg.r,
                    [poly](auto z, auto out) {
                      using S = typename decltype(out)::value_type;
                      for (size_t k = 0; k < poly.size(); ++k) {
                        S acc(0.0);
                        for (const auto& m : poly[k]) {
                          S t(m.coef);
                          for (size_t i = 0; i < m.exps.size(); ++i)
                            if (m.exps[i] != 0) t = t * ipow(z[i], m.exps[i]);
                          acc += t;
                        }
                        out[k] = acc;
                      }
                    }),
          alg.name};
}

Section random_polynomial_section(const LieAlgebra& alg, int p, int degree, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  // All exponent vectors with total degree <= degree.
  std::vector<std::vector<int>> exps{std::vector<int>(p, 0)};
  for (int d = 1; d <= degree; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& e : exps) {
      int total = 0;
      for (int v : e) total += v;
      if (total != d - 1) continue;
      int last = 0;
      for (int i = 0; i < p; ++i)
        if (e[i] > 0) last = i;
      for (int i = last; i < p; ++i) {
        auto f = e;
        ++f[i];
        next.push_back(f);
      }
    }
    exps.insert(exps.end(), next.begin(), next.end());
  }
  PolynomialCoeffs poly(alg.r);
  for (auto& comp : poly)
    for (const auto& e : exps) comp.push_back({u(rng), e});
  return polynomial_section(alg, p, std::move(poly));
}

Section pointwise_bracket(const LieAlgebra& alg, const Section& x, const Section& y) {
  require_same(x, y);
  const StructureConstants c = alg.c;
  const int p = x.coeffs.in_dim();
  return {SmoothMap(p, alg.r,
                    [c, x, y](auto z, auto out) {
                      using S = typename decltype(out)::value_type;
                      const int r = c.r;
                      std::vector<S> xv(r), yv(r);
                      x.coeffs.eval<S>(z, xv);
                      y.coeffs.eval<S>(z, yv);
                      for (int k = 0; k < r; ++k) {
                        S acc(0.0);
                        for (int i = 0; i < r; ++i)
                          for (int j = 0; j < r; ++j)
                            if (c(k, i, j) != 0.0) acc += c(k, i, j) * (xv[i] * yv[j]);
                        out[k] = acc;
                      }
                    }),
          alg.name};
}

SmoothMap anchor(const Action& a, const Section& x) {
  require_algebra(a, x);
  const SmoothMap phi = a.phi;
  const int p = a.p, r = a.alg.r;
  return SmoothMap(p, p, [phi, x, p, r](auto z, auto out) {
    using S = typename decltype(out)::value_type;
    std::vector<S> P(static_cast<size_t>(p) * r), xv(r);
    phi.eval<S>(z, P);
    x.coeffs.eval<S>(z, xv);
    for (int l = 0; l < p; ++l) {
      S acc(0.0);
      for (int k = 0; k < r; ++k) acc += P[static_cast<size_t>(l) * r + k] * xv[k];
      out[l] = acc;
    }
  });
}

Section lie_derivative_section(const Action& a, const Section& x, const Section& y) {
  require_algebra(a, y);
  SmoothMap rho = anchor(a, x);
  return {SmoothMap(a.p, a.alg.r,
                    [rho, y](auto z, auto out) {
                      using S = typename decltype(out)::value_type;
                      std::vector<S> dir(rho.out_dim());
                      rho.eval<S>(z, dir);
                      auto [val, der] = directional<S>(y.coeffs, z, dir);
                      for (size_t k = 0; k < der.size(); ++k) out[k] = der[k];
                    }),
          a.alg.name};
}

Section second_bracket(const Action& a, const Section& x, const Section& y) {
  require_algebra(a, x);
  require_same(x, y);
  SmoothMap rx = anchor(a, x), ry = anchor(a, y);
  const StructureConstants c = a.alg.c;
  const double s = a.sign();
  return {SmoothMap(a.p, a.alg.r,
                    [rx, ry, x, y, c, s](auto z, auto out) {
                      using S = typename decltype(out)::value_type;
                      const int r = c.r;
                      std::vector<S> dx(rx.out_dim()), dy(ry.out_dim());
                      rx.eval<S>(z, dx);
                      ry.eval<S>(z, dy);
                      auto [xv, x_along_y] = directional<S>(x.coeffs, z, dy);
                      auto [yv, y_along_x] = directional<S>(y.coeffs, z, dx);
                      for (int k = 0; k < r; ++k) {
                        S acc = s * (y_along_x[k] - x_along_y[k]);
                        for (int i = 0; i < r; ++i)
                          for (int j = 0; j < r; ++j)
                            if (c(k, i, j) != 0.0) acc -= c(k, i, j) * (xv[i] * yv[j]);
                        out[k] = acc;
                      }
                    }),
          a.alg.name};
}

std::vector<double> vector_field_bracket(const SmoothMap& X, const SmoothMap& Y, std::span<const double> z) {
  auto xv = X(std::vector<double>(z.begin(), z.end()));
  auto yv = Y(std::vector<double>(z.begin(), z.end()));
  auto [y0, dY_X] = directional<double>(Y, z, xv);
  auto [x0, dX_Y] = directional<double>(X, z, yv);
  std::vector<double> out(xv.size());
  for (size_t l = 0; l < out.size(); ++l) out[l] = dY_X[l] - dX_Y[l];
  return out;
}

PointSet sample_points(const Action& a, int count, std::uint64_t seed, double min_margin) {
  if (a.p > static_cast<int>(std::size(kPrimes))) throw Error(ErrorCode::UnsupportedShape, "too many coordinates");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(0.0, 1.0);
  std::vector<double> offset(a.p);
  for (auto& o : offset) o = shift(rng);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.alg.n, a.alg.n);
  PointSet pts;
  for (std::uint64_t i = 1; static_cast<int>(pts.size()) < count; ++i) {
    if (i > 100000) throw Error(ErrorCode::OutOfDomain, a.name + ": could not place sample points");
    std::vector<double> z(a.p);
    for (int d = 0; d < a.p; ++d) {
      double t = radical_inverse(i, kPrimes[d]) + offset[d];
      t -= std::floor(t);
      z[d] = a.box[d].first + t * (a.box[d].second - a.box[d].first);
    }
    if (in_domain(a, id, z, min_margin)) pts.push_back(std::move(z));
  }
  return pts;
}

double leibniz_residual(const Action& a, const Section& x, const Section& y, const SmoothMap& f, const PointSet& pts) {
  const int r = a.alg.r;
  Section fy{SmoothMap(a.p, r,
                       [f, y, r](auto z, auto out) {
                         using S = typename decltype(out)::value_type;
                         std::vector<S> fv(1);
                         f.eval<S>(z, fv);
                         y.coeffs.eval<S>(z, out);
                         for (int k = 0; k < r; ++k) out[k] = fv[0] * out[k];
                       }),
             y.algebra};
  Section lhs = second_bracket(a, x, fy);
  Section base = second_bracket(a, x, y);
  SmoothMap rho = anchor(a, x);
  double worst = 0.0;
  for (const auto& z : pts) {
    auto l = lhs.coeffs(z);
    auto b = base.coeffs(z);
    auto yv = y.coeffs(z);
    double fz = f(z)[0];
    auto dir = rho(z);
    double df = directional<double>(f, z, dir).second[0];
    std::vector<double> rhs(r);
    for (int k = 0; k < r; ++k) rhs[k] = fz * b[k] + a.sign() * df * yv[k];
    worst = std::max(worst, max_diff(l, rhs));
  }
  return worst;
}

double anchor_homomorphism_residual(const Action& a, const Section& x, const Section& y, const PointSet& pts) {
  SmoothMap lhs = anchor(a, second_bracket(a, x, y));
  SmoothMap rx = anchor(a, x), ry = anchor(a, y);
  double worst = 0.0;
  for (const auto& z : pts) {
    auto l = lhs(z);
    auto vb = vector_field_bracket(rx, ry, z);
    for (auto& v : vb) v *= a.sign();
    worst = std::max(worst, max_diff(l, vb));
  }
  return worst;
}

double jacobi_residual_sections(const Action& a, const Section& x, const Section& y, const Section& z,
                                const PointSet& pts) {
  Section t1 = second_bracket(a, x, second_bracket(a, y, z));
  Section t2 = second_bracket(a, y, second_bracket(a, z, x));
  Section t3 = second_bracket(a, z, second_bracket(a, x, y));
  double worst = 0.0;
  for (const auto& p : pts) {
    auto v1 = t1.coeffs(p), v2 = t2.coeffs(p), v3 = t3.coeffs(p);
    for (size_t k = 0; k < v1.size(); ++k) worst = std::max(worst, std::abs(v1[k] + v2[k] + v3[k]));
  }
  return worst;
}

double antisymmetry_residual(const Action& a, const Section& x, const Section& y, const PointSet& pts) {
  Section xy = second_bracket(a, x, y), yx = second_bracket(a, y, x);
  double worst = 0.0;
  for (const auto& p : pts) {
    auto u = xy.coeffs(p), v = yx.coeffs(p);
    for (size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u[k] + v[k]));
  }
  return worst;
}

}  // namespace algpois
