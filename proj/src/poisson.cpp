#include "algpois/poisson.hpp"

#include <cmath>

namespace algpois {

Eigen::MatrixXd PoissonStructure::at(std::span<const double> x) const {
  std::vector<double> v(x.begin(), x.end());
  auto flat = lambda(v);
  const int d = dim();
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = flat[static_cast<size_t>(i) * d + j];
  return m;
}

PoissonStructure block_structure(std::string name, int p, const StructureConstants& c, SmoothMap theta) {
  const int r = c.r, d = p + r;
  PoissonStructure P;
  P.name = std::move(name);
  P.p = p;
  P.r = r;
  P.lambda = SmoothMap(d, d * d, [theta, c, p, r, d](auto x, auto out) {
    using S = typename decltype(out)::value_type;
    for (auto& v : out) v = S(0.0);
    if (p > 0) {
      std::vector<S> T(static_cast<size_t>(p) * r);
      theta.eval<S>(x.subspan(0, p), T);
      for (int l = 0; l < p; ++l)
        for (int k = 0; k < r; ++k) {
          const S& t = T[static_cast<size_t>(l) * r + k];
          out[static_cast<size_t>(l) * d + p + k] = t;
          out[static_cast<size_t>(p + k) * d + l] = -t;
        }
    }
    Mat<S> L = lie_poisson_bivector_t<S>(c, x.subspan(p, r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) out[static_cast<size_t>(p + i) * d + p + j] = L(i, j);
  });
  return P;
}

PoissonStructure assemble(const Action& a) {
  SmoothMap theta = a.phi;
  if (a.parity == Parity::Right) {
    SmoothMap phi = a.phi;
    theta = SmoothMap(phi.in_dim(), phi.out_dim(), [phi](auto z, auto out) {
      phi.eval<typename decltype(out)::value_type>(z, out);
      for (auto& v : out) v = -v;
    });
  }
  return block_structure(a.name, a.p, a.alg.c, theta);
}

PoissonStructure lie_poisson_structure(const LieAlgebra& alg) {
  return block_structure(alg.name + "*", 0, alg.c, SmoothMap());
}

PoissonStructure semidirect_lie_poisson(const LieAlgebra& alg, int n) {
  if (n != alg.n) throw Error(ErrorCode::DimensionMismatch, "semidirect product needs R^n with n = representation size");
  LieAlgebra h = semidirect_algebra(alg, n);
  PoissonStructure P = block_structure(h.name + "*", 0, h.c, SmoothMap());
  P.p = n;
  P.r = alg.r;
  return P;
}

PoissonStructure pencil(const PoissonStructure& P1, const PoissonStructure& P2, double k) {
  if (P1.dim() != P2.dim()) throw Error(ErrorCode::DimensionMismatch, "pencil of structures of different size");
  PoissonStructure P;
  P.name = "pencil(" + P1.name + "," + P2.name + ")";
  P.p = P1.p;
  P.r = P1.r;
  SmoothMap L1 = P1.lambda, L2 = P2.lambda;
  P.lambda = SmoothMap(P1.dim(), L1.out_dim(), [L1, L2, k](auto x, auto out) {
    using S = typename decltype(out)::value_type;
    std::vector<S> b(out.size());
    L1.eval<S>(x, out);
    L2.eval<S>(x, b);
    for (size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - k) * out[i] + k * b[i];
  });
  return P;
}

double bracket(const PoissonStructure& P, const SmoothMap& F, const SmoothMap& H, std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  Eigen::VectorXd dF = gradient(F, v), dH = gradient(H, v);
  return dF.dot(P.at(x) * dH);
}

double jacobi_residual(const PoissonStructure& P, const PointSet& pts) {
  const int d = P.dim();
  double worst = 0.0;
  for (const auto& x : pts) {
    auto L = P.lambda(x);
    auto J = jacobian<double>(P.lambda, x);  // (d*d) x d
    auto lam = [&](int i, int j) { return L[static_cast<size_t>(i) * d + j]; };
    auto dlam = [&](int i, int j, int l) { return J[(static_cast<size_t>(i) * d + j) * d + l]; };
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
          double s = 0.0;
          for (int l = 0; l < d; ++l)
            s += lam(i, l) * dlam(j, k, l) + lam(j, l) * dlam(k, i, l) + lam(k, l) * dlam(i, j, l);
          worst = std::max(worst, std::abs(s));
        }
  }
  return worst;
}

double antisymmetry_residual(const PoissonStructure& P, const PointSet& pts) {
  double worst = 0.0;
  for (const auto& x : pts) {
    Eigen::MatrixXd L = P.at(x);
    worst = std::max(worst, (L + L.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double canonical_action_residual(const PoissonStructure& P, const Action& a, const Eigen::MatrixXd& g,
                                 std::span<const double> x) {
  const int p = a.p, r = a.alg.r;
  auto z = x.subspan(0, p);
  Eigen::VectorXd xi = Eigen::Map<const Eigen::VectorXd>(x.data() + p, r);
  auto w = pullback_point(a, g, z);
  Eigen::MatrixXd J = pullback_jacobian(a, g, z);
  Eigen::MatrixXd Am = adjoint_matrix(a.alg, g);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularJacobian, a.name + ": pull-back Jacobian is singular");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p + r, p + r);
  D.topLeftCorner(p, p) = lu.inverse().transpose();
  D.bottomRightCorner(r, r) = Am.inverse();
  Eigen::VectorXd moved = (xi.transpose() * Am).transpose();
  std::vector<double> y(w);
  y.insert(y.end(), moved.data(), moved.data() + r);
  Eigen::MatrixXd lhs = D.transpose() * P.at(y) * D;
  return (lhs - P.at(x)).norm();
}

double compatibility_residual(const Action& a1, const Action& a2, const PointSet& z_points) {
  if (a1.alg.name != a2.alg.name || a1.p != a2.p)
    throw Error(ErrorCode::AlgebraMismatch, "compatibility needs the same group acting on the same coordinates");
  const int p = a1.p, r = a1.alg.r;
  const double s1 = a1.sign(), s2 = a2.sign();
  SmoothMap phi1 = a1.phi, phi2 = a2.phi;
  // diff(z)[l*r + i] = (Theta^1 - Theta^2)_{i,l}
  SmoothMap diff(p, p * r, [phi1, phi2, s1, s2](auto z, auto out) {
    using S = typename decltype(out)::value_type;
    std::vector<S> b(out.size());
    phi1.eval<S>(z, out);
    phi2.eval<S>(z, b);
    for (size_t i = 0; i < out.size(); ++i) out[i] = s1 * out[i] - s2 * b[i];
  });
  double worst = 0.0;
  for (const auto& z : z_points) {
    auto D = diff(z);
    auto J = jacobian<double>(diff, z);
    auto Dv = [&](int i, int m) { return D[static_cast<size_t>(m) * r + i]; };
    auto dD = [&](int i, int m, int l) { return J[(static_cast<size_t>(m) * r + i) * p + l]; };
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int m = 0; m < p; ++m) {
          double s = 0.0;
          for (int l = 0; l < p; ++l) s += Dv(j, l) * dD(i, m, l) - Dv(i, l) * dD(j, m, l);
          worst = std::max(worst, std::abs(s));
        }
  }
  return worst;
}

PointSet sample_phase_points(const Action& a, int count, std::uint64_t seed, double xi_scale) {
  PointSet zs = sample_points(a, count, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(-xi_scale, xi_scale);
  for (auto& z : zs)
    for (int k = 0; k < a.alg.r; ++k) z.push_back(u(rng));
  return zs;
}

Action corrupted_action(const Action& a, double amplitude) {
  Action b = a;
  b.name = a.name + "-corrupted";
  b.act = SmoothMap();
  SmoothMap phi = a.phi;
  b.phi = SmoothMap(a.p, phi.out_dim(), [phi, amplitude](auto z, auto out) {
    phi.eval<typename decltype(out)::value_type>(z, out);
    out[0] += amplitude * z[0] * z[0];
  });
  b.note = "corrupted infinitesimals (negative control)";
  return b;
}

}  // namespace algpois
