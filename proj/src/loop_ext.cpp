#include "algpois/loop_ext.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace algpois {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void same_grid(const LoopSection& a, const LoopSection& b) {
  if (a.c.rows() != b.c.rows() || a.c.cols() != b.c.cols())
    throw Error(ErrorCode::GridMismatch, "loop sections live on different grids or algebras");
}

Eigen::VectorXd flatten(const LoopSection& x) {
  const int N = x.N(), r = static_cast<int>(x.c.cols());
  Eigen::VectorXd v(static_cast<Eigen::Index>(N) * r);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < r; ++i) v(static_cast<Eigen::Index>(j) * r + i) = x.c(j, i);
  return v;
}

LoopSection unflatten(const Eigen::VectorXd& v, int N, int r) {
  LoopSection x{Eigen::MatrixXd(N, r)};
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < r; ++i) x.c(j, i) = v(static_cast<Eigen::Index>(j) * r + i);
  return x;
}

// Node-major pairing matrix (2 pi / N) I_N (x) G.
Eigen::MatrixXd pairing_matrix(const LoopGrid& grid, const Eigen::MatrixXd& G) {
  const int r = static_cast<int>(G.rows());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.N) * r, static_cast<Eigen::Index>(grid.N) * r);
  for (int j = 0; j < grid.N; ++j) W.block(j * r, j * r, r, r) = (kTwoPi / grid.N) * G;
  return W;
}

LoopSection scale_rows(const Eigen::VectorXd& f, const LoopSection& x) {
  return {f.asDiagonal() * x.c};
}

// E' = -sign E
LoopSection effective_E(const Action& a, const LoopGrid& grid) { return (-a.sign()) * E_field(a, grid); }

}  // namespace

LoopGrid::LoopGrid(int n, DerivativeMode m) : N(n), mode(m) {
  if (n < 8 || (n & (n - 1)) != 0) throw Error(ErrorCode::GridMismatch, "grid size must be a power of two >= 8");
}

double LoopGrid::node(int j) const { return kTwoPi * j / N; }

Eigen::VectorXd LoopGrid::nodes() const {
  Eigen::VectorXd s(N);
  for (int j = 0; j < N; ++j) s(j) = node(j);
  return s;
}

Eigen::VectorXd LoopGrid::derivative(const Eigen::VectorXd& f) const {
  if (f.size() != N) throw Error(ErrorCode::GridMismatch, "derivative: sample count differs from grid size");
  if (mode == DerivativeMode::FD4) {
    const double h = kTwoPi / N;
    Eigen::VectorXd d(N);
    for (int j = 0; j < N; ++j) {
      auto at = [&](int k) { return f((j + k + N) % N); };
      d(j) = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
    }
    return d;
  }
  Eigen::FFT<double> fft;
  std::vector<double> in(f.data(), f.data() + N);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  for (int k = 0; k < N; ++k) {
    int m = k <= N / 2 ? k : k - N;
    spec[k] *= (k == N / 2) ? std::complex<double>(0.0) : std::complex<double>(0.0, m);
  }
  std::vector<double> out;
  fft.inv(out, spec);
  return Eigen::Map<Eigen::VectorXd>(out.data(), N);
}

double LoopGrid::integrate(const Eigen::VectorXd& f) const {
  if (f.size() != N) throw Error(ErrorCode::GridMismatch, "integrate: sample count differs from grid size");
  return kTwoPi / N * f.sum();
}

LoopSection operator+(const LoopSection& a, const LoopSection& b) {
  same_grid(a, b);
  return {a.c + b.c};
}
LoopSection operator-(const LoopSection& a, const LoopSection& b) {
  same_grid(a, b);
  return {a.c - b.c};
}
LoopSection operator*(double k, const LoopSection& a) { return {k * a.c}; }

Eigen::MatrixXd trace_gram(const LieAlgebra& alg) {
  Eigen::MatrixXd G(alg.r, alg.r);
  for (int i = 0; i < alg.r; ++i)
    for (int j = 0; j < alg.r; ++j) G(i, j) = (alg.basis[i] * alg.basis[j]).trace();
  return G;
}

LoopSection sample_loop_section(const LoopGrid& grid, const SmoothMap& coeffs) {
  LoopSection x{Eigen::MatrixXd(grid.N, coeffs.out_dim())};
  for (int j = 0; j < grid.N; ++j) {
    auto v = coeffs(std::vector<double>{grid.node(j)});
    for (int i = 0; i < coeffs.out_dim(); ++i) x.c(j, i) = v[i];
  }
  return x;
}

LoopSection constant_loop_section(const LoopGrid& grid, std::vector<double> coeffs) {
  LoopSection x{Eigen::MatrixXd(grid.N, static_cast<Eigen::Index>(coeffs.size()))};
  for (int j = 0; j < grid.N; ++j)
    for (size_t i = 0; i < coeffs.size(); ++i) x.c(j, static_cast<Eigen::Index>(i)) = coeffs[i];
  return x;
}

LoopSection random_trig_section(const LoopGrid& grid, int r, int degree, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  LoopSection x{Eigen::MatrixXd::Zero(grid.N, r)};
  for (int i = 0; i < r; ++i)
    for (int m = 0; m <= degree; ++m) {
      double a = u(rng), b = m ? u(rng) : 0.0;
      for (int j = 0; j < grid.N; ++j) x.c(j, i) += a * std::cos(m * grid.node(j)) + b * std::sin(m * grid.node(j));
    }
  return x;
}

LoopSection derivative(const LoopGrid& grid, const LoopSection& x) {
  LoopSection d{Eigen::MatrixXd(x.c.rows(), x.c.cols())};
  for (Eigen::Index i = 0; i < x.c.cols(); ++i) d.c.col(i) = grid.derivative(x.c.col(i));
  return d;
}

LoopSection pointwise_bracket(const LieAlgebra& alg, const LoopSection& x, const LoopSection& y) {
  same_grid(x, y);
  const int r = alg.r;
  LoopSection out{Eigen::MatrixXd::Zero(x.N(), r)};
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        double ck = alg.c(k, i, j);
        if (ck != 0.0) out.c.col(k) += ck * x.c.col(i).cwiseProduct(y.c.col(j));
      }
  return out;
}

Eigen::VectorXd nodewise_pairing(const LieAlgebra& alg, const LoopSection& x, const LoopSection& y, Pairing pairing) {
  same_grid(x, y);
  if (pairing == Pairing::Coefficient) return x.c.cwiseProduct(y.c).rowwise().sum();
  Eigen::MatrixXd G = trace_gram(alg);
  return (x.c * G).cwiseProduct(y.c).rowwise().sum();
}

double pairing(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x, const LoopSection& y) {
  return grid.integrate(nodewise_pairing(alg, x, y));
}

double cocycle_beta(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x, const LoopSection& y,
                    Pairing pairing) {
  if (x.N() != grid.N) throw Error(ErrorCode::GridMismatch, "section sampled on another grid");
  return grid.integrate(nodewise_pairing(alg, x, derivative(grid, y), pairing));
}

double cocycle_residual_first(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x,
                              const LoopSection& y, const LoopSection& z, Pairing pairing) {
  return std::abs(cocycle_beta(grid, alg, x, pointwise_bracket(alg, y, z), pairing) +
                  cocycle_beta(grid, alg, y, pointwise_bracket(alg, z, x), pairing) +
                  cocycle_beta(grid, alg, z, pointwise_bracket(alg, x, y), pairing));
}

Eigen::VectorXd rho_hat(const Action& a, const LoopGrid& grid, const LoopSection& x) {
  if (a.p != 1) throw Error(ErrorCode::UnsupportedShape, a.name + ": loop constructions need a one-dimensional base");
  if (x.c.cols() != a.alg.r || x.N() != grid.N) throw Error(ErrorCode::GridMismatch, "section does not fit the action");
  Eigen::VectorXd out(grid.N);
  for (int j = 0; j < grid.N; ++j) {
    double s = grid.node(j);
    Eigen::MatrixXd phi = infinitesimal_matrix(a, std::span<const double>(&s, 1));
    out(j) = phi.row(0).dot(x.c.row(j));
  }
  return out;
}

LoopSection loop_second_bracket(const Action& a, const LoopGrid& grid, const LoopSection& x, const LoopSection& y) {
  LoopSection xs = derivative(grid, x), ys = derivative(grid, y);
  LoopSection lie = scale_rows(rho_hat(a, grid, x), ys) - scale_rows(rho_hat(a, grid, y), xs);
  return a.sign() * lie - pointwise_bracket(a.alg, x, y);
}

double cocycle_residual_second(const Action& a, const LoopGrid& grid, const LoopSection& x, const LoopSection& y,
                               const LoopSection& z, Pairing pairing) {
  auto beta = [&](const LoopSection& u, const LoopSection& v) { return cocycle_beta(grid, a.alg, u, v, pairing); };
  return std::abs(beta(loop_second_bracket(a, grid, y, z), x) + beta(loop_second_bracket(a, grid, z, x), y) +
                  beta(loop_second_bracket(a, grid, x, y), z));
}

LoopSection E_field(const Action& a, const LoopGrid& grid) {
  if (a.p != 1) throw Error(ErrorCode::UnsupportedShape, a.name + ": loop constructions need a one-dimensional base");
  Eigen::MatrixXd G = trace_gram(a.alg);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * std::max(1.0, sv(0)))
    throw Error(ErrorCode::DegeneratePairing, a.alg.name + ": trace pairing is degenerate");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
  LoopSection E{Eigen::MatrixXd(grid.N, a.alg.r)};
  for (int j = 0; j < grid.N; ++j) {
    double s = grid.node(j);
    Eigen::VectorXd phi = infinitesimal_matrix(a, std::span<const double>(&s, 1)).row(0).transpose();
    E.c.row(j) = lu.solve(phi).transpose();
  }
  return E;
}

double E_field_residual(const Action& a, const LoopGrid& grid, const LoopSection& E) {
  Eigen::MatrixXd G = trace_gram(a.alg);
  double worst = 0.0;
  for (int j = 0; j < grid.N; ++j) {
    double s = grid.node(j);
    Eigen::VectorXd phi = infinitesimal_matrix(a, std::span<const double>(&s, 1)).row(0).transpose();
    worst = std::max(worst, (G * E.c.row(j).transpose() - phi).cwiseAbs().maxCoeff());
  }
  return worst;
}

LoopSection ham_vf_first(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X, const LoopSection& a,
                         double r) {
  return pointwise_bracket(alg, X, a) - r * derivative(grid, a);
}

LoopSection ham_vf_second(const Action& act, const LoopGrid& grid, const LoopSection& X, const LoopSection& dF,
                          double r) {
  LoopSection E = effective_E(act, grid);
  LoopSection as = derivative(grid, dF);
  Eigen::VectorXd trE = nodewise_pairing(act.alg, dF, E);
  Eigen::VectorXd trX = nodewise_pairing(act.alg, X, as);
  return ham_vf_first(grid, act.alg, X, dF, r) - derivative(grid, scale_rows(trE, X)) - scale_rows(trX, E);
}

double first_bracket(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X, const LoopSection& dF,
                     const LoopSection& dH, double r) {
  return pairing(grid, alg, X, pointwise_bracket(alg, dF, dH)) + r * cocycle_beta(grid, alg, dF, dH);
}

double second_extended_bracket(const Action& a, const LoopGrid& grid, const LoopSection& X, const LoopSection& dF,
                               const LoopSection& dH, double r) {
  return -pairing(grid, a.alg, X, loop_second_bracket(a, grid, dF, dH)) + r * cocycle_beta(grid, a.alg, dF, dH);
}

double zero_bracket(const Action& a, const LoopGrid& grid, const LoopSection& X0, const LoopSection& dF,
                    const LoopSection& dH, double alpha) {
  return alpha * pairing(grid, a.alg, X0, loop_second_bracket(a, grid, dF, dH));
}

double QuadraticFunctional::value(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X) const {
  LoopSection KX = unflatten(K * flatten(X), X.N(), static_cast<int>(X.c.cols()));
  return 0.5 * pairing(grid, alg, X, KX) + pairing(grid, alg, l, X);
}

LoopSection QuadraticFunctional::gradient(const LoopSection& X) const {
  return unflatten(K * flatten(X), X.N(), static_cast<int>(X.c.cols())) + l;
}

QuadraticFunctional random_quadratic_functional(const LoopGrid& grid, const LieAlgebra& alg, int degree,
                                                std::mt19937_64& rng, double scale) {
  const int r = alg.r, modes = 2 * degree + 1, m = modes * r;
  const Eigen::Index n = static_cast<Eigen::Index>(grid.N) * r;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, m);
  for (int j = 0; j < grid.N; ++j) {
    double s = grid.node(j);
    for (int q = 0; q < modes; ++q) {
      int k = (q + 1) / 2;
      double f = q == 0 ? 1.0 : (q % 2 ? std::cos(k * s) : std::sin(k * s));
      for (int i = 0; i < r; ++i) Q(static_cast<Eigen::Index>(j) * r + i, q * r + i) = f;
    }
  }
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd C = Eigen::MatrixXd::NullaryExpr(m, m, [&] { return u(rng); });
  C = 0.5 * (C + C.transpose()).eval();
  QuadraticFunctional F;
  F.K = Q * C * Q.transpose() * pairing_matrix(grid, trace_gram(alg));
  F.l = random_trig_section(grid, r, degree, rng, scale);
  return F;
}

namespace {

LoopSection field(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec, const LoopSection& X,
                  const LoopSection& dF) {
  switch (spec.kind) {
    case LoopBracket::First: return ham_vf_first(grid, a.alg, X, dF, spec.r);
    case LoopBracket::Second: return ham_vf_second(a, grid, X, dF, spec.r);
    case LoopBracket::Zero: return (-spec.alpha) * ham_vf_second(a, grid, spec.X0, dF, 0.0);
    case LoopBracket::Pencil:
      return (1.0 - spec.k) * ham_vf_second(a, grid, X, dF, spec.r) +
             (-spec.k * spec.alpha) * ham_vf_second(a, grid, spec.X0, dF, 0.0);
  }
  return X;
}

// Derivative of the bracket value in X for fixed variations.
LoopSection linear_part(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec, const LoopSection& dF,
                        const LoopSection& dH) {
  switch (spec.kind) {
    case LoopBracket::First: return pointwise_bracket(a.alg, dF, dH);
    case LoopBracket::Second: return (-1.0) * loop_second_bracket(a, grid, dF, dH);
    case LoopBracket::Zero: return {Eigen::MatrixXd::Zero(dF.c.rows(), dF.c.cols())};
    case LoopBracket::Pencil: return (spec.k - 1.0) * loop_second_bracket(a, grid, dF, dH);
  }
  return dF;
}

}  // namespace

double functional_bracket(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec, const LoopSection& X,
                          const LoopSection& dF, const LoopSection& dH) {
  return pairing(grid, a.alg, field(a, grid, spec, X, dF), dH);
}

double functional_jacobi_residual(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec,
                                  const LoopSection& X, const QuadraticFunctional& F, const QuadraticFunctional& G,
                                  const QuadraticFunctional& H) {
  const int N = X.N(), r = static_cast<int>(X.c.cols());
  auto apply_K = [&](const QuadraticFunctional& Q, const LoopSection& v) { return unflatten(Q.K * flatten(v), N, r); };
  const QuadraticFunctional* fs[3] = {&F, &G, &H};
  LoopSection d[3] = {F.gradient(X), G.gradient(X), H.gradient(X)};
  LoopSection V[3] = {field(a, grid, spec, X, d[0]), field(a, grid, spec, X, d[1]), field(a, grid, spec, X, d[2])};
  double total = 0.0, scale = 0.0;
  for (int c = 0; c < 3; ++c) {
    int i = c, j = (c + 1) % 3, k = (c + 2) % 3;
    double t1 = pairing(grid, a.alg, V[i], linear_part(a, grid, spec, d[j], d[k]));
    double t2 = -pairing(grid, a.alg, V[i], apply_K(*fs[j], V[k]));
    double t3 = pairing(grid, a.alg, V[i], apply_K(*fs[k], V[j]));
    total += t1 + t2 + t3;
    scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3)});
  }
  return std::abs(total) / std::max(scale, 1e-300);
}

}  // namespace algpois
