#include "algpois/lie_core.hpp"

#include <cmath>
#include <regex>

#include <unsupported/Eigen/MatrixFunctions>

#include "algpois/errors.hpp"

namespace algpois {

namespace {

Eigen::MatrixXd flatten(const std::vector<Eigen::MatrixXd>& basis) {
  const auto n2 = basis.front().size();
  Eigen::MatrixXd B(n2, static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k)
    B.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(basis[k].data(), n2);
  return B;
}

Eigen::MatrixXd unit(int n, int i, int j) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

StructureConstants structure_constants(const std::vector<Eigen::MatrixXd>& basis) {
  if (basis.empty()) throw Error(ErrorCode::DimensionMismatch, "empty basis");
  const int r = static_cast<int>(basis.size());
  Eigen::MatrixXd B = flatten(basis);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  qr.setThreshold(1e-10);
  if (qr.rank() != r) throw Error(ErrorCode::DependentBasis, "basis matrices are linearly dependent");

  StructureConstants sc;
  sc.r = r;
  sc.c.assign(static_cast<size_t>(r) * r * r, 0.0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      Eigen::MatrixXd comm = basis[i] * basis[j] - basis[j] * basis[i];
      Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(comm.data(), comm.size());
      Eigen::VectorXd coef = qr.solve(rhs);
      double res = (B * coef - rhs).norm();
      if (res > 1e-10)
        throw Error(ErrorCode::NotClosed, "commutator [v" + std::to_string(i + 1) + ",v" +
                                              std::to_string(j + 1) + "] leaves the span");
      for (int k = 0; k < r; ++k) {
        double v = coef(k);
        // Snap roundoff on integer constants so catalog tables are exact.
        if (std::abs(v - std::round(v)) < 1e-12) v = std::round(v);
        sc.c[(static_cast<size_t>(k) * r + i) * r + j] = v;
      }
    }
  return sc;
}

LieAlgebra LieAlgebra::from_basis(std::string name, std::vector<Eigen::MatrixXd> basis) {
  LieAlgebra alg;
  alg.name = std::move(name);
  alg.n = static_cast<int>(basis.front().rows());
  alg.r = static_cast<int>(basis.size());
  alg.c = structure_constants(basis);
  alg.basis = std::move(basis);
  return alg;
}

Eigen::MatrixXd LieAlgebra::element(std::span<const double> coeffs) const {
  if (static_cast<int>(coeffs.size()) != r) throw Error(ErrorCode::DimensionMismatch, "algebra element");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < r; ++k) m += coeffs[k] * basis[k];
  return m;
}

Eigen::VectorXd LieAlgebra::coordinates(const Eigen::MatrixXd& m, double tol) const {
  Eigen::MatrixXd B = flatten(basis);
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  Eigen::VectorXd coef = B.colPivHouseholderQr().solve(rhs);
  if ((B * coef - rhs).norm() > tol * std::max(1.0, rhs.norm()))
    throw Error(ErrorCode::NotInSpan, "matrix is not in the algebra span of " + name);
  return coef;
}

Eigen::MatrixXd LieAlgebra::commutator(int i, int j) const {
  return basis[i] * basis[j] - basis[j] * basis[i];
}

LieAlgebra semidirect_algebra(const LieAlgebra& alg, int n) {
  if (n != alg.n) throw Error(ErrorCode::DimensionMismatch, "semidirect: R^n must match representation size");
  std::vector<Eigen::MatrixXd> basis;
  for (int j = 0; j < n; ++j) basis.push_back(unit(n + 1, j, n));
  for (const auto& v : alg.basis) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = v;
    basis.push_back(m);
  }
  return LieAlgebra::from_basis("semidirect(" + alg.name + "," + std::to_string(n) + ")", std::move(basis));
}

LieAlgebra catalog_algebra(const std::string& name) {
  auto mat = [](int n, std::initializer_list<double> vals) {
    Eigen::MatrixXd m(n, n);
    auto it = vals.begin();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = *it++;
    return m;
  };
  if (name == "sl2")
    return LieAlgebra::from_basis(name, {mat(2, {1, 0, 0, -1}), mat(2, {0, 1, 0, 0}), mat(2, {0, 0, 1, 0})});
  if (name == "se2")
    return LieAlgebra::from_basis(name, {mat(3, {0, -1, 0, 1, 0, 0, 0, 0, 0}), unit(3, 0, 2), unit(3, 1, 2)});
  if (name == "so3" || name == "so3-mobius") {
    Eigen::MatrixXd vxy = mat(3, {0, -1, 0, 1, 0, 0, 0, 0, 0});
    Eigen::MatrixXd vyz = mat(3, {0, 0, 0, 0, 0, -1, 0, 1, 0});
    Eigen::MatrixXd vzx = mat(3, {0, 0, 1, 0, 0, 0, -1, 0, 0});
    // The nonlinear SO(3) example uses the opposite orientation of the same basis.
    double s = name == "so3" ? 1.0 : -1.0;
    return LieAlgebra::from_basis(name, {s * vxy, s * vyz, s * vzx});
  }
  if (name == "gl1") return LieAlgebra::from_basis(name, {mat(1, {1})});
  if (name == "aff2")
    return LieAlgebra::from_basis(name, {unit(3, 0, 0), unit(3, 0, 1), unit(3, 0, 2), unit(3, 1, 2)});

  static const std::regex trans_re(R"(translation\((\d+)\))");
  static const std::regex semi_re(R"(semidirect\(([a-z0-9-]+),(\d+)\))");
  std::smatch m;
  if (std::regex_match(name, m, trans_re)) {
    int r = std::stoi(m[1]);
    if (r < 1 || r > 7) throw Error(ErrorCode::UnknownAlgebra, name);
    std::vector<Eigen::MatrixXd> basis;
    for (int i = 0; i < r; ++i) basis.push_back(unit(r + 1, i, r));
    return LieAlgebra::from_basis(name, std::move(basis));
  }
  if (std::regex_match(name, m, semi_re)) return semidirect_algebra(catalog_algebra(m[1]), std::stoi(m[2]));
  throw Error(ErrorCode::UnknownAlgebra, name);
}

double closure_residual(const LieAlgebra& alg) {
  double worst = 0.0;
  for (int i = 0; i < alg.r; ++i)
    for (int j = 0; j < alg.r; ++j) {
      Eigen::MatrixXd diff = alg.commutator(i, j);
      for (int k = 0; k < alg.r; ++k) diff -= alg.c(k, i, j) * alg.basis[k];
      worst = std::max(worst, diff.norm());
    }
  return worst;
}

double jacobi_structure_residual(const StructureConstants& c) {
  const int r = c.r;
  double worst = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          double s = 0.0;
          for (int m = 0; m < r; ++m)
            s += c(m, i, j) * c(l, m, k) + c(m, j, k) * c(l, m, i) + c(m, k, i) * c(l, m, j);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

Eigen::MatrixXd lie_poisson_bivector(const LieAlgebra& alg, const Eigen::VectorXd& xi) {
  if (xi.size() != alg.r) throw Error(ErrorCode::DimensionMismatch, "xi length must equal algebra dimension");
  std::vector<double> x(xi.data(), xi.data() + xi.size());
  return lie_poisson_bivector_t<double>(alg.c, x).values();
}

Eigen::MatrixXd coadjoint_infinitesimal(const LieAlgebra& alg, const Eigen::VectorXd& xi) {
  return -lie_poisson_bivector(alg, xi);
}

Eigen::MatrixXd adjoint_matrix(const LieAlgebra& alg, const Eigen::MatrixXd& g) {
  if (g.rows() != alg.n || g.cols() != alg.n) throw Error(ErrorCode::DimensionMismatch, "group element size");
  Eigen::MatrixXd ginv = g.inverse();
  Eigen::MatrixXd Am(alg.r, alg.r);
  for (int i = 0; i < alg.r; ++i) Am.col(i) = alg.coordinates(g * alg.basis[i] * ginv);
  return Am;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x, double t) {
  Eigen::MatrixXd tx = t * x;
  return tx.exp();
}

Eigen::MatrixXd exp_coords(const LieAlgebra& alg, std::span<const double> coeffs, double t) {
  return matrix_exp(alg.element(coeffs), t);
}

double group_constraint_residual(const LieAlgebra& alg, const Eigen::MatrixXd& g) {
  const int n = alg.n;
  auto affine_row = [&](int size) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(size);
    e(size - 1) = 1.0;
    return (g.row(size - 1).transpose() - e).norm();
  };
  if (alg.name == "sl2") return std::abs(g.determinant() - 1.0);
  if (alg.name == "so3" || alg.name == "so3-mobius")
    return (g.transpose() * g - Eigen::MatrixXd::Identity(3, 3)).norm() + std::abs(g.determinant() - 1.0);
  if (alg.name == "se2") {
    Eigen::MatrixXd Q = g.topLeftCorner(2, 2);
    return (Q.transpose() * Q - Eigen::MatrixXd::Identity(2, 2)).norm() + affine_row(3);
  }
  if (alg.name == "gl1") return g(0, 0) > 0 ? 0.0 : 1.0;
  if (alg.name == "aff2") return affine_row(3) + std::abs(g(1, 0)) + std::abs(g(1, 1) - 1.0) + (g(0, 0) > 0 ? 0.0 : 1.0);
  if (alg.name.rfind("translation", 0) == 0)
    return (g.topLeftCorner(n - 1, n - 1) - Eigen::MatrixXd::Identity(n - 1, n - 1)).norm() + affine_row(n);
  if (alg.name.rfind("semidirect", 0) == 0) return affine_row(n);
  return 0.0;
}

}  // namespace algpois
