#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "algpois/small_matrix.hpp"

namespace algpois {

// c[(k*r + i)*r + j] = c^k_ij with [v_i, v_j] = sum_k c^k_ij v_k.
struct StructureConstants {
  int r = 0;
  std::vector<double> c;
  double operator()(int k, int i, int j) const { return c[(static_cast<size_t>(k) * r + i) * r + j]; }
};

StructureConstants structure_constants(const std::vector<Eigen::MatrixXd>& basis);

struct LieAlgebra {
  std::string name;
  int n = 0;  // matrix size
  int r = 0;  // dimension
  std::vector<Eigen::MatrixXd> basis;
  StructureConstants c;

  static LieAlgebra from_basis(std::string name, std::vector<Eigen::MatrixXd> basis);

  Eigen::MatrixXd element(std::span<const double> coeffs) const;
  // Least-squares coefficients of m in the basis; throws NotInSpan above tol.
  Eigen::VectorXd coordinates(const Eigen::MatrixXd& m, double tol = 1e-10) const;
  Eigen::MatrixXd commutator(int i, int j) const;
};

// Catalog names: sl2, se2, so3, so3-mobius, aff2, gl1, translation(r), semidirect(sl2,n), semidirect(so3,n).
LieAlgebra catalog_algebra(const std::string& name);
LieAlgebra semidirect_algebra(const LieAlgebra& alg, int n);

double closure_residual(const LieAlgebra& alg);
double jacobi_structure_residual(const StructureConstants& c);

Eigen::MatrixXd lie_poisson_bivector(const LieAlgebra& alg, const Eigen::VectorXd& xi);
Eigen::MatrixXd coadjoint_infinitesimal(const LieAlgebra& alg, const Eigen::VectorXd& xi);

template <class S>
Mat<S> lie_poisson_bivector_t(const StructureConstants& c, std::span<const S> xi) {
  const int r = c.r;
  Mat<S> L(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) {
        double ck = c(k, i, j);
        if (ck != 0.0) L(i, j) += ck * xi[k];
      }
  return L;
}

Eigen::MatrixXd adjoint_matrix(const LieAlgebra& alg, const Eigen::MatrixXd& g);
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x, double t = 1.0);
Eigen::MatrixXd exp_coords(const LieAlgebra& alg, std::span<const double> coeffs, double t = 1.0);

// Group-constraint residual for catalog groups (det = 1, orthogonality, ...).
double group_constraint_residual(const LieAlgebra& alg, const Eigen::MatrixXd& g);

}  // namespace algpois
