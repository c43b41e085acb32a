#pragma once

#include <string>
#include <vector>

#include "algpois/action.hpp"
#include "algpois/algebroid.hpp"

namespace algpois {

// Bivector on coordinates (z_1..z_p, xi_1..xi_r).
struct PoissonStructure {
  std::string name;
  int p = 0;
  int r = 0;
  SmoothMap lambda;  // point -> dim x dim, row-major

  int dim() const { return p + r; }
  Eigen::MatrixXd at(std::span<const double> x) const;
};

// [[0, Theta], [-Theta^T, Lambda(g*)]] with Theta = sign * Phi.
PoissonStructure assemble(const Action& a);
PoissonStructure block_structure(std::string name, int p, const StructureConstants& c, SmoothMap theta);
PoissonStructure lie_poisson_structure(const LieAlgebra& alg);
PoissonStructure semidirect_lie_poisson(const LieAlgebra& alg, int n);
PoissonStructure pencil(const PoissonStructure& P1, const PoissonStructure& P2, double k);

double bracket(const PoissonStructure& P, const SmoothMap& F, const SmoothMap& H, std::span<const double> x);

// Max |sum_l Lambda_il d_l Lambda_jk + cyclic| over index triples and points.
double jacobi_residual(const PoissonStructure& P, const PointSet& pts);
double antisymmetry_residual(const PoissonStructure& P, const PointSet& pts);

// || D^T Lambda(g^{-1}.z, xi Am(g)) D - Lambda(z, xi) || with D = diag(J^{-T}, Am(g)^{-1}).
double canonical_action_residual(const PoissonStructure& P, const Action& a, const Eigen::MatrixXd& g,
                                 std::span<const double> x);

// Max over i, j, m and points of the commutator of the difference fields X^1_i - X^2_i.
double compatibility_residual(const Action& a1, const Action& a2, const PointSet& z_points);

// Points (z, xi): z from the action's sampler, xi uniform in [-xi_scale, xi_scale]^r.
PointSet sample_phase_points(const Action& a, int count, std::uint64_t seed, double xi_scale = 2.0);

// Action with Phi replaced by Phi + amplitude * z_1^2 in the first column (negative control).
Action corrupted_action(const Action& a, double amplitude = 0.5);

}  // namespace algpois
