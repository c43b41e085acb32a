#pragma once

#include <random>
#include <string>

#include "algpois/action.hpp"

namespace algpois {

enum class DerivativeMode { Spectral, FD4 };

// Uniform periodic grid s_j = 2 pi j / N on the circle.
struct LoopGrid {
  int N = 256;
  DerivativeMode mode = DerivativeMode::Spectral;

  explicit LoopGrid(int n = 256, DerivativeMode m = DerivativeMode::Spectral);
  double node(int j) const;
  Eigen::VectorXd nodes() const;
  Eigen::VectorXd derivative(const Eigen::VectorXd& f) const;
  double integrate(const Eigen::VectorXd& f) const;  // trapezoid rule
};

// Algebra coefficients at each node, N x r.
struct LoopSection {
  Eigen::MatrixXd c;
  int N() const { return static_cast<int>(c.rows()); }
};

LoopSection operator+(const LoopSection& a, const LoopSection& b);
LoopSection operator-(const LoopSection& a, const LoopSection& b);
LoopSection operator*(double k, const LoopSection& a);

Eigen::MatrixXd trace_gram(const LieAlgebra& alg);  // tr(v_i v_j)

LoopSection sample_loop_section(const LoopGrid& grid, const SmoothMap& coeffs);
LoopSection constant_loop_section(const LoopGrid& grid, std::vector<double> coeffs);
LoopSection random_trig_section(const LoopGrid& grid, int r, int degree, std::mt19937_64& rng, double scale = 1.0);
LoopSection derivative(const LoopGrid& grid, const LoopSection& x);
LoopSection pointwise_bracket(const LieAlgebra& alg, const LoopSection& x, const LoopSection& y);
// Nodewise scalar tr(x y) (or the coefficient dot product).
enum class Pairing { Trace, Coefficient };
Eigen::VectorXd nodewise_pairing(const LieAlgebra& alg, const LoopSection& x, const LoopSection& y,
                                 Pairing pairing = Pairing::Trace);
double pairing(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x, const LoopSection& y);

// beta(x, y) = int tr(x y_s)
double cocycle_beta(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x, const LoopSection& y,
                    Pairing pairing = Pairing::Trace);
double cocycle_residual_first(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& x,
                              const LoopSection& y, const LoopSection& z, Pairing pairing = Pairing::Trace);

// rho(x) = rhohat(x, s) d/ds for an action on the circle coordinate.
Eigen::VectorXd rho_hat(const Action& a, const LoopGrid& grid, const LoopSection& x);
// sign (rhohat(x) y_s - rhohat(y) x_s) - [x, y]
LoopSection loop_second_bracket(const Action& a, const LoopGrid& grid, const LoopSection& x, const LoopSection& y);
double cocycle_residual_second(const Action& a, const LoopGrid& grid, const LoopSection& x, const LoopSection& y,
                               const LoopSection& z, Pairing pairing = Pairing::Trace);

// rhohat(x, s) = tr(x E(s)); Gram solve per node.
LoopSection E_field(const Action& a, const LoopGrid& grid);
double E_field_residual(const Action& a, const LoopGrid& grid, const LoopSection& E);

// [X, a] - r a_s
LoopSection ham_vf_first(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X, const LoopSection& a,
                         double r = -1.0);
// [X, a] - r a_s - (tr(a E') X)_s - tr(X a_s) E' with E' = -sign E: the Lie-Poisson field of -⟦,⟧ plus r beta.
LoopSection ham_vf_second(const Action& a, const LoopGrid& grid, const LoopSection& X, const LoopSection& dF,
                          double r = -1.0);

// Bracket values computed directly from their definitions.
double first_bracket(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X, const LoopSection& dF,
                     const LoopSection& dH, double r = -1.0);
double second_extended_bracket(const Action& a, const LoopGrid& grid, const LoopSection& X, const LoopSection& dF,
                               const LoopSection& dH, double r = -1.0);
// alpha int tr(X0 ⟦dF, dH⟧)
double zero_bracket(const Action& a, const LoopGrid& grid, const LoopSection& X0, const LoopSection& dF,
                    const LoopSection& dH, double alpha = 1.0);

// F(X) = 1/2 <X, K X> + <l, X> with K = Q C Q^T W mapping into a low-mode subspace; dF = K X + l.
struct QuadraticFunctional {
  Eigen::MatrixXd K;  // (N r) x (N r), node-major flattening
  LoopSection l;
  double value(const LoopGrid& grid, const LieAlgebra& alg, const LoopSection& X) const;
  LoopSection gradient(const LoopSection& X) const;
};
QuadraticFunctional random_quadratic_functional(const LoopGrid& grid, const LieAlgebra& alg, int degree,
                                                std::mt19937_64& rng, double scale = 1.0);

// Pencil (1 - k) {,}_second(r) + k {,}_0(X0, alpha); kind First ignores k and uses the first bracket.
enum class LoopBracket { First, Second, Zero, Pencil };
struct LoopBracketSpec {
  LoopBracket kind = LoopBracket::Second;
  double r = -1.0;
  double k = 0.0;
  double alpha = 1.0;
  LoopSection X0;
};
double functional_bracket(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec, const LoopSection& X,
                          const LoopSection& dF, const LoopSection& dH);
// Relative cyclic sum {F,{G,H}} + cyc at X.
double functional_jacobi_residual(const Action& a, const LoopGrid& grid, const LoopBracketSpec& spec,
                                  const LoopSection& X, const QuadraticFunctional& F, const QuadraticFunctional& G,
                                  const QuadraticFunctional& H);

}  // namespace algpois
