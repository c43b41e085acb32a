#pragma once

#include <random>
#include <string>
#include <vector>

#include "algpois/action.hpp"

namespace algpois {

// A map M -> g given by its coefficient functions in the algebra basis.
struct Section {
  SmoothMap coeffs;  // z -> (x^1, ..., x^r)
  std::string algebra;

  Eigen::MatrixXd value(const LieAlgebra& alg, std::span<const double> z) const;
};

Section constant_section(const LieAlgebra& alg, int p, std::vector<double> coeffs);

// Sum of monomials prod z_i^{e_i}; exponents are non-negative.
struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;
};
using PolynomialCoeffs = std::vector<std::vector<Monomial>>;  // one list per algebra component

Section polynomial_section(const LieAlgebra& alg, int p, PolynomialCoeffs poly);
Section random_polynomial_section(const LieAlgebra& alg, int p, int degree, std::mt19937_64& rng, double scale = 1.0);

SmoothMap scalar_polynomial(int p, std::vector<Monomial> terms);

Section pointwise_bracket(const LieAlgebra& alg, const Section& x, const Section& y);
// rho(x)(z) = Phi(z) x(z).
SmoothMap anchor(const Action& a, const Section& x);
// Component-wise derivative of y along rho(x).
Section lie_derivative_section(const Action& a, const Section& x, const Section& y);
// Left: L_{rho x} y - L_{rho y} x - [x,y]; right: -L_{rho x} y + L_{rho y} x - [x,y].
Section second_bracket(const Action& a, const Section& x, const Section& y);

// Lie bracket of vector fields [X, Y]^l = X(Y^l) - Y(X^l).
std::vector<double> vector_field_bracket(const SmoothMap& X, const SmoothMap& Y, std::span<const double> z);

using PointSet = std::vector<std::vector<double>>;

// Scrambled Halton points inside the action's sampling box and domain guard.
PointSet sample_points(const Action& a, int count, std::uint64_t seed, double min_margin = 1e-3);

// The anchor of the algebroid is sign * rho with sign = +1 (left) or -1 (right).
double leibniz_residual(const Action& a, const Section& x, const Section& y, const SmoothMap& f, const PointSet& pts);
double anchor_homomorphism_residual(const Action& a, const Section& x, const Section& y, const PointSet& pts);
double jacobi_residual_sections(const Action& a, const Section& x, const Section& y, const Section& z,
                                const PointSet& pts);
double antisymmetry_residual(const Action& a, const Section& x, const Section& y, const PointSet& pts);

}  // namespace algpois
