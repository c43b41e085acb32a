#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "algpois/lie_core.hpp"
#include "algpois/smooth_map.hpp"

namespace algpois {

enum class Parity { Left, Right };

inline double parity_sign(Parity p) { return p == Parity::Left ? 1.0 : -1.0; }

// Positive inside the domain; the action is treated as undefined where margin < 1e-8.
using DomainMargin = std::function<double(const Eigen::MatrixXd& g, std::span<const double> z)>;

struct Action {
  std::string name;
  LieAlgebra alg;
  int p = 0;
  Parity parity = Parity::Left;
  // (g row-major n*n, z) -> g.z; empty when only infinitesimals are known.
  SmoothMap act;
  // z -> Phi(z), row-major p x r.
  SmoothMap phi;
  DomainMargin margin;
  std::vector<std::pair<double, double>> box;  // sampling region for z
  std::string note;

  bool has_action() const { return static_cast<bool>(act); }
  double sign() const { return parity_sign(parity); }
};

// Phi column k = d/dt|0 act(I + t v_k, z).
SmoothMap phi_from_action(const SmoothMap& act, const LieAlgebra& alg, int p);

Eigen::MatrixXd infinitesimal_matrix(const Action& a, std::span<const double> z);

template <class S>
Mat<S> phi_at(const Action& a, std::span<const S> z) {
  Mat<S> m(a.p, a.alg.r);
  a.phi.eval<S>(z, m.a);
  return m;
}

std::vector<double> apply(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z);

// The point whose image under g carries the equivariance identity: g^{-1}.z for
// left actions, act(g, z) for right actions.
std::vector<double> pullback_point(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z);
Eigen::MatrixXd pullback_jacobian(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z);

double identity_residual(const Action& a, std::span<const double> z);
double composition_residual(const Action& a, const Eigen::MatrixXd& g, const Eigen::MatrixXd& h,
                            std::span<const double> z);
double equivariance_residual(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z);
// Sup over random c of |Phi(z) c - d/dt exp(t sum c_k v_k).z|.
double linearity_residual(const Action& a, std::span<const double> z, std::span<const double> c);

// g.z := act(g^{-1}, z); turns a right action into a left one (and back).
Action convert_parity(const Action& a);

Action prolong(const Action& base, int order);

Action catalog_action(const std::string& name);
std::vector<std::string> catalog_action_names();

// Sampling.
Eigen::MatrixXd random_group_element(const LieAlgebra& alg, std::mt19937_64& rng, double scale = 0.5);
std::vector<double> sample_point(const Action& a, std::mt19937_64& rng, double min_margin = 1e-3);
// Samples (g, z) with both g.z and g^{-1}.z inside the domain.
std::pair<Eigen::MatrixXd, std::vector<double>> sample_pair(const Action& a, std::mt19937_64& rng,
                                                             double scale = 0.5);

bool in_domain(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z, double min_margin = 1e-8);

}  // namespace algpois
