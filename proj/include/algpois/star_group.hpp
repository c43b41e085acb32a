#pragma once

#include <functional>
#include <memory>

#include "algpois/algebroid.hpp"

namespace algpois {

// Section s -> G, evaluated pointwise.
struct GroupSection {
  std::function<Eigen::MatrixXd(std::span<const double>)> map;
  Eigen::MatrixXd operator()(std::span<const double> s) const { return map(s); }
};

GroupSection unit_section(const Action& a);
GroupSection constant_group_section(Eigen::MatrixXd g0);
// s -> exp(eps x(s))
GroupSection exp_section(const Action& a, const Section& x, double eps);

// lambda(g, s): the action on M (left: g.s, right: s.g).
std::vector<double> act_point(const Action& a, const Eigen::MatrixXd& g, std::span<const double> s);

// Left: g(lambda(h(s), s)) h(s). Right: g(s) h(lambda(g(s), s)).
GroupSection star_product(const Action& a, const GroupSection& g, const GroupSection& h);

struct StarInverseOptions {
  int max_iter = 50;
  double tol = 1e-14;
};
// Per-point solve of lambda(g(w), w) = s, then g^{*-1}(s) = g(w)^{-1}.
GroupSection star_inverse(const Action& a, const GroupSection& g, StarInverseOptions opt = {});

// sup over points of max(|g - e|, |Dg|) (Dg by central differences).
double c1_distance(const Action& a, const GroupSection& g, const PointSet& pts);
void require_near_unit(const Action& a, const GroupSection& g, const PointSet& pts, double threshold = 0.2);

double unit_residual(const Action& a, const GroupSection& g, const PointSet& pts);
double associativity_residual(const Action& a, const GroupSection& g, const GroupSection& h, const GroupSection& f,
                              const PointSet& pts);
// sigma(g, s) = lambda(g(s), s); left: sigma(g*h) = sigma(g) o sigma(h), right: sigma(h) o sigma(g).
double action_property_residual(const Action& a, const GroupSection& g, const GroupSection& h, const PointSet& pts);
double inverse_residual(const Action& a, const GroupSection& g, const PointSet& pts, StarInverseOptions opt = {});

// d^2/(d eps d delta) of exp(eps x) * exp(delta y) * exp(eps x)^{*-1} at s, as algebra coordinates.
// Mixed central difference with step eps; one Richardson level when requested.
std::vector<double> bracket_from_conjugation(const Action& a, const Section& x, const Section& y,
                                             std::span<const double> s, double eps, bool richardson = true);
// max over points of | bracket_from_conjugation + second_bracket(x, y) |.
double conjugation_bracket_error(const Action& a, const Section& x, const Section& y, const PointSet& pts, double eps,
                                 bool richardson = true);

}  // namespace algpois
