#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "algpois/smooth_map.hpp"

namespace algpois {

// Scalar expressions in named variables: + - * / ^int, parentheses, numbers,
// sin cos exp log sqrt. Parsed once, evaluated at any derivative depth.
struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Fn } kind;
  double value = 0.0;
  int index = 0;  // variable index, exponent, or function id
  ExprPtr a, b;
};

ExprPtr parse_expression(const std::string& text, const std::map<std::string, int>& vars);

template <class S>
S eval_expression(const ExprNode& n, std::span<const S> x) {
  switch (n.kind) {
    case ExprNode::Num: return S(n.value);
    case ExprNode::Var: return x[n.index];
    case ExprNode::Neg: return -eval_expression<S>(*n.a, x);
    case ExprNode::Add: return eval_expression<S>(*n.a, x) + eval_expression<S>(*n.b, x);
    case ExprNode::Sub: return eval_expression<S>(*n.a, x) - eval_expression<S>(*n.b, x);
    case ExprNode::Mul: return eval_expression<S>(*n.a, x) * eval_expression<S>(*n.b, x);
    case ExprNode::Div: return eval_expression<S>(*n.a, x) / eval_expression<S>(*n.b, x);
    case ExprNode::Pow: return ipow(eval_expression<S>(*n.a, x), n.index);
    case ExprNode::Fn: {
      S v = eval_expression<S>(*n.a, x);
      switch (n.index) {
        case 0: return sin(v);
        case 1: return cos(v);
        case 2: return exp(v);
        case 3: return log(v);
        default: return sqrt(v);
      }
    }
  }
  return S(0.0);
}

// Variables z1..zp, xi1..xir, plus any aliases (name -> index).
std::map<std::string, int> phase_variables(int p, int r, const std::map<std::string, int>& aliases = {});

SmoothMap expression_map(const std::string& text, const std::map<std::string, int>& vars, int dim);

// Named Hamiltonians and their expressions.
struct HamiltonianPreset {
  std::string name;
  std::string action;  // action whose phase space the expression lives on
  std::string text;
  std::string note;
};
const std::vector<HamiltonianPreset>& hamiltonian_presets();
const HamiltonianPreset& hamiltonian_preset(const std::string& name);

// Aliases for the coordinates of a catalog action (x, y, u, u_v, sa, ...).
std::map<std::string, int> action_aliases(const std::string& action);

// Preset name or expression text on the phase space of the given action.
SmoothMap hamiltonian(const std::string& spec, const std::string& action, int p, int r);

}  // namespace algpois
