#include "algpois/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace algpois {

namespace {

class Parser {
 public:
  Parser(const std::string& s, const std::map<std::string, int>& vars) : s_(s), vars_(vars) {}

  ExprPtr run() {
    auto e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  const std::map<std::string, int>& vars_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static ExprPtr node(ExprNode::Kind k, ExprPtr a = nullptr, ExprPtr b = nullptr, double v = 0.0, int i = 0) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = v;
    n->index = i;
    return n;
  }

  ExprPtr sum() {
    auto e = product();
    for (;;) {
      if (eat('+')) e = node(ExprNode::Add, e, product());
      else if (eat('-')) e = node(ExprNode::Sub, e, product());
      else return e;
    }
  }
  ExprPtr product() {
    auto e = unary();
    for (;;) {
      if (eat('*')) e = node(ExprNode::Mul, e, unary());
      else if (eat('/')) e = node(ExprNode::Div, e, unary());
      else return e;
    }
  }
  ExprPtr unary() {
    if (eat('-')) return node(ExprNode::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  ExprPtr power() {
    auto e = primary();
    if (eat('^')) {
      skip();
      bool neg = eat('-');
      if (!neg) eat('+');
      skip();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected");
      int k = std::stoi(s_.substr(start, pos_ - start));
      e = node(ExprNode::Pow, e, nullptr, 0.0, neg ? -k : k);
    }
    return e;
  }
  ExprPtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = sum();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return node(ExprNode::Num, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      static const std::map<std::string, int> fns{{"sin", 0}, {"cos", 1}, {"exp", 2}, {"log", 3}, {"sqrt", 4}};
      if (auto f = fns.find(id); f != fns.end()) {
        if (!eat('(')) fail("'(' expected after " + id);
        auto e = sum();
        if (!eat(')')) fail("')' expected");
        return node(ExprNode::Fn, e, nullptr, 0.0, f->second);
      }
      if (id == "pi") return node(ExprNode::Num, nullptr, nullptr, std::numbers::pi);
      auto v = vars_.find(id);
      if (v == vars_.end()) {
        pos_ = start;
        fail("unknown variable '" + id + "'");
      }
      return node(ExprNode::Var, nullptr, nullptr, 0.0, v->second);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

ExprPtr parse_expression(const std::string& text, const std::map<std::string, int>& vars) {
  return Parser(text, vars).run();
}

std::map<std::string, int> phase_variables(int p, int r, const std::map<std::string, int>& aliases) {
  std::map<std::string, int> v;
  for (int i = 0; i < p; ++i) v["z" + std::to_string(i + 1)] = i;
  for (int i = 0; i < r; ++i) v["xi" + std::to_string(i + 1)] = p + i;
  for (const auto& [k, i] : aliases) v[k] = i;
  return v;
}

SmoothMap expression_map(const std::string& text, const std::map<std::string, int>& vars, int dim) {
  ExprPtr e = parse_expression(text, vars);
  return SmoothMap(dim, 1, [e](auto x, auto out) {
    using S = typename decltype(out)::value_type;
    out[0] = eval_expression<S>(*e, x);
  });
}

const std::vector<HamiltonianPreset>& hamiltonian_presets() {
  static const std::vector<HamiltonianPreset> presets{
      {"fig1", "so3-mobius", "(x^2 + y^2)/5 + 2*xi1^2 - xi2^2 + 3*xi3^2", "sphere-to-plane so(3) structure"},
      {"fig1-lp-quadratic", "so3-trivial", "2*xi1^2 - xi2^2 + 3*xi3^2", "Lie-Poisson comparison, quadratic"},
      {"fig1-lp-cubic", "so3-trivial", "2*xi1*xi2 - xi3^3", "Lie-Poisson comparison, cubic"},
      {"fig2-sigma", "sl2-frame", "(sa^-4 + sb^2/sa^2 + 4*sc^2/sa^6)/5 + xi1^2 + xi2^2 + xi3^2",
       "frame coordinates"},
      {"fig2-jet", "sl2-prolonged-3", "(u^2 + u_v^2 + u_vv^2)/5 + xi1^2 + xi2^2 + xi3^2", "jet coordinates"},
      {"fig2-lp", "sl2-trivial", "xi1^2 + xi2^2 + xi3^2", "Lie-Poisson comparison"},
      {"kappa1", "sl2-tangent", "4*xi1^2 + xi2*xi3", "literal form; not coadjoint invariant in this basis"},
      {"kappa1-corrected", "sl2-tangent", "xi1^2 + 4*xi2*xi3", "coadjoint invariant of sl(2)"},
      {"kappa2", "sl2-tangent", "(u^2*xi2 - u*xi1 - xi3)/v", ""},
      {"oscillator", "translation-1", "(z1^2 + xi1^2)/2", "harmonic oscillator"},
  };
  return presets;
}

const HamiltonianPreset& hamiltonian_preset(const std::string& name) {
  for (const auto& h : hamiltonian_presets())
    if (h.name == name) return h;
  throw Error(ErrorCode::ConfigError, "unknown Hamiltonian preset '" + name + "'");
}

std::map<std::string, int> action_aliases(const std::string& action) {
  if (action.rfind("so3-mobius", 0) == 0 || action == "se2-linear" || action.rfind("aff2", 0) == 0)
    return {{"x", 0}, {"y", 1}};
  if (action == "so3-linear" || action == "so3-contragredient") return {{"x", 0}, {"y", 1}, {"w", 2}};
  if (action == "sl2-contragredient") return {{"x", 0}, {"y", 1}};
  if (action.rfind("sl2-projective", 0) == 0) return {{"u", 0}};
  if (action == "sl2-tangent") return {{"u", 0}, {"v", 1}};
  if (action == "sl2-frame") return {{"sa", 0}, {"sb", 1}, {"sc", 2}};
  if (action == "sl2-prolonged") return {{"u", 0}, {"u_v", 1}, {"u_vv", 2}};
  if (action == "sl2-prolonged-3") return {{"u", 0}, {"u_v", 1}, {"u_vv", 2}, {"u_vvv", 3}};
  return {};
}

SmoothMap hamiltonian(const std::string& spec, const std::string& action, int p, int r) {
  std::string text = spec;
  for (const auto& h : hamiltonian_presets())
    if (h.name == spec) text = h.text;
  return expression_map(text, phase_variables(p, r, action_aliases(action)), p + r);
}

}  // namespace algpois
