#include "algpois/action.hpp"

#include <cmath>
#include <numbers>
#include <regex>

namespace algpois {

namespace {

template <class S>
Mat<S> read_group(std::span<const S> in, int n) {
  Mat<S> g(n, n);
  for (int i = 0; i < n * n; ++i) g.a[i] = in[i];
  return g;
}

// f(const Mat<S>& g, std::span<const S> z, std::span<S> out)
template <class F>
SmoothMap make_act(int n, int p, F f) {
  return SmoothMap(n * n + p, p, [n, f](auto in, auto out) {
    using S = typename decltype(out)::value_type;
    Mat<S> g = read_group<S>(in, n);
    f(g, in.subspan(static_cast<size_t>(n) * n), out);
  });
}

std::vector<double> flat(const Eigen::MatrixXd& g) {
  std::vector<double> v(static_cast<size_t>(g.size()));
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) v[static_cast<size_t>(i) * g.cols() + j] = g(i, j);
  return v;
}

std::vector<double> concat(const std::vector<double>& a, std::span<const double> b) {
  std::vector<double> v = a;
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

double one_margin(const Eigen::MatrixXd&, std::span<const double>) { return 1.0; }

// z' = first p rows of g (z, 1) or g (z, 0).
SmoothMap affine_act(int n, int p, double homogeneous) {
  return make_act(n, p, [n, p, homogeneous](const auto& g, auto z, auto out) {
    for (int i = 0; i < p; ++i) {
      auto acc = g(i, n - 1) * homogeneous;
      for (int j = 0; j < p; ++j) acc += g(i, j) * z[j];
      out[i] = acc;
    }
  });
}

SmoothMap linear_act(int n) {
  return make_act(n, n, [n](const auto& g, auto z, auto out) {
    for (int i = 0; i < n; ++i) {
      auto acc = g(i, 0) * z[0];
      for (int j = 1; j < n; ++j) acc += g(i, j) * z[j];
      out[i] = acc;
    }
  });
}

SmoothMap contragredient_act(int n) {
  return make_act(n, n, [n](const auto& g, auto z, auto out) {
    auto gi = inverse(g);
    for (int i = 0; i < n; ++i) {
      auto acc = gi(0, i) * z[0];
      for (int j = 1; j < n; ++j) acc += gi(j, i) * z[j];
      out[i] = acc;
    }
  });
}

SmoothMap trivial_act(int n, int p) {
  return make_act(n, p, [p](const auto&, auto z, auto out) {
    for (int i = 0; i < p; ++i) out[i] = z[i];
  });
}

Action finish(Action a) {
  if (a.has_action()) a.phi = phi_from_action(a.act, a.alg, a.p);
  if (!a.margin) a.margin = one_margin;
  return a;
}

std::vector<std::pair<double, double>> cube(int p, double lo, double hi) {
  return std::vector<std::pair<double, double>>(p, {lo, hi});
}

// Jet coordinates as a truncated Taylor series in nested duals sharing one direction.
template <class T, class S>
T make_jet(std::span<const S> u, size_t k) {
  if constexpr (std::is_same_v<T, S>) {
    return u[k];
  } else {
    using Inner = decltype(T{}.v);
    return T(make_jet<Inner, S>(u, k), make_jet<Inner, S>(u, k + 1));
  }
}

template <class S, class T>
S strip(const T& x) {
  if constexpr (std::is_same_v<T, S>) return x;
  else return strip<S>(x.v);
}

template <class S, int N> struct NestN { using type = Dual<typename NestN<S, N - 1>::type>; };
template <class S> struct NestN<S, 0> { using type = S; };

// g.u_{(n+1)v} = D_v(g.u_{(nv)}) / D_v(g.v)
template <class S, class T>
void prolong_rec(const T& gu, const T& gv, S* out) {
  out[0] = strip<S>(gu);
  if constexpr (!std::is_same_v<T, S>) prolong_rec<S>(gu.d / gv.d, gv.v, out + 1);
}

template <int N>
SmoothMap prolonged_act(const SmoothMap& base, int n, int base_p) {
  const int p_out = base_p == 1 ? N + 1 : N + 2;
  return SmoothMap(n * n + p_out, p_out, [base, n, base_p](auto in, auto out) {
    using S = typename decltype(out)::value_type;
    if constexpr (depth_v<S> + N > kMaxDepth) {
      throw Error(ErrorCode::DepthExceeded, "prolonged action needs deeper nesting");
    } else {
      using T = typename NestN<S, N>::type;
      const size_t nn = static_cast<size_t>(n) * n;
      std::vector<T> bin(nn + base_p);
      for (size_t i = 0; i < nn; ++i) bin[i] = lift<T>(in[i]);
      std::vector<S> vjet(N + 1, S(0.0));
      vjet[0] = base_p == 2 ? in[nn] : S(0.0);
      if constexpr (N >= 1) vjet[1] = S(1.0);
      T vT = make_jet<T, S>(std::span<const S>(vjet), 0);
      auto jet = in.subspan(nn + (base_p == 2 ? 1 : 0), N + 1);
      if (base_p == 2) bin[nn] = vT;
      bin[nn + base_p - 1] = make_jet<T, S>(jet, 0);
      std::vector<T> bout(base_p);
      base.eval<T>(bin, bout);
      T gv = base_p == 2 ? bout[0] : vT;
      S* o = out.data();
      if (base_p == 2) *o++ = strip<S>(gv);
      prolong_rec<S>(bout[base_p - 1], gv, o);
    }
  });
}

Action sl2_projective_family(const std::string& name) {
  Action a;
  a.name = name;
  a.alg = catalog_algebra("sl2");
  a.p = 1;
  a.box = {{-1.5, 1.5}};
  if (name == "sl2-projective") {
    a.act = make_act(2, 1, [](const auto& g, auto z, auto out) {
      out[0] = (g(0, 0) * z[0] + g(0, 1)) / (g(1, 0) * z[0] + g(1, 1));
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> z) { return std::abs(g(1, 0) * z[0] + g(1, 1)); };
  } else if (name == "sl2-projective-dual") {
    // Projective action of g^{-T}.
    a.act = make_act(2, 1, [](const auto& g, auto z, auto out) {
      out[0] = (g(1, 1) * z[0] - g(1, 0)) / (g(0, 0) - g(0, 1) * z[0]);
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> z) { return std::abs(g(0, 0) - g(0, 1) * z[0]); };
  } else {
    a.parity = Parity::Right;
    a.act = make_act(2, 1, [](const auto& g, auto z, auto out) {
      out[0] = (g(1, 1) * z[0] - g(0, 1)) / (g(0, 0) - g(1, 0) * z[0]);
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> z) { return std::abs(g(0, 0) - g(1, 0) * z[0]); };
  }
  return finish(a);
}

}  // namespace

SmoothMap phi_from_action(const SmoothMap& act, const LieAlgebra& alg, int p) {
  const int n = alg.n, r = alg.r;
  std::vector<std::vector<double>> basis;
  for (const auto& v : alg.basis) basis.push_back(flat(v));
  std::vector<double> id = flat(Eigen::MatrixXd::Identity(n, n));
  return SmoothMap(p, p * r, [act, basis, id, n, p, r](auto z, auto out) {
    using S = typename decltype(out)::value_type;
    if constexpr (depth_v<S> >= kMaxDepth) {
      throw Error(ErrorCode::DepthExceeded, "infinitesimal matrix beyond supported depth");
    } else {
      using D = Dual<S>;
      const size_t nn = static_cast<size_t>(n) * n;
      std::vector<D> in(nn + p), res(p);
      for (int l = 0; l < p; ++l) in[nn + l] = D(z[l], S(0.0));
      for (int k = 0; k < r; ++k) {
        for (size_t i = 0; i < nn; ++i) in[i] = D(S(id[i]), S(basis[k][i]));
        act.eval<D>(in, res);
        for (int l = 0; l < p; ++l) out[static_cast<size_t>(l) * r + k] = res[l].d;
      }
    }
  });
}

bool in_domain(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z, double min_margin) {
  return !a.margin || a.margin(g, z) >= min_margin;
}

Eigen::MatrixXd infinitesimal_matrix(const Action& a, std::span<const double> z) {
  if (static_cast<int>(z.size()) != a.p) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  if (!in_domain(a, Eigen::MatrixXd::Identity(a.alg.n, a.alg.n), z))
    throw Error(ErrorCode::OutOfDomain, a.name + ": point outside the domain guard");
  return phi_at<double>(a, z).values();
}

std::vector<double> apply(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z) {
  if (!a.has_action()) throw Error(ErrorCode::UnsupportedShape, a.name + " has no closed-form action");
  if (!in_domain(a, g, z)) throw Error(ErrorCode::OutOfDomain, a.name + ": g.z undefined");
  return a.act(concat(flat(g), z));
}

std::vector<double> pullback_point(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z) {
  return a.parity == Parity::Left ? apply(a, g.inverse(), z) : apply(a, g, z);
}

Eigen::MatrixXd pullback_jacobian(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z) {
  Eigen::MatrixXd h = a.parity == Parity::Left ? Eigen::MatrixXd(g.inverse()) : g;
  if (!in_domain(a, h, z)) throw Error(ErrorCode::OutOfDomain, a.name + ": pulled-back point undefined");
  std::vector<double> gf = flat(h);
  const size_t nn = gf.size();
  std::vector<R<1>> in(nn + a.p), out(a.p);
  for (size_t i = 0; i < nn; ++i) in[i] = R<1>(gf[i]);
  Eigen::MatrixXd J(a.p, a.p);
  for (int j = 0; j < a.p; ++j) {
    for (int l = 0; l < a.p; ++l) in[nn + l] = R<1>(z[l], l == j ? 1.0 : 0.0);
    a.act.eval<R<1>>(in, out);
    for (int i = 0; i < a.p; ++i) J(i, j) = out[i].d;
  }
  return J;
}

double identity_residual(const Action& a, std::span<const double> z) {
  auto w = apply(a, Eigen::MatrixXd::Identity(a.alg.n, a.alg.n), z);
  double worst = 0.0;
  for (int i = 0; i < a.p; ++i) worst = std::max(worst, std::abs(w[i] - z[i]));
  return worst;
}

double composition_residual(const Action& a, const Eigen::MatrixXd& g, const Eigen::MatrixXd& h,
                            std::span<const double> z) {
  auto gz = apply(a, g, z);
  auto hgz = apply(a, h, gz);
  Eigen::MatrixXd prod = a.parity == Parity::Left ? Eigen::MatrixXd(h * g) : Eigen::MatrixXd(g * h);
  auto direct = apply(a, prod, z);
  double worst = 0.0;
  for (int i = 0; i < a.p; ++i) worst = std::max(worst, std::abs(hgz[i] - direct[i]));
  return worst;
}

double equivariance_residual(const Action& a, const Eigen::MatrixXd& g, std::span<const double> z) {
  auto w = pullback_point(a, g, z);
  Eigen::MatrixXd J = pullback_jacobian(a, g, z);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularJacobian, a.name + ": pull-back Jacobian is singular");
  Eigen::MatrixXd lhs = lu.solve(infinitesimal_matrix(a, w));
  Eigen::MatrixXd rhs = infinitesimal_matrix(a, z) * adjoint_matrix(a.alg, g);
  return (lhs - rhs).norm();
}

double linearity_residual(const Action& a, std::span<const double> z, std::span<const double> c) {
  Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
  Eigen::VectorXd lhs = infinitesimal_matrix(a, z) * cv;
  Eigen::MatrixXd x = a.alg.element(c);
  std::vector<double> id = flat(Eigen::MatrixXd::Identity(a.alg.n, a.alg.n));
  std::vector<double> xf = flat(x);
  std::vector<R<1>> in(id.size() + a.p), out(a.p);
  for (size_t i = 0; i < id.size(); ++i) in[i] = R<1>(id[i], xf[i]);
  for (int l = 0; l < a.p; ++l) in[id.size() + l] = R<1>(z[l]);
  a.act.eval<R<1>>(in, out);
  double worst = 0.0;
  for (int l = 0; l < a.p; ++l) worst = std::max(worst, std::abs(out[l].d - lhs(l)));
  return worst;
}

Action convert_parity(const Action& a) {
  Action b = a;
  b.name = a.name + "-converted";
  b.parity = a.parity == Parity::Left ? Parity::Right : Parity::Left;
  if (a.has_action()) {
    const int n = a.alg.n;
    SmoothMap base = a.act;
    b.act = make_act(n, a.p, [base, n](const auto& g, auto z, auto out) {
      using S = typename decltype(out)::value_type;
      auto gi = inverse(g);
      std::vector<S> in(gi.a);
      in.insert(in.end(), z.begin(), z.end());
      base.eval<S>(in, out);
    });
    b.phi = phi_from_action(b.act, b.alg, b.p);
    DomainMargin m = a.margin;
    b.margin = [m](const Eigen::MatrixXd& g, std::span<const double> z) { return m(g.inverse(), z); };
  } else {
    SmoothMap base = a.phi;
    b.phi = SmoothMap(a.p, a.phi.out_dim(), [base](auto z, auto out) {
      base.eval<typename decltype(out)::value_type>(z, out);
      for (auto& v : out) v = -v;
    });
  }
  return b;
}

Action prolong(const Action& base, int order) {
  if (!base.has_action()) throw Error(ErrorCode::UnsupportedShape, "prolongation needs a closed-form action");
  if (base.p != 1 && base.p != 2)
    throw Error(ErrorCode::UnsupportedShape, "prolongation needs p = 1 (implicit v) or p = 2 with invariant v");
  if (order < 1 || order > 3) throw Error(ErrorCode::UnsupportedShape, "prolongation order must be 1..3");
  if (base.p == 2) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 8; ++t) {
      auto [g, z] = sample_pair(base, rng);
      if (std::abs(apply(base, g, z)[0] - z[0]) > 1e-12)
        throw Error(ErrorCode::UnsupportedShape, base.name + ": first coordinate is not invariant");
    }
  }
  Action a;
  a.name = base.name + "-prolonged-" + std::to_string(order);
  a.alg = base.alg;
  a.parity = base.parity;
  a.p = (base.p == 1 ? 1 : 2) + order;
  const int n = base.alg.n;
  switch (order) {
    case 1: a.act = prolonged_act<1>(base.act, n, base.p); break;
    case 2: a.act = prolonged_act<2>(base.act, n, base.p); break;
    default: a.act = prolonged_act<3>(base.act, n, base.p); break;
  }
  DomainMargin m = base.margin;
  const int bp = base.p;
  a.margin = [m, bp](const Eigen::MatrixXd& g, std::span<const double> z) { return m(g, z.subspan(0, bp)); };
  a.box = base.box;
  a.box.emplace_back(0.5, 2.0);
  for (int k = 2; k <= order; ++k) a.box.emplace_back(-1.0, 1.0);
  return finish(a);
}

std::vector<std::string> catalog_action_names() {
  return {"sl2-projective", "sl2-projective-dual", "sl2-projective-right", "sl2-tangent", "sl2-circle",
          "sl2-contragredient", "sl2-frame", "sl2-prolonged", "sl2-prolonged-3", "sl2-trivial",
          "se2-linear", "se2-trivial", "so3-linear", "so3-contragredient", "so3-mobius", "so3-trivial",
          "translation-1", "translation-2", "translation-3", "aff2-linear", "aff2-affine",
          "scalar-translation"};
}

Action catalog_action(const std::string& name) {
  static const std::regex trans_re(R"(translation-(\d+))");
  std::smatch match;
  if (name == "sl2-projective" || name == "sl2-projective-dual" || name == "sl2-projective-right")
    return sl2_projective_family(name);
  if (name == "sl2-projective-on-s") {
    Action a = sl2_projective_family("sl2-projective");
    a.name = name;
    return a;
  }
  Action a;
  a.name = name;
  if (name == "sl2-tangent") {
    a.alg = catalog_algebra("sl2");
    a.p = 2;
    a.act = make_act(2, 2, [](const auto& g, auto z, auto out) {
      auto den = g(1, 0) * z[0] + g(1, 1);
      out[0] = (g(0, 0) * z[0] + g(0, 1)) / den;
      out[1] = z[1] / (den * den);
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> z) { return std::abs(g(1, 0) * z[0] + g(1, 1)); };
    a.box = {{-1.5, 1.5}, {0.5, 2.0}};
    return finish(a);
  }
  if (name == "sl2-circle") {
    a.alg = catalog_algebra("sl2");
    a.p = 1;
    a.act = make_act(2, 1, [](const auto& g, auto z, auto out) {
      auto c2 = cos(0.5 * z[0]);
      auto s2 = sin(0.5 * z[0]);
      auto qx = g(1, 1) * c2 + g(1, 0) * s2;
      auto qy = g(0, 1) * c2 + g(0, 0) * s2;
      out[0] = z[0] + 2.0 * atan2(c2 * qy - s2 * qx, c2 * qx + s2 * qy);
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> z) {
      double c2 = std::cos(0.5 * z[0]), s2 = std::sin(0.5 * z[0]);
      double qx = g(1, 1) * c2 + g(1, 0) * s2, qy = g(0, 1) * c2 + g(0, 0) * s2;
      return (c2 * qx + s2 * qy) / std::hypot(qx, qy);
    };
    a.box = {{0.0, 2.0 * std::numbers::pi}};
    a.note = "projective action transported to the circle by u = tan(s/2)";
    return finish(a);
  }
  if (name == "sl2-contragredient" || name == "so3-contragredient") {
    a.alg = catalog_algebra(name.substr(0, 3));
    a.p = a.alg.n;
    a.act = contragredient_act(a.alg.n);
    a.box = cube(a.p, -2.0, 2.0);
    return finish(a);
  }
  if (name == "sl2-frame") {
    a.alg = catalog_algebra("sl2");
    a.p = 3;
    // sigma -> sigma g^{-1} on (sigma^a, sigma^b, sigma^c), sigma^d = (1 + sigma^b sigma^c) / sigma^a.
    a.act = make_act(2, 3, [](const auto& g, auto s, auto out) {
      auto det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
      auto i00 = g(1, 1) / det, i01 = -g(0, 1) / det, i10 = -g(1, 0) / det, i11 = g(0, 0) / det;
      auto sd = (1.0 + s[1] * s[2]) / s[0];
      out[0] = s[0] * i00 + s[1] * i10;
      out[1] = s[0] * i01 + s[1] * i11;
      out[2] = s[2] * i00 + sd * i10;
    });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double> s) {
      Eigen::MatrixXd gi = g.inverse();
      return std::min(std::abs(s[0]), std::abs(s[0] * gi(0, 0) + s[1] * gi(1, 0)));
    };
    a.box = {{0.5, 2.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    a.note = "moving-frame coordinates of the prolonged projective action";
    return finish(a);
  }
  if (name == "sl2-prolonged" || name == "sl2-prolonged-3") {
    Action b = prolong(sl2_projective_family("sl2-projective"), name == "sl2-prolonged" ? 2 : 3);
    b.name = name;
    return b;
  }
  if (name == "sl2-trivial" || name == "se2-trivial" || name == "so3-trivial") {
    a.alg = catalog_algebra(name.substr(0, 3));
    a.p = 1;
    a.act = trivial_act(a.alg.n, 1);
    a.box = {{-2.0, 2.0}};
    return finish(a);
  }
  if (name == "se2-linear") {
    a.alg = catalog_algebra("se2");
    a.p = 2;
    a.act = affine_act(3, 2, 1.0);
    a.box = cube(2, -2.0, 2.0);
    return finish(a);
  }
  if (name == "so3-linear") {
    a.alg = catalog_algebra("so3");
    a.p = 3;
    a.act = linear_act(3);
    a.box = cube(3, -2.0, 2.0);
    return finish(a);
  }
  if (name == "so3-mobius") {
    a.alg = catalog_algebra("so3-mobius");
    a.p = 2;
    a.phi = SmoothMap(2, 6, [](auto z, auto out) {
      auto x = z[0], y = z[1];
      out[0] = y;
      out[1] = 0.5 * (1.0 + x * x - y * y);
      out[2] = x * y;
      out[3] = -x;
      out[4] = x * y;
      out[5] = 0.5 * (1.0 - x * x + y * y);
    });
    a.margin = one_margin;
    a.box = cube(2, -1.5, 1.5);
    a.note = "infinitesimals entered directly; no closed-form action, equivariance and canonicity are skipped";
    return a;
  }
  if (std::regex_match(name, match, trans_re)) {
    int r = std::stoi(match[1]);
    a.alg = catalog_algebra("translation(" + std::to_string(r) + ")");
    a.p = r;
    a.act = affine_act(r + 1, r, 1.0);
    a.box = cube(r, -2.0, 2.0);
    return finish(a);
  }
  if (name == "aff2-linear" || name == "aff2-affine") {
    a.alg = catalog_algebra("aff2");
    a.p = 2;
    a.act = affine_act(3, 2, name == "aff2-affine" ? 1.0 : 0.0);
    a.box = cube(2, -2.0, 2.0);
    return finish(a);
  }
  if (name == "scalar-translation") {
    a.alg = catalog_algebra("gl1");
    a.p = 1;
    a.act = make_act(1, 1, [](const auto& g, auto z, auto out) { out[0] = z[0] + log(g(0, 0)); });
    a.margin = [](const Eigen::MatrixXd& g, std::span<const double>) { return g(0, 0); };
    a.box = {{0.0, 2.0 * std::numbers::pi}};
    return finish(a);
  }
  throw Error(ErrorCode::UnknownAction, name);
}

Eigen::MatrixXd random_group_element(const LieAlgebra& alg, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), rad(0.0, 1.0);
  std::vector<double> x(alg.r);
  double norm = 0.0;
  for (auto& v : x) {
    v = u(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  double target = scale * rad(rng);
  for (auto& v : x) v *= norm > 0 ? target / norm : 0.0;
  return exp_coords(alg, x);
}

std::vector<double> sample_point(const Action& a, std::mt19937_64& rng, double min_margin) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.alg.n, a.alg.n);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> z(a.p);
    for (int i = 0; i < a.p; ++i) z[i] = std::uniform_real_distribution<double>(a.box[i].first, a.box[i].second)(rng);
    if (in_domain(a, id, z, min_margin)) return z;
  }
  throw Error(ErrorCode::OutOfDomain, a.name + ": rejection sampling failed");
}

std::pair<Eigen::MatrixXd, std::vector<double>> sample_pair(const Action& a, std::mt19937_64& rng, double scale) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::MatrixXd g = random_group_element(a.alg, rng, scale);
    std::vector<double> z = sample_point(a, rng);
    if (in_domain(a, g, z, 1e-3) && in_domain(a, g.inverse(), z, 1e-3)) return {g, z};
  }
  throw Error(ErrorCode::OutOfDomain, a.name + ": could not sample (g, z)");
}

}  // namespace algpois
