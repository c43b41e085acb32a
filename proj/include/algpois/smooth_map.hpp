#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "algpois/dual.hpp"
#include "algpois/errors.hpp"

namespace algpois {

template <class S>
using EvalFn = std::function<void(std::span<const S>, std::span<S>)>;

// Smooth map R^in -> R^out, evaluable on every scalar depth up to kMaxDepth.
// Built from a generic callable f(std::span<const S>, std::span<S>).
class SmoothMap {
 public:
  SmoothMap() = default;

  template <class F>
  SmoothMap(int in, int out, F f) : impl_(std::make_shared<Impl>()) {
    impl_->in = in;
    impl_->out = out;
    fill(f, std::make_integer_sequence<int, kMaxDepth + 1>{});
  }

  int in_dim() const { return impl_->in; }
  int out_dim() const { return impl_->out; }
  explicit operator bool() const { return static_cast<bool>(impl_); }

  template <class S>
  void eval(std::span<const S> in, std::span<S> out) const {
    if constexpr (depth_v<S> > kMaxDepth) {
      throw Error(ErrorCode::DepthExceeded, "derivative nesting exceeds supported depth");
    } else {
      std::get<depth_v<S>>(impl_->fns)(in, out);
    }
  }

  template <class S>
  std::vector<S> operator()(const std::vector<S>& in) const {
    if (static_cast<int>(in.size()) != in_dim())
      throw Error(ErrorCode::DimensionMismatch, "SmoothMap input size");
    std::vector<S> out(out_dim(), S(0.0));
    eval<S>(in, out);
    return out;
  }

 private:
  template <class F, int... K>
  void fill(F& f, std::integer_sequence<int, K...>) {
    ((std::get<K>(impl_->fns) = [f](std::span<const R<K>> in, std::span<R<K>> out) { f(in, out); }), ...);
  }

  template <int... K>
  static auto fn_tuple(std::integer_sequence<int, K...>) -> std::tuple<EvalFn<R<K>>...>;

  struct Impl {
    int in = 0;
    int out = 0;
    decltype(fn_tuple(std::make_integer_sequence<int, kMaxDepth + 1>{})) fns;
  };
  std::shared_ptr<Impl> impl_;
};

// Jacobian (out x in, row-major) of f at x, one dual level above S.
template <class S>
std::vector<S> jacobian(const SmoothMap& f, std::span<const S> x) {
  if constexpr (depth_v<S> >= kMaxDepth) {
    throw Error(ErrorCode::DepthExceeded, "jacobian beyond supported depth");
  } else {
    const int p = f.in_dim(), q = f.out_dim();
    std::vector<S> J(static_cast<size_t>(p) * q, S(0.0));
    std::vector<Dual<S>> xin(p), yout(q);
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < p; ++i) xin[i] = Dual<S>(x[i], S(i == j ? 1.0 : 0.0));
      f.eval<Dual<S>>(xin, yout);
      for (int i = 0; i < q; ++i) J[static_cast<size_t>(i) * p + j] = yout[i].d;
    }
    return J;
  }
}

// Value and directional derivative of f at x along dir.
template <class S>
std::pair<std::vector<S>, std::vector<S>> directional(const SmoothMap& f, std::span<const S> x,
                                                      std::span<const S> dir) {
  if constexpr (depth_v<S> >= kMaxDepth) {
    throw Error(ErrorCode::DepthExceeded, "directional derivative beyond supported depth");
  } else {
    const int p = f.in_dim(), q = f.out_dim();
    std::vector<Dual<S>> xin(p), yout(q);
    for (int i = 0; i < p; ++i) xin[i] = Dual<S>(x[i], dir[i]);
    f.eval<Dual<S>>(xin, yout);
    std::vector<S> val(q), der(q);
    for (int i = 0; i < q; ++i) {
      val[i] = yout[i].v;
      der[i] = yout[i].d;
    }
    return {std::move(val), std::move(der)};
  }
}

inline Eigen::MatrixXd jacobian_matrix(const SmoothMap& f, const std::vector<double>& x) {
  auto J = jacobian<double>(f, x);
  Eigen::MatrixXd m(f.out_dim(), f.in_dim());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = J[static_cast<size_t>(i) * m.cols() + j];
  return m;
}

inline Eigen::VectorXd gradient(const SmoothMap& f, const std::vector<double>& x) {
  return jacobian_matrix(f, x).row(0).transpose();
}

inline double eval_scalar(const SmoothMap& f, const std::vector<double>& x) { return f(x)[0]; }

// Composition g ∘ f.
SmoothMap compose(const SmoothMap& g, const SmoothMap& f);

// Constant map.
SmoothMap constant_map(int in, std::vector<double> values);

// Coordinate projection z -> z[index].
SmoothMap coordinate(int in, int index);

}  // namespace algpois
