#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "algpois/dual.hpp"
#include "algpois/errors.hpp"

namespace algpois {

// Dense row-major matrix over any scalar, including nested duals.
template <class S>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<S> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, S(0.0)) {}

  S& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1.0);
    return m;
  }

  static Mat from(const Eigen::MatrixXd& m) {
    Mat out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out(i, j) = S(m(i, j));
    return out;
  }

  Eigen::MatrixXd values() const {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = value_of((*this)(i, j));
    return m;
  }
};

template <class S> Mat<S> operator*(const Mat<S>& x, const Mat<S>& y) {
  Mat<S> out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const S& xik = x(i, k);
      for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

template <class S> Mat<S> operator+(const Mat<S>& x, const Mat<S>& y) {
  Mat<S> out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
  return out;
}

template <class S> Mat<S> operator-(const Mat<S>& x, const Mat<S>& y) {
  Mat<S> out = x;
  for (size_t i = 0; i < out.a.size(); ++i) out.a[i] -= y.a[i];
  return out;
}

template <class S> Mat<S> transpose(const Mat<S>& x) {
  Mat<S> out(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) out(j, i) = x(i, j);
  return out;
}

// Gauss-Jordan with partial pivoting on the real part.
template <class S> Mat<S> inverse(Mat<S> m) {
  const int n = m.rows;
  Mat<S> inv = Mat<S>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value_of(m(col, col)));
    for (int r = col + 1; r < n; ++r) {
      double cand = std::abs(value_of(m(r, col)));
      if (cand > best) { best = cand; piv = r; }
    }
    if (best < 1e-14) throw Error(ErrorCode::SingularJacobian, "matrix is singular");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(m(col, j), m(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    S p = m(col, col);
    for (int j = 0; j < n; ++j) {
      m(col, j) = m(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = m(r, col);
      if (value_of(f) == 0.0 && depth_v<S> == 0) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace algpois
