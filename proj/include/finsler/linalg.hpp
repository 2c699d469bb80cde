#ifndef FINSLER_LINALG_HPP
#define FINSLER_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace finsler {

// Dimensions stay small (desk-scale geometry), so vectors and matrices use
// fixed storage and value semantics. No heap traffic in quadrature loops.
inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() : n_(0) {}
  explicit Vec(int n, double fill = 0.0) : n_(n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("Vec: bad dimension");
    for (int i = 0; i < n_; ++i) v_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    if (n_ > kMaxDim) throw std::invalid_argument("Vec: bad dimension");
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }
  static Vec from(const std::vector<double>& xs) {
    Vec r(static_cast<int>(xs.size()));
    for (int i = 0; i < r.n_; ++i) r.v_[i] = xs[i];
    return r;
  }

  int size() const { return n_; }
  double& operator[](int i) { return v_[i]; }
  double operator[](int i) const { return v_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
  }

  std::vector<double> to_std() const { return std::vector<double>(v_, v_ + n_); }

 private:
  double v_[kMaxDim];
  int n_;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) {
  for (int i = 0; i < a.size(); ++i) a[i] = -a[i];
  return a;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const Vec& a) {
  for (int i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

inline Vec basis_vec(int n, int i) {
  Vec e(n);
  e[i] = 1.0;
  return e;
}

class Mat {
 public:
  Mat() : n_(0) {}
  explicit Mat(int n, double fill = 0.0) : n_(n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("Mat: bad dimension");
    for (int i = 0; i < n_ * n_; ++i) m_[i] = fill;
  }
  static Mat identity(int n) {
    Mat r(n);
    for (int i = 0; i < n; ++i) r(i, i) = 1.0;
    return r;
  }
  static Mat from_row_major(int n, const std::vector<double>& xs) {
    if (static_cast<int>(xs.size()) != n * n)
      throw std::invalid_argument("Mat: row-major data has wrong length");
    Mat r(n);
    for (int i = 0; i < n * n; ++i) r.m_[i] = xs[i];
    return r;
  }

  int size() const { return n_; }
  double& operator()(int i, int j) { return m_[i * n_ + j]; }
  double operator()(int i, int j) const { return m_[i * n_ + j]; }

 private:
  double m_[kMaxDim * kMaxDim];
  int n_;
};

inline Vec mat_vec(const Mat& A, const Vec& x) {
  Vec r(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double s = 0;
    for (int j = 0; j < x.size(); ++j) s += A(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

inline bool is_symmetric(const Mat& A, double tol = 1e-12) {
  for (int i = 0; i < A.size(); ++i)
    for (int j = i + 1; j < A.size(); ++j)
      if (std::abs(A(i, j) - A(j, i)) > tol * (1.0 + std::abs(A(i, j)))) return false;
  return true;
}

// Cholesky A = L L^T. Returns false when A is not positive definite.
inline bool cholesky(const Mat& A, Mat& L) {
  const int n = A.size();
  L = Mat(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return true;
}

inline Vec cholesky_solve(const Mat& L, const Vec& b) {
  const int n = L.size();
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L(i, k) * y[k];
    y[i] = s / L(i, i);
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

inline Mat spd_inverse(const Mat& A) {
  Mat L;
  if (!cholesky(A, L)) throw std::invalid_argument("spd_inverse: matrix not positive definite");
  const int n = A.size();
  Mat inv(n);
  for (int j = 0; j < n; ++j) {
    Vec col = cholesky_solve(L, basis_vec(n, j));
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

inline double spd_det(const Mat& A) {
  Mat L;
  if (!cholesky(A, L)) throw std::invalid_argument("spd_det: matrix not positive definite");
  double d = 1.0;
  for (int i = 0; i < A.size(); ++i) d *= L(i, i) * L(i, i);
  return d;
}

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double min_eigenvalue_sym(Mat A) {
  const int n = A.size();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double mn = A(0, 0);
  for (int i = 1; i < n; ++i) mn = std::min(mn, A(i, i));
  return mn;
}

}  // namespace finsler

#endif
