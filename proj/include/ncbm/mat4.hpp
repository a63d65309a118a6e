#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ncbm {

// The model is fixed at four states, so all linear algebra is on 4-vectors
// and 4x4 matrices stored by value.
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

inline Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline double vec_sum(const Vec4& v) { return v[0] + v[1] + v[2] + v[3]; }

inline double linf_diff(const Vec4& a, const Vec4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Row vector times matrix: (x P)_j = sum_i x_i P_ij.
inline Vec4 vec_mat(const Vec4& x, const Mat4& p) {
  Vec4 y{};
  for (int j = 0; j < 4; ++j) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += x[i] * p[i][j];
    y[j] = s;
  }
  return y;
}

inline Mat4 mat_mul(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 4; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

// P^n by binary exponentiation.
inline Mat4 mat_pow(Mat4 p, std::uint64_t n) {
  Mat4 r = identity4();
  while (n > 0) {
    if (n & 1) r = mat_mul(r, p);
    n >>= 1;
    if (n > 0) p = mat_mul(p, p);
  }
  return r;
}

// Gaussian elimination with partial pivoting for systems of size n <= 4.
// Returns false when a pivot falls below tolerance (singular system).
inline bool solve_linear(int n, Mat4 a, Vec4 b, Vec4& x) {
  constexpr double kPivotTol = 1e-13;
  std::array<int, 4> perm{0, 1, 2, 3};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double p = a[perm[col]][col];
    if (std::fabs(p) < kPivotTol) return false;
    for (int r = col + 1; r < n; ++r) {
      const double f = a[perm[r]][col] / p;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  x = Vec4{};
  for (int row = n - 1; row >= 0; --row) {
    double s = b[perm[row]];
    for (int c = row + 1; c < n; ++c) s -= a[perm[row]][c] * x[c];
    x[row] = s / a[perm[row]][row];
  }
  return true;
}

}  // namespace ncbm
