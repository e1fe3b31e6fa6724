#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double r = 1.0L;
  for (int q = 1; q <= k; ++q) r = r * (n - k + q) / q;
  return std::round(r);
}

/// Coefficient of t^k in sqrt(2j+1) P_j(2t-1).
inline long double legendre_coeff(int j, int k) {
  const long double sign = (j + k) % 2 == 0 ? 1.0L : -1.0L;
  return sign * binomial(j, k) * binomial(j + k, k) * std::sqrt(2.0L * j + 1.0L);
}

/// int_0^1 t^p L_j(t) dt in extended precision.
inline long double monomial_projection(int p, int j) {
  long double s = 0.0L;
  for (int k = 0; k <= j; ++k) s += legendre_coeff(j, k) / (p + k + 1);
  return s;
}

/// Horner evaluation of the monomial form of L_j.
inline double legendre_horner(int j, double t) {
  long double s = 0.0L;
  for (int k = j; k >= 0; --k) s = s * t + legendre_coeff(j, k);
  return static_cast<double>(s);
}

/// Sum_k |c_k| t^k for the monomial form; scale of Horner rounding error.
inline double legendre_abs_sum(int j, double t) {
  long double s = 0.0L;
  for (int k = j; k >= 0; --k) s = s * t + std::abs(legendre_coeff(j, k));
  return static_cast<double>(s);
}

inline long double determinant(std::vector<std::vector<long double>> a) {
  const std::size_t n = a.size();
  long double det = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0.0L) return 0.0L;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (std::size_t q = c; q < n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  return det;
}

/// Monomial coefficients of the degree-j orthonormal polynomial of a measure
/// with moments m, by the classical Hankel-determinant formula
///   p_j(t) = det[m_{r+c} | last row 1,t,..,t^j] / sqrt(D_{j-1} D_j).
inline std::vector<double> hankel_orthonormal_row(const std::vector<double>& m, int j) {
  auto hankel = [&](int size) {
    std::vector<std::vector<long double>> h(size, std::vector<long double>(size));
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) h[r][c] = m[r + c];
    return h;
  };
  const long double d_prev = j == 0 ? 1.0L : determinant(hankel(j));
  const long double d_cur = determinant(hankel(j + 1));
  std::vector<double> row(j + 1);
  for (int k = 0; k <= j; ++k) {
    // cofactor of entry (j, k) in the matrix whose last row is the monomials
    std::vector<std::vector<long double>> minor;
    for (int r = 0; r < j; ++r) {
      std::vector<long double> line;
      for (int c = 0; c <= j; ++c)
        if (c != k) line.push_back(m[r + c]);
      minor.push_back(line);
    }
    const long double sign = (j + k) % 2 == 0 ? 1.0L : -1.0L;
    const long double cof = j == 0 ? 1.0L : sign * determinant(minor);
    row[k] = static_cast<double>(cof / std::sqrt(d_prev * d_cur));
  }
  return row;
}

/// Composite Simpson rule with many panels; a quadrature independent of the
/// Gauss rules under test.
inline double simpson(const std::function<double(double)>& f, int panels = 20000) {
  const double h = 1.0 / panels;
  long double s = f(0.0) + f(1.0);
  for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0L : 2.0L) * f(k * h);
  return static_cast<double>(s * h / 3.0L);
}

inline std::vector<double> random_coeffs(std::mt19937_64& rng, int degree, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(degree + 1);
  for (auto& v : c) v = u(rng);
  return c;
}

inline double horner(const std::vector<double>& c, double t) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

}  // namespace oracle
