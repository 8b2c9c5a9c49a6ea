#include "ppd/linalg.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "ppd/error.hpp"

namespace ppd {

double log_det_pivoted_inplace(double* a, int m) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (m == 0) return 0.0;
  auto at = [a, m](int i, int j) -> double& { return a[i * m + j]; };

  double max_diag = 0.0;
  for (int i = 0; i < m; ++i) max_diag = std::max(max_diag, at(i, i));
  if (!(max_diag > 0.0)) return kNegInf;
  const double tol = kRelativePivotTolerance * max_diag;

  // The determinant is carried as mantissa * 2^exponent so only one log is
  // needed.
  double mantissa = 1.0;
  long exponent = 0;
  for (int k = 0; k < m; ++k) {
    int p = k;
    for (int i = k + 1; i < m; ++i)
      if (at(i, i) > at(p, p)) p = i;
    if (!(at(p, p) > tol)) return kNegInf;

    if (p != k) {
      // Symmetric row/column swap restricted to the upper triangle.
      for (int j = 0; j < k; ++j) std::swap(at(j, k), at(j, p));
      std::swap(at(k, k), at(p, p));
      for (int i = k + 1; i < p; ++i) std::swap(at(k, i), at(i, p));
      for (int j = p + 1; j < m; ++j) std::swap(at(k, j), at(p, j));
    }

    const double pivot = at(k, k);
    int e = 0;
    mantissa = std::frexp(mantissa * pivot, &e);
    exponent += e;
    const double inv = 1.0 / pivot;
    const double* row_k = a + k * m;
    for (int i = k + 1; i < m; ++i) {
      const double f = row_k[i] * inv;
      if (f == 0.0) continue;
      double* row_i = a + i * m;
      for (int j = i; j < m; ++j) row_i[j] -= f * row_k[j];
    }
  }
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

double log_det_psd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::kInvalidInput, "log_det_psd needs a square matrix");
  const int m = static_cast<int>(a.rows());
  std::vector<double> buf(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) buf[i * m + j] = a(i, j);
  return log_det_pivoted_inplace(buf.data(), m);
}

}  // namespace ppd
