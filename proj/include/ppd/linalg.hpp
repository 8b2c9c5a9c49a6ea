#ifndef PPD_LINALG_HPP
#define PPD_LINALG_HPP

#include <Eigen/Dense>

namespace ppd {

inline constexpr double kRelativePivotTolerance = 1e-12;

// log|A| for a symmetric positive-semidefinite A via diagonally pivoted
// LDL'. Returns -infinity when a pivot falls to or below
// kRelativePivotTolerance times the largest diagonal entry of A.
//
// `a` is row-major m x m; only its upper triangle is read and it is
// overwritten with the factor.
double log_det_pivoted_inplace(double* a, int m);

double log_det_psd(const Eigen::MatrixXd& a);

}  // namespace ppd

#endif  // PPD_LINALG_HPP
