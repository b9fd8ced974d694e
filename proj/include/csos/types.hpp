#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace csos {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CList = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

struct DetResult {
    cplx value;
    double rcond = 0.0;  // reciprocal condition estimate of the LU factorization
};

// Partial-pivot LU determinant; 0×0 gives 1.
DetResult det_lu(const CMatrix& m);
cplx det(const CMatrix& m);

double max_abs(const CMatrix& m);

}  // namespace csos
