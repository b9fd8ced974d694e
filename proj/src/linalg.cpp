#include <Eigen/LU>

#include "csos/errors.hpp"
#include "csos/types.hpp"

namespace csos {

const char* error_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::SingularPoint: return "SingularPoint";
        case ErrorKind::NonConvergent: return "NonConvergent";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::MultiplierNotAdmissible: return "MultiplierNotAdmissible";
        case ErrorKind::NotABetheSolution: return "NotABetheSolution";
        case ErrorKind::GammaDegenerate: return "GammaDegenerate";
        case ErrorKind::PathCollision: return "PathCollision";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::CensusIncomplete: return "CensusIncomplete";
        case ErrorKind::SingularTransfer: return "SingularTransfer";
        case ErrorKind::CoincidingRoots: return "CoincidingRoots";
        case ErrorKind::IllConditionedFit: return "IllConditionedFit";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Error";
}

DetResult det_lu(const CMatrix& m) {
    if (m.rows() != m.cols()) fail(ErrorKind::DegenerateInput, "determinant of a non-square matrix");
    if (m.rows() == 0) return {1.0, 1.0};
    Eigen::PartialPivLU<CMatrix> lu(m);
    return {lu.determinant(), lu.rcond()};
}

cplx det(const CMatrix& m) { return det_lu(m).value; }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace csos
