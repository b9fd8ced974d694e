#pragma once

#include <doctest.h>

#include "csos/checks.hpp"
#include "csos/oracle.hpp"

namespace fx {

using namespace csos;

inline const EllipticContext& ctx5() {
    static const EllipticContext c(1, 5, cplx(0.0, 0.8));
    return c;
}

// The lattices the frozen constants were generated on (tests/oracle/freeze_values.py).
inline const CList kXi2{{0.31, 0.42}, {1.27, 0.18}};
inline const CList kXi4{{0.31, 0.42}, {1.27, 0.18}, {2.05, 0.77}, {0.88, 1.31}};
inline const cplx kS0{0.43, 0.61};

inline LatticeConfig lattice2() { return LatticeConfig(ctx5(), kXi2, kS0); }
inline LatticeConfig lattice4() { return LatticeConfig(ctx5(), kXi4, kS0); }

inline const Census& census1_n2() {
    static const Census c = enumerate_solutions(1.0, lattice2());
    return c;
}
inline const Census& census1_n4() {
    static const Census c = enumerate_solutions(1.0, lattice4());
    return c;
}

inline const BetheSolution& by_label(const Census& c, std::vector<int> subset, int branch) {
    for (const auto& s : c.solutions)
        if (s.seed.subset == subset && s.seed.branch == branch) return s;
    FAIL("label not in census");
    return c.solutions.front();
}

inline void check_all(const std::vector<CheckResult>& rs) {
    for (const auto& r : rs) {
        INFO(r.name << " residual " << r.residual << " tol " << r.tolerance << " " << r.detail);
        CHECK(r.pass);
    }
}

}  // namespace fx
