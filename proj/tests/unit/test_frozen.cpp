// Constants produced by tests/oracle/freeze_values.py (mpmath theta, numpy reference model).
#include "fixtures.hpp"

using namespace csos;

namespace {

void close(cplx got, cplx want, double tol) {
    INFO("got " << got << " want " << want);
    CHECK(rel_err(got, want) < tol);
}

}  // namespace

TEST_CASE("theta1 at a fixed point matches mpmath") {
    const EllipticContext c(1, 5, cplx(0.0, 0.7));
    close(theta1(cplx(0.2, 0.3), cplx(0.0, 0.7), c), {0.88817542889468615, 1.0530339398284199}, 1e-13);
}

TEST_CASE("bracket at a fixed point matches mpmath") {
    close(br(cplx(0.7, 0.2), fx::ctx5()), {0.45061983133248412, 0.12096679094872673}, 1e-13);
}

TEST_CASE("Boltzmann weights b and c match the reference model") {
    const BoltzmannWeights w = boltzmann_weights(cplx(0.3, 0.1), cplx(0.45, 0.2), fx::ctx5());
    close(w.b, {0.70634724601036514, -0.03559422882305744}, 1e-13);
    close(w.c, {1.2805622494767579, -0.14659597075421976}, 1e-13);
}

TEST_CASE("partial scalar products match the reference model") {
    const LatticeConfig l2 = fx::lattice2();
    close(partial_scalar_product_bf({{0.6, 0.3}}, {{1.1, 0.5}}, fx::kS0, l2), {0.39639567358999006, -0.23964299638171171},
          1e-12);
    const LatticeConfig l4 = fx::lattice4();
    close(partial_scalar_product_bf({{0.6, 0.3}, {1.9, 0.7}}, {{1.1, 0.5}, {0.2, 0.9}}, fx::kS0, l4),
          {0.75587432429613255, -1.0204514534135256}, 1e-12);
}

TEST_CASE("Bethe root, norm, eigenvalue and generating function for the label ({1}, 0)") {
    const LatticeConfig lat = fx::lattice2();
    const BetheSolution& s = fx::by_label(fx::census1_n2(), {1}, 0);
    // Roots are defined modulo the period lattice; compare through the bracket.
    const cplx ref1{-2.2099999999997788, 2.3000000000000793};
    CHECK(std::abs(br(s.roots[0] - ref1, lat.ctx)) < 1e-10);

    const Census c03 = enumerate_solutions(0.3, lat);
    const BetheSolution& t = fx::by_label(c03, {1}, 0);
    CHECK(std::abs(br(t.roots[0] - cplx(-0.85787139169849502, 0.87156290822305693), lat.ctx)) < 1e-10);

    close(gaudin_norm(s, lat), {0.086929036343454558, 0.34583345282841949}, 1e-9);
    close(eigenvalue_tau(0.5, s, lat), {0.041339406654798738, -0.11385145004210839}, 1e-9);
    close(two_point_generating(s, 1, 0.3, lat), {0.65000000000004776, 5.8502871723142777e-16}, 1e-9);
}
