#include "fixtures.hpp"

using namespace csos;

TEST_CASE("R(0; s) is the permutation for generic s") {
    for (const cplx s : {cplx(0.45, 0.2), cplx(1.3, -0.4), cplx(2.2, 1.1)})
        CHECK((r_matrix(0.0, s, fx::ctx5()) - permutation4()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("R-matrix property suite at eta in {1/3, 1/5, 2/5}") {
    for (const auto& [r, L] : {std::pair{1, 3}, std::pair{1, 5}, std::pair{2, 5}})
        fx::check_all(check_r_matrix(EllipticContext(r, L, cplx(0.0, 0.8)), 50, 17));
}

TEST_CASE("zero weight is exact") {
    SafeBox box(fx::ctx5(), 2);
    const CList p = box.draw(4);
    CHECK(r_property_residual(RProperty::zero_weight, p[0], p[1], p[2], p[3], fx::ctx5()) < 1e-13);
}

TEST_CASE("weights are L-periodic in the height") {
    const EllipticContext& c = fx::ctx5();
    const cplx u{0.3, 0.1}, s{0.45, 0.2};
    const BoltzmannWeights w0 = boltzmann_weights(u, s, c), wL = boltzmann_weights(u, s + 5.0, c);
    CHECK(rel_err(w0.b, wL.b) < 1e-12);
    CHECK(rel_err(w0.c, wL.c) < 1e-12);
    CHECK(rel_err(w0.b_bar, wL.b_bar) < 1e-12);
    CHECK(rel_err(w0.c_bar, wL.c_bar) < 1e-12);
}

TEST_CASE("d vanishes at the inhomogeneities") {
    const LatticeConfig lat = fx::lattice2();
    for (const cplx x : lat.xi) CHECK(std::abs(d_fn(x, lat)) < 1e-14);
}

TEST_CASE("lattice validation rejects coinciding inhomogeneities") {
    const LatticeConfig bad(fx::ctx5(), {{0.3, 0.4}, {0.3 + 5.0, 0.4}}, fx::kS0);
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_NOTHROW(fx::lattice4().validate());
}

TEST_CASE("N - 2n must be a multiple of L") {
    CHECK_THROWS_AS(LatticeConfig(fx::ctx5(), {{0.1, 0.2}, {0.7, 0.3}, {1.4, 0.6}}, fx::kS0), Error);
}
