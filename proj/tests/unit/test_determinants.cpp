#include "fixtures.hpp"

using namespace csos;

TEST_CASE("partition function determinant sums against brute force, N = 1, 2, 3") {
    for (int N = 1; N <= 3; ++N) fx::check_all(check_partition(fx::ctx5(), N, 10, 100 + N));
}

TEST_CASE("partition function recursion properties at N = 2, 3") {
    for (int N = 2; N <= 3; ++N) fx::check_all(check_partition_recursion(fx::ctx5(), N, 200 + N));
}

TEST_CASE("partition_det N=1 closed form") {
    const EllipticContext& c = fx::ctx5();
    const cplx u{0.9, 0.3}, x{0.31, 0.42}, s{0.43, 0.61};
    const cplx want = c.bracket_one() * br(s - u + x, c) / (br(s, c) * br(u - x + 1.0, c));
    CHECK(rel_err(partition_det({u}, {x}, s, {}, PartitionVariant::Z1, c), want) < 1e-13);
    CHECK(rel_err(partition_det({u}, {x}, s, {}, PartitionVariant::Z2, c), want) < 1e-13);
}

TEST_CASE("partition_det moves gamma off the apparent pole of its prefactor") {
    // At |u| - |xi| + gamma + s + N = 0 the prefactor is singular; gamma is reselected.
    const EllipticContext& c = fx::ctx5();
    const CList u{{0.9, 0.3}, {1.6, 0.2}}, xi{{0.31, 0.42}, {1.27, 0.18}};
    const cplx g{0.37, 0.21};
    const cplx s = -(u[0] + u[1] - xi[0] - xi[1]) - g - 2.0;
    const cplx z = partition_det(u, xi, s, GammaPolicy::fixed_at(g), PartitionVariant::Z1, c);
    CHECK(rel_err(z, partition_function_bf(u, xi, s, c)) < 1e-9);
}

TEST_CASE("partial scalar product: both determinant forms against brute force") {
    fx::check_all(check_partial_sp(fx::lattice2(), 5, 1));
    fx::check_all(check_partial_sp(fx::lattice4(), 5, 2));
}

TEST_CASE("partial scalar product refuses non-Bethe u") {
    const LatticeConfig lat = fx::lattice2();
    CHECK_THROWS_AS(partial_sp_detsum({{0.6, 0.3}}, 1.0, {{1.1, 0.5}}, fx::kS0, {}, SpForm::full_4n, lat), Error);
}

TEST_CASE("partial scalar product has a finite limit as v -> u") {
    const LatticeConfig lat = fx::lattice2();
    const BetheSolution& u = fx::census1_n2().solutions.at(0);
    std::vector<cplx> vals;
    for (const double e : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4})
        vals.push_back(partial_sp_detsum(u.roots, u.omega, {u.roots[0] + e}, fx::kS0, {}, SpForm::full_4n, lat));
    for (std::size_t i = 2; i < vals.size(); ++i)
        CHECK(std::abs(vals[i] - vals[i - 1]) < std::abs(vals[i - 1] - vals[i - 2]));
}

TEST_CASE("scalar products, norms and orthogonality") {
    fx::check_all(check_scalar_products(fx::lattice2(), fx::census1_n2(), 10, 3));
    fx::check_all(check_scalar_products(fx::lattice4(), fx::census1_n4(), 10, 4));
}

TEST_CASE("lattice-degenerate gamma pairs take the height-sum route") {
    const LatticeConfig lat = fx::lattice4();
    const auto& sols = fx::census1_n4().solutions;
    int routed = 0;
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = 0; b < sols.size(); ++b)
            if (a != b) routed += scalar_product_det(sols[a], sols[b].roots, sols[b].omega, lat).route == Route::height_sum;
    CHECK(routed > 0);
    const BetheSolution& s = sols.front();
    CHECK(scalar_product_det(s, s.roots, s.omega, lat).route == Route::diagonal_limit);
}

TEST_CASE("height-summed subset sum agrees with the single determinant for generic v") {
    const LatticeConfig lat = fx::lattice4();
    const BetheSolution& u = fx::census1_n4().solutions.at(7);
    const CList v{{1.1, 0.5}, {0.2, 0.9}};
    const cplx wv = omega_values(2, lat.ctx)[2];
    CHECK(rel_err(scalar_product_det(u, v, wv, lat).value,
                  scalar_product_height_sum(u.roots, u.omega, v, wv, cplx(0.41, 0.13), lat)) < 1e-10);
}

TEST_CASE("twisted norms match the oracle") {
    const LatticeConfig lat = fx::lattice2();
    const Census c = enumerate_solutions(0.3, lat);
    for (const auto& s : c.solutions) {
        const cplx o = pairing(bethe_state(Direction::bra, s.roots, s.omega, lat),
                               bethe_state(Direction::ket, s.roots, s.omega, lat));
        CHECK(rel_err(norm_det(s, lat), o) < 1e-9);
    }
}

TEST_CASE("form factors against brute force and the sigma_z consistency") {
    fx::check_all(check_form_factors(fx::lattice2(), fx::census1_n2(), -1, 5));
    fx::check_all(check_form_factors(fx::lattice4(), fx::census1_n4(), 10, 6));
}

TEST_CASE("diagonal sigma_z summed over sites vanishes") {
    const LatticeConfig lat = fx::lattice4();
    for (const auto& s : fx::census1_n4().solutions) {
        cplx total = 0.0;
        for (int i = 1; i <= lat.N; ++i) total += form_factor_det(FormFactorOp::sigma_z, i, s, s, lat).value;
        CHECK(std::abs(total) < 1e-9 * std::abs(norm_det(s, lat)));
    }
}

TEST_CASE("G-function closed form, recursion and initial condition") {
    fx::check_all(check_recursion(fx::lattice4(), fx::census1_n4(), 7));
    fx::check_all(check_recursion(fx::lattice2(), fx::census1_n2(), 8));
}

TEST_CASE("orthogonality witness and the residue identity") {
    fx::check_all(check_witness(fx::lattice2(), fx::census1_n2(), 10, 9));
    fx::check_all(check_witness(fx::lattice4(), fx::census1_n4(), 10, 10));
}

TEST_CASE("witness for n = 1 is [u - v] and the residual is |M|") {
    const LatticeConfig lat = fx::lattice2();
    const auto& s = fx::census1_n2().solutions;
    const Witness w = orthogonality_witness(s[0], s[1], lat);
    REQUIRE(w.w.size() == 1);
    CHECK(rel_err(w.w(0), br(s[0].roots[0] - s[1].roots[0], lat.ctx)) < 1e-12);
    const CMatrix m = witness_matrix(s[0].roots, s[0].omega, s[1].roots, s[1].omega, lat);
    CHECK(std::abs(w.residual - std::abs(m(0, 0))) < 1e-12 * std::max(1.0, std::abs(m(0, 0))));
}

TEST_CASE("witness refuses shared roots") {
    const LatticeConfig lat = fx::lattice2();
    const auto& s = fx::census1_n2().solutions;
    BetheSolution t = s[0];
    t.omega = s[1].omega;
    CHECK_THROWS_AS(orthogonality_witness(s[0], t, lat), Error);
}
