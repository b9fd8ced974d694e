#include "fixtures.hpp"

using namespace csos;

TEST_CASE("RTT relation on V x V x H") {
    CHECK(check_rtt(fx::lattice2(), 10, 1).pass);
    CHECK(check_rtt(fx::lattice4(), 5, 2).pass);
}

TEST_CASE("A acts trivially on the reference state and D kills it at xi_j") {
    const EllipticContext& c = fx::ctx5();
    const CList xi{{0.31, 0.42}, {1.27, 0.18}, {2.05, 0.77}};
    const Monodromy t = monodromy(cplx(0.9, 0.3), cplx(0.43, 0.61), xi, c);
    CHECK(std::abs(t.A(0, 0) - 1.0) < 1e-13);
    CHECK(t.A.col(0).tail(7).cwiseAbs().maxCoeff() < 1e-13);
    for (const cplx x : xi) {
        const Monodromy tx = monodromy(x, cplx(0.43, 0.61), xi, c);
        CHECK(tx.D.col(0).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("the empty partial scalar product is 1") {
    CHECK(std::abs(partial_scalar_product_bf({}, {}, fx::kS0, fx::lattice2()) - 1.0) < 1e-15);
}

TEST_CASE("partition function N=1 closed form") {
    const EllipticContext& c = fx::ctx5();
    const cplx u{0.9, 0.3}, x{0.31, 0.42}, s{0.43, 0.61};
    const cplx want = c.bracket_one() * br(s - u + x, c) / (br(s, c) * br(u - x + 1.0, c));
    CHECK(rel_err(partition_function_bf({u}, {x}, s, c), want) < 1e-13);
}

TEST_CASE("Bethe states are transfer-matrix eigenvectors") {
    const LatticeConfig lat = fx::lattice2();
    for (const auto& sol : fx::census1_n2().solutions) {
        const DynamicalState psi = bethe_state(Direction::ket, sol.roots, sol.omega, lat);
        for (const cplx u : {cplx(0.5, 0.2), cplx(1.7, 0.9)}) {
            const DynamicalState t = transfer_apply(u, psi, 1.0, lat);
            const cplx tau = eigenvalue_tau(u, sol, lat);
            double err = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < psi.values.size(); ++k) {
                err = std::max(err, (t.values[k] - tau * psi.values[k]).cwiseAbs().maxCoeff());
                scale = std::max(scale, std::abs(tau) * psi.values[k].cwiseAbs().maxCoeff());
            }
            CHECK(err < 1e-10 * scale);
        }
    }
}

TEST_CASE("transfer matrices commute on Fun(H[0])") {
    const LatticeConfig lat = fx::lattice4();
    const HeightOperatorSpace sp = zero_weight_space(lat);
    const CMatrix t1 = transfer_matrix_hat(cplx(0.5, 0.2), 1.0, lat, sp);
    const CMatrix t2 = transfer_matrix_hat(cplx(1.7, 0.9), 1.0, lat, sp);
    CHECK((t1 * t2 - t2 * t1).cwiseAbs().maxCoeff() < 1e-10 * t1.cwiseAbs().maxCoeff() * t2.cwiseAbs().maxCoeff());
}

TEST_CASE("Bethe states are symmetric in the roots") {
    const LatticeConfig lat = fx::lattice4();
    const BetheSolution& s = fx::census1_n4().solutions.at(3);
    const CList rev(s.roots.rbegin(), s.roots.rend());
    const DynamicalState a = bethe_state(Direction::ket, s.roots, s.omega, lat);
    const DynamicalState b = bethe_state(Direction::ket, rev, s.omega, lat);
    for (std::size_t k = 0; k < a.values.size(); ++k)
        CHECK((a.values[k] - b.values[k]).cwiseAbs().maxCoeff() < 1e-10 * a.values[k].cwiseAbs().maxCoeff());
}

TEST_CASE("inverse problem on Fun(H[0])") { fx::check_all(check_inverse_problem(fx::lattice2())); }

TEST_CASE("generating function oracle: kappa=1 gives 1 and kappa=0, m=N gives 0") {
    const LatticeConfig lat = fx::lattice2();
    const BetheSolution& s = fx::census1_n2().solutions.at(0);
    const DynamicalState bra = bethe_state(Direction::bra, s.roots, s.omega, lat);
    const DynamicalState ket = bethe_state(Direction::ket, s.roots, s.omega, lat);
    CHECK(std::abs(generating_function_bf(1.0, 1, bra, ket, lat) - 1.0) < 1e-12);
    CHECK(std::abs(generating_function_bf(0.0, 2, bra, ket, lat)) < 1e-12);
}

TEST_CASE("sigma_z summed over sites vanishes in the zero-weight sector") {
    const LatticeConfig lat = fx::lattice4();
    const BetheSolution& s = fx::census1_n4().solutions.at(5);
    const DynamicalState bra = bethe_state(Direction::bra, s.roots, s.omega, lat);
    const DynamicalState ket = bethe_state(Direction::ket, s.roots, s.omega, lat);
    cplx total = 0.0;
    for (int i = 1; i <= lat.N; ++i) total += local_matrix_element_bf(LocalOp::sigma_z, i, bra, ket, lat);
    CHECK(std::abs(total) < 1e-9 * std::abs(pairing(bra, ket)));
}

TEST_CASE("F-basis chain reproduces the partial scalar product") {
    const LatticeConfig lat = fx::lattice4();
    const CList u{{0.6, 0.3}, {1.9, 0.7}}, v{{1.1, 0.5}, {0.2, 0.9}};
    CHECK(rel_err(partial_scalar_product_fbasis(u, v, fx::kS0, lat), partial_scalar_product_bf(u, v, fx::kS0, lat)) <
          1e-10);
}
