#include <numeric>

#include "fixtures.hpp"

using namespace csos;

TEST_CASE("multipliers satisfy (-1)^{rn} omega^L = 1") {
    for (const auto& [r, L, n] : {std::tuple{1, 5, 1}, std::tuple{1, 5, 2}, std::tuple{2, 7, 3}}) {
        const EllipticContext c(r, L, cplx(0.0, 0.8));
        for (const cplx w : omega_values(n, c)) {
            const double sign = (r * n) % 2 == 0 ? 1.0 : -1.0;
            CHECK(std::abs(sign * std::pow(w, L) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("census counts are L * binom(N, N/2) at kappa = 0.1") {
    fx::check_all(check_census(fx::lattice2(), 0.1, 1));
    fx::check_all(check_census(fx::lattice4(), 0.1, 1));
    const EllipticContext c7(1, 7, cplx(0.0, 0.8));
    fx::check_all(check_census(LatticeConfig(c7, fx::kXi2, fx::kS0), 0.1, 1));
    const Census c = enumerate_solutions(0.1, fx::lattice2());
    CHECK(c.solutions.size() == 10);
    CHECK(c.expected == 10);
}

TEST_CASE("converged census solutions are admissible and off-diagonal with tiny residuals") {
    for (const auto& s : fx::census1_n4().solutions) {
        CHECK(s.admissible);
        CHECK(s.off_diagonal);
        CHECK(s.residual_norm < 1e-11);
    }
}

TEST_CASE("seed asymptotics have O(kappa^2) error") {
    CHECK(check_seed_asymptotics(fx::lattice2()).pass);
    CHECK(check_seed_asymptotics(fx::lattice4()).pass);
}

TEST_CASE("seed roots cluster at xi - 1") {
    const LatticeConfig lat = fx::lattice2();
    for (const auto& label : all_seed_labels(lat)) {
        const CList r = seed_roots(label, 1e-8, lat);
        CHECK(std::abs(r[0] - (lat.xi[label.subset[0] - 1] - 1.0)) < 1e-6);
    }
}

TEST_CASE("continuation of ({1}, 0) to kappa = 1 converges") {
    const LatticeConfig lat = fx::lattice2();
    const BetheSolution seed = seed_solution({{1}, 0}, lat);
    const BetheSolution s = solve_bethe(seed, 1.0, lat);
    CHECK(s.residual_norm < 1e-11);
    const BetheSolution same = solve_bethe(seed, seed.kappa, lat);
    CHECK(same.steps == 0);
    CHECK(std::abs(same.roots[0] - seed.roots[0]) == 0.0);
}

TEST_CASE("analytic Jacobian matches finite differences") {
    const LatticeConfig lat = fx::lattice4();
    const CList v{{0.6, 0.3}, {1.9, 0.7}};
    const cplx w = omega_values(2, lat.ctx)[1];
    const CMatrix J = bethe_residual_jacobian(v, w, 0.4, lat);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
        CList vp = v, vm = v;
        vp[k] += h;
        vm[k] -= h;
        const CList fp = bethe_residual(vp, w, 0.4, lat), fm = bethe_residual(vm, w, 0.4, lat);
        for (int j = 0; j < 2; ++j) CHECK(rel_err(J(j, k), (fp[j] - fm[j]) / (2.0 * h), 1e-6) < 1e-7);
    }
}

TEST_CASE("eigenvalue at u = v_1 is finite and matches a nearby value") {
    const LatticeConfig lat = fx::lattice2();
    const BetheSolution& s = fx::census1_n2().solutions.at(2);
    const cplx at = eigenvalue_tau(s.roots[0], s, lat);
    const cplx near = eigenvalue_tau(s.roots[0] + cplx(1e-4, 0.0), s, lat);
    CHECK(std::isfinite(at.real()));
    CHECK(rel_err(at, near) < 1e-3);
}

TEST_CASE("kappa = 0 eigenvalue keeps only the A term") {
    const LatticeConfig lat = fx::lattice2();
    BetheSolution s = fx::census1_n2().solutions.at(1);
    s.kappa = 0.0;
    const cplx u{0.5, 0.2};
    cplx want = s.omega;
    for (const cplx v : s.roots) want *= br(v - u + 1.0, lat.ctx) / br(v - u, lat.ctx);
    CHECK(rel_err(eigenvalue_tau(u, s, lat), want) < 1e-13);
}

TEST_CASE("census is independent of the thread count") {
    const LatticeConfig lat = fx::lattice4();
    const Census a = enumerate_solutions(0.3, lat, {}, 1);
    const Census b = enumerate_solutions(0.3, lat, {}, 3);
    REQUIRE(a.solutions.size() == b.solutions.size());
    for (std::size_t i = 0; i < a.solutions.size(); ++i)
        for (std::size_t j = 0; j < a.solutions[i].roots.size(); ++j)
            CHECK(a.solutions[i].roots[j] == b.solutions[i].roots[j]);
}

TEST_CASE("duplicate detection is permutation invariant") {
    const LatticeConfig lat = fx::lattice4();
    const BetheSolution& s = fx::census1_n4().solutions.at(4);
    BetheSolution t = s;
    std::reverse(t.roots.begin(), t.roots.end());
    t.roots[0] += 1.0 / lat.ctx.eta();
    CHECK(same_solution(s, t, lat.ctx));
    CHECK_FALSE(same_solution(s, fx::census1_n4().solutions.at(5), lat.ctx));
}

TEST_CASE("census needs even N and odd L") {
    const EllipticContext c6(1, 6, cplx(0.0, 0.8));
    CHECK_THROWS_AS(enumerate_solutions(0.1, LatticeConfig(c6, fx::kXi2, fx::kS0)), Error);
}
