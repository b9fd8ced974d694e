#include "csos/correlation.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "csos/parallel.hpp"

namespace csos {

namespace {

cplx total(const CList& x) {
    cplx t = 0.0;
    for (const cplx y : x) t += y;
    return t;
}

cplx tau_ratio(const BetheSolution& ground, const BetheSolution& v, int m, const LatticeConfig& lat) {
    cplx r = 1.0;
    for (int i = 0; i < m; ++i) {
        const cplx den = eigenvalue_tau(lat.xi[i], ground, lat);
        if (std::abs(den) < 1e-12) fail(ErrorKind::SingularTransfer, "tau(xi_i) vanishes on the ground state");
        r *= eigenvalue_tau(lat.xi[i], v, lat) / den;
    }
    return r;
}

bool lattice_gamma(cplx g, const EllipticContext& ctx) {
    const BracketEval e = bracket_eval(g, 1, ctx);
    return std::abs(e.value) < 1e-6 * std::max(1.0, e.scale);
}

void check_m(int m, const LatticeConfig& lat) {
    if (m < 1 || m > lat.N) fail(ErrorKind::DegenerateInput, "m must lie in 1..N");
}

}  // namespace

BetheSolution select_ground(const Census& census, const LatticeConfig& lat) {
    if (census.solutions.empty()) fail(ErrorKind::CensusIncomplete, "empty census");
    std::size_t best = 0;
    double best_mod = -1.0;
    for (std::size_t a = 0; a < census.solutions.size(); ++a) {
        double mod = 1.0;
        for (const cplx x : lat.xi) mod *= std::abs(eigenvalue_tau(x, census.solutions[a], lat));
        if (mod > best_mod * (1.0 + 1e-12)) {
            best_mod = mod;
            best = a;
        }
    }
    return census.solutions[best];
}

SumTerm sum_q_term(const BetheSolution& ground, const BetheSolution& v, int m, const LatticeConfig& lat) {
    check_m(m, lat);
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(ground.roots.size());
    const cplx ratio = tau_ratio(ground, v, m, lat);
    const cplx g = total(v.roots) - total(ground.roots);
    const bool coincide = std::abs(v.omega - ground.omega) < 1e-10 && same_solution(ground, v, ctx);
    SumTerm out;
    if (coincide || lattice_gamma(g, ctx)) {
        // Single-determinant pieces are 0/0 here; use the routed scalar products.
        const cplx uv = scalar_product_det(ground, v.roots, v.omega, lat).value;
        const cplx vu = scalar_product_det(v, ground.roots, ground.omega, lat).value;
        out.value = ratio * uv * vu / (norm_det(ground, lat) * norm_det(v, lat));
        out.regular = false;
        return out;
    }
    const cplx h1 = height_sum(ground.omega, v.omega, g, lat);
    const cplx h2 = height_sum(v.omega, ground.omega, -g, lat);
    const cplx d_uv = det(omega_matrix(ground.roots, ground.omega, v.roots, v.omega, g, ground.kappa, lat));
    const cplx d_vu = det(omega_matrix(v.roots, v.omega, ground.roots, ground.omega, -g, v.kappa, lat));
    const cplx y_u = det(y_jacobian(ground, lat));
    const cplx y_v = det(y_jacobian(v, lat));
    out.value = std::pow(ctx.bracket_prime_zero(), 2 * n) * ratio * h1 * h2 * d_uv * d_vu / (y_u * y_v);
    return out;
}

cplx two_point_generating(const BetheSolution& ground, int m, const Census& census, const LatticeConfig& lat,
                          int threads) {
    check_m(m, lat);
    if (std::abs(ground.kappa - 1.0) > 1e-12) fail(ErrorKind::DegenerateInput, "ground state must be untwisted");
    if (!(bethe_residual_scaled(ground.roots, ground.omega, 1.0, lat) < 1e-8))
        fail(ErrorKind::NotABetheSolution, "ground state does not solve the Bethe equations");
    if (!census.complete()) {
        std::ostringstream os;
        os << "census has " << census.solutions.size() << " of " << census.expected << " solutions";
        fail(ErrorKind::CensusIncomplete, os.str());
    }
    const int count = static_cast<int>(census.solutions.size());
    CList terms(count);
    parallel_for(count, threads, [&](int i) { terms[i] = sum_q_term(ground, census.solutions[i], m, lat).value; });
    cplx acc = 0.0;
    for (const cplx t : terms) acc += t;
    return acc;
}

cplx two_point_generating(const BetheSolution& ground, int m, cplx kappa, const LatticeConfig& lat,
                          const SolverOptions& opt, int threads) {
    const Census census = enumerate_solutions(kappa, lat, opt, threads);
    return two_point_generating(ground, m, census, lat, threads);
}

double completeness_defect(const BetheSolution& ground, const Census& census, const LatticeConfig& lat,
                           int threads) {
    const int count = static_cast<int>(census.solutions.size());
    CList terms(count);
    const cplx nu = norm_det(ground, lat);
    parallel_for(count, threads, [&](int i) {
        const BetheSolution& v = census.solutions[i];
        const cplx uv = scalar_product_det(ground, v.roots, v.omega, lat).value;
        const cplx vu = scalar_product_det(v, ground.roots, ground.omega, lat).value;
        terms[i] = uv * vu / (nu * norm_det(v, lat));
    });
    cplx acc = 0.0;
    for (const cplx t : terms) acc += t;
    return std::abs(1.0 - acc);
}

std::vector<double> chebyshev_nodes(int count) {
    std::vector<double> x(count);
    for (int k = 0; k < count; ++k)
        x[k] = 0.5 * (1.0 + std::cos((2.0 * k + 1.0) * kPi / (2.0 * count)));
    return x;
}

GeneratingFunctionResult generating_polynomial(const BetheSolution& ground, int m, const LatticeConfig& lat,
                                               int node_count, const SolverOptions& opt, int threads) {
    check_m(m, lat);
    const int nodes = node_count < 0 ? m + 1 : node_count;
    if (nodes < m + 1) fail(ErrorKind::DegenerateInput, "need at least m+1 nodes");
    GeneratingFunctionResult out;
    const std::vector<double> x = chebyshev_nodes(nodes);
    const int deg = nodes - 1;
    Eigen::MatrixXd V(nodes, nodes);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j <= deg; ++j) V(i, j) = std::pow(x[i], j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const auto& sv = svd.singularValues();
    out.vandermonde_condition = sv(0) / sv(sv.size() - 1);
    if (!(out.vandermonde_condition <= 1e10)) fail(ErrorKind::IllConditionedFit, "Vandermonde condition above 1e10");

    CVector rhs(nodes);
    for (int i = 0; i < nodes; ++i) {
        const Census census = enumerate_solutions(x[i], lat, opt, threads);
        const cplx val = two_point_generating(ground, m, census, lat, threads);
        out.kappa_samples.emplace_back(x[i], val);
        out.census_sizes.push_back(static_cast<int>(census.solutions.size()));
        rhs(i) = val;
        if (i == nodes - 1) out.completeness_defect = completeness_defect(ground, census, lat, threads);
    }
    const CVector c = V.cast<cplx>().partialPivLu().solve(rhs);
    out.polynomial_coeffs.assign(c.data(), c.data() + c.size());
    return out;
}

std::vector<std::pair<int, cplx>> height_probability(const BetheSolution& ground, int m, const LatticeConfig& lat,
                                                     const SolverOptions& opt, int threads) {
    const GeneratingFunctionResult fit = generating_polynomial(ground, m, lat, -1, opt, threads);
    std::vector<std::pair<int, cplx>> out;
    for (int ell = m; ell >= -m; ell -= 2) out.emplace_back(ell, fit.polynomial_coeffs[(m - ell) / 2]);
    return out;
}

cplx master_integrand(const CList& z, cplx omega, cplx kappa, const BetheSolution& ground, int m,
                      const LatticeConfig& lat, HeightFactor factor) {
    check_m(m, lat);
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(z.size());
    if (n != static_cast<int>(ground.roots.size())) fail(ErrorKind::DegenerateInput, "|z| must equal n");
    BetheSolution zs;
    zs.roots = z;
    zs.omega = omega;
    zs.kappa = kappa;
    const cplx ratio = tau_ratio(ground, zs, m, lat);
    const cplx g = total(z) - total(ground.roots);
    const cplx h1 = height_sum(ground.omega, omega, g, lat);
    const cplx h = factor == HeightFactor::squared ? h1 * h1 : h1 * height_sum(omega, ground.omega, -g, lat);
    const cplx d_uz = det(omega_matrix(ground.roots, ground.omega, z, omega, g, ground.kappa, lat));
    const cplx d_zu = det(omega_matrix(z, omega, ground.roots, ground.omega, -g, kappa, lat));
    cplx ys = 1.0;
    for (const cplx x : z) ys *= y_function(x, zs, lat).value;
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    // height_sum already carries the 1/L of each height factor.
    return std::pow(ctx.bracket_prime_zero(), 2 * n) / fact * ratio * h * d_uz * d_zu / (det(y_jacobian(ground, lat)) * ys);
}

cplx master_residue(const BetheSolution& v, const BetheSolution& ground, int m, const LatticeConfig& lat,
                    HeightFactor factor, double radius, int points) {
    if (v.roots.size() != 1) fail(ErrorKind::DegenerateInput, "residue extraction is implemented for n = 1");
    cplx acc = 0.0;
    for (int k = 0; k < points; ++k) {
        const cplx e = std::exp(2.0 * kI * kPi * (k + 0.5) / static_cast<double>(points));
        const cplx z = v.roots[0] + radius * e;
        acc += master_integrand({z}, v.omega, v.kappa, ground, m, lat, factor) * radius * e;
    }
    return acc / static_cast<double>(points);
}

}  // namespace csos
