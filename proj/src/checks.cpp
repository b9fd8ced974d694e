#include "csos/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "csos/oracle.hpp"

namespace csos {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CheckResult make(const std::string& name, double residual, double tol, Clock::time_point t0,
                 const std::string& detail = "") {
    CheckResult c;
    c.name = name;
    c.residual = residual;
    c.tolerance = tol;
    c.pass = std::isfinite(residual) && residual < tol;
    c.detail = detail;
    c.seconds = since(t0);
    return c;
}

std::vector<std::vector<int>> combinations(int N, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 1);
    if (k == 0) return {{}};
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == N - k + i + 1) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

cplx oracle_pair(const BetheSolution& a, const BetheSolution& b, const LatticeConfig& lat) {
    return pairing(bethe_state(Direction::bra, a.roots, a.omega, lat), bethe_state(Direction::ket, b.roots, b.omega, lat));
}

}  // namespace

SafeBox::SafeBox(const EllipticContext& ctx, std::uint64_t seed)
    : re_max_(0.5 / ctx.eta()), im_max_(ctx.tau().imag() / (2.0 * ctx.eta())), rng_(seed) {}

cplx SafeBox::draw() {
    const double re = re_max_ * unit_(rng_);
    const double im = im_max_ * unit_(rng_);
    return {re, im};
}

CList SafeBox::draw(int count) {
    CList out;
    for (int i = 0; i < count; ++i) out.push_back(draw());
    return out;
}

double rel_err(cplx a, cplx b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

LatticeConfig random_lattice(const EllipticContext& ctx, int N, SafeBox& box) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        try {
            LatticeConfig lat(ctx, box.draw(N), box.draw());
            lat.validate();
            return lat;
        } catch (const Error&) {
        }
    }
    fail(ErrorKind::ConfigError, "could not draw a valid lattice");
}

std::vector<CheckResult> check_elliptic(const EllipticContext& ctx, int samples, std::uint64_t seed) {
    std::vector<CheckResult> out;
    SafeBox box(ctx, seed);
    auto t0 = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < samples; ++i)
        worst = std::max(worst, elliptic_identity_residual(IdentityKind::addition, box.draw(4), 0, ctx));
    out.push_back(make("elliptic addition", worst, 1e-10, t0));

    t0 = Clock::now();
    worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const int n = 1 + i % 4;
        worst = std::max(worst, elliptic_identity_residual(IdentityKind::frobenius, box.draw(2 * n + 1), n, ctx));
    }
    out.push_back(make("elliptic Frobenius n<=4", worst, 1e-10, t0));

    t0 = Clock::now();
    worst = 0.0;
    for (const int L : {3, 5, 7}) {
        const EllipticContext c(1, L, ctx.tau());
        SafeBox b(c, seed + static_cast<std::uint64_t>(L));
        for (int i = 0; i < samples; ++i)
            worst = std::max(worst, elliptic_identity_residual(IdentityKind::sum_L, b.draw(2), L, c));
    }
    out.push_back(make("elliptic sum-L, L in {3,5,7}", worst, 1e-10, t0));

    t0 = Clock::now();
    worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const CList p = box.draw(1);
        worst = std::max(worst, elliptic_identity_residual(IdentityKind::quasi_period, p, 0, ctx));
        worst = std::max(worst, elliptic_identity_residual(IdentityKind::L_period, p, 0, ctx));
    }
    out.push_back(make("elliptic quasi-periodicity", worst, 1e-10, t0));
    return out;
}

std::vector<CheckResult> check_r_matrix(const EllipticContext& ctx, int samples, std::uint64_t seed) {
    static const std::pair<RProperty, const char*> props[] = {{RProperty::dybe, "dynamical YBE"},
                                                              {RProperty::unitarity, "unitarity"},
                                                              {RProperty::crossing, "crossing"},
                                                              {RProperty::zero_weight, "zero weight"},
                                                              {RProperty::permutation_at_zero, "R(0)=P"}};
    std::vector<CheckResult> out;
    SafeBox box(ctx, seed);
    std::ostringstream eta;
    eta << " (eta=" << ctx.r() << "/" << ctx.L() << ")";
    for (const auto& [kind, name] : props) {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const CList p = box.draw(4);
            worst = std::max(worst, r_property_residual(kind, p[0], p[1], p[2], p[3], ctx));
        }
        out.push_back(make(std::string("R-matrix ") + name + eta.str(), worst, 1e-11, t0));
    }
    return out;
}

CheckResult check_rtt(const LatticeConfig& lat, int samples, std::uint64_t seed) {
    const auto t0 = Clock::now();
    SafeBox box(lat.ctx, seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const CList p = box.draw(3);
        worst = std::max(worst, rtt_residual(p[0], p[1], p[2], lat.xi, lat.ctx));
    }
    return make("RTT relation", worst, 1e-10, t0);
}

std::vector<CheckResult> check_partition(const EllipticContext& ctx, int N, int points, std::uint64_t seed) {
    SafeBox box(ctx, seed);
    auto t0 = Clock::now();
    double w1 = 0.0, w2 = 0.0, wg = 0.0, wsym = 0.0;
    for (int p = 0; p < points; ++p) {
        const CList u = box.draw(N), xi = box.draw(N);
        const cplx s = box.draw();
        const cplx bf = partition_function_bf(u, xi, s, ctx);
        const cplx z1 = partition_det(u, xi, s, {}, PartitionVariant::Z1, ctx);
        const cplx z2 = partition_det(u, xi, s, {}, PartitionVariant::Z2, ctx);
        w1 = std::max(w1, rel_err(bf, z1));
        w2 = std::max(w2, rel_err(bf, z2));
        for (int k = 0; k < 3; ++k) {
            const GammaPolicy gp = GammaPolicy::fixed_at(box.draw());
            wg = std::max(wg, rel_err(z1, partition_det(u, xi, s, gp, PartitionVariant::Z1, ctx)));
            wg = std::max(wg, rel_err(z2, partition_det(u, xi, s, gp, PartitionVariant::Z2, ctx)));
        }
        CList ur(u.rbegin(), u.rend()), xr(xi.rbegin(), xi.rend());
        wsym = std::max(wsym, rel_err(z1, partition_det(ur, xi, s, {}, PartitionVariant::Z1, ctx)));
        wsym = std::max(wsym, rel_err(z1, partition_det(u, xr, s, {}, PartitionVariant::Z1, ctx)));
    }
    const std::string tag = " N=" + std::to_string(N);
    std::vector<CheckResult> out;
    out.push_back(make("partition Z-1 vs brute force" + tag, w1, 1e-9, t0));
    out.push_back(make("partition Z-2 vs brute force" + tag, w2, 1e-9, t0));
    out.push_back(make("partition gamma independence" + tag, wg, 1e-9, t0));
    out.push_back(make("partition permutation symmetry" + tag, wsym, 1e-9, t0));
    return out;
}

std::vector<CheckResult> check_partition_recursion(const EllipticContext& ctx, int N, std::uint64_t seed) {
    SafeBox box(ctx, seed);
    const CList u = box.draw(N), xi = box.draw(N);
    const cplx s = box.draw();
    const CList u1(u.begin(), u.end() - 1), x1(xi.begin(), xi.end() - 1);
    const double Nd = N;
    const std::string tag = " N=" + std::to_string(N);
    std::vector<CheckResult> out;

    auto t0 = Clock::now();
    CList uz = u;
    uz.back() = xi.back();
    const cplx lhs = partition_function_bf(uz, xi, s, ctx);
    cplx rhs = N == 1 ? cplx(1.0) : partition_det(u1, x1, s + 1.0, {}, PartitionVariant::Z1, ctx);
    out.push_back(make("partition recursion at u_N = xi_N" + tag, rel_err(lhs, rhs), 1e-9, t0));

    // Residue at u_N = ξ_N − 1 by Richardson extrapolation of symmetric averages.
    t0 = Clock::now();
    auto f = [&](double eps) {
        CList ue = u;
        ue.back() = xi.back() - 1.0 + eps;
        return br(ue.back() - xi.back() + 1.0, ctx) / ctx.bracket_one() * partition_function_bf(ue, xi, s, ctx);
    };
    auto avg = [&](double eps) { return 0.5 * (f(eps) + f(-eps)); };
    const double h = 1e-3;
    const cplx lim = (4.0 * avg(h / 2) - avg(h)) / 3.0;
    cplx r2 = br(s + Nd, ctx) / br(s + Nd - 1.0, ctx);
    for (int j = 0; j < N - 1; ++j) {
        r2 *= br(u[j] - xi.back(), ctx) / br(u[j] - xi.back() + 1.0, ctx);
        r2 *= br(xi[j] - xi.back() + 1.0, ctx) / br(xi[j] - xi.back(), ctx);
    }
    r2 *= N == 1 ? cplx(1.0) : partition_det(u1, x1, s, {}, PartitionVariant::Z1, ctx);
    out.push_back(make("partition recursion at u_N = xi_N - 1" + tag, rel_err(lim, r2), 1e-9, t0));
    return out;
}

std::vector<CheckResult> check_partial_sp(const LatticeConfig& lat, int points, std::uint64_t seed) {
    const auto t0 = Clock::now();
    SafeBox box(lat.ctx, seed);
    const Census c1 = enumerate_solutions(1.0, lat);
    double wf = 0.0, wl = 0.0, wg = 0.0;
    for (int p = 0; p < points && !c1.solutions.empty(); ++p) {
        const BetheSolution& u = c1.solutions[static_cast<std::size_t>(p * 7) % c1.solutions.size()];
        const CList v = box.draw(lat.n);
        const cplx s = box.draw();
        const cplx bf = partial_scalar_product_bf(u.roots, v, s, lat);
        const cplx full = partial_sp_detsum(u.roots, u.omega, v, s, {}, SpForm::full_4n, lat);
        wf = std::max(wf, rel_err(bf, full));
        wl = std::max(wl, rel_err(bf, partial_sp_detsum(u.roots, u.omega, v, s, {}, SpForm::L_terms, lat)));
        for (int k = 0; k < 3; ++k) {
            const GammaPolicy gp = GammaPolicy::fixed_at(box.draw());
            wg = std::max(wg, rel_err(full, partial_sp_detsum(u.roots, u.omega, v, s, gp, SpForm::full_4n, lat)));
        }
    }
    const std::string tag = " n=" + std::to_string(lat.n);
    return {make("partial scalar product 4^n form vs brute force" + tag, wf, 1e-9, t0),
            make("partial scalar product L-term form vs brute force" + tag, wl, 1e-9, t0),
            make("partial scalar product gamma independence" + tag, wg, 1e-9, t0)};
}

std::vector<CheckResult> check_scalar_products(const LatticeConfig& lat, const Census& census1, int points,
                                               std::uint64_t seed) {
    SafeBox box(lat.ctx, seed);
    const auto& sols = census1.solutions;
    const CList omegas = omega_values(lat.n, lat.ctx);
    const std::string tag = " n=" + std::to_string(lat.n);
    std::vector<CheckResult> out;

    auto t0 = Clock::now();
    double worst = 0.0;
    for (int p = 0; p < points && !sols.empty(); ++p) {
        const BetheSolution& u = sols[static_cast<std::size_t>(p * 3) % sols.size()];
        const CList v = box.draw(lat.n);
        const cplx wv = omegas[static_cast<std::size_t>(p) % omegas.size()];
        const cplx o = pairing(bethe_state(Direction::bra, u.roots, u.omega, lat), bethe_state(Direction::ket, v, wv, lat));
        worst = std::max(worst, rel_err(o, scalar_product_det(u, v, wv, lat).value));
    }
    out.push_back(make("scalar product vs height-summed oracle" + tag, worst, 1e-9, t0));

    t0 = Clock::now();
    std::vector<cplx> norms;
    double wn = 0.0, wk = 0.0;
    for (const auto& s : sols) {
        const cplx o = oracle_pair(s, s, lat);
        norms.push_back(o);
        const cplx g = gaudin_norm(s, lat);
        wn = std::max(wn, rel_err(o, g));
        wk = std::max(wk, rel_err(g, norm_det(s, lat)));
    }
    out.push_back(make("Gaudin norm vs oracle norm" + tag, wn, 1e-9, t0));
    out.push_back(make("Gaudin form vs twisted-norm form at kappa=1" + tag, wk, 1e-11, t0));

    t0 = Clock::now();
    double wo = 0.0;
    int fallback = 0;
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = 0; b < sols.size(); ++b) {
            if (a == b) continue;
            const DetValue d = scalar_product_det(sols[a], sols[b].roots, sols[b].omega, lat);
            fallback += d.route == Route::height_sum;
            wo = std::max(wo, std::abs(d.value) / std::sqrt(std::abs(norms[a] * norms[b])));
        }
    std::ostringstream det;
    det << sols.size() * (sols.size() - 1) << " ordered pairs, " << fallback << " via height-sum route";
    out.push_back(make("orthogonality of distinct eigenstates" + tag, wo, 1e-8, t0, det.str()));
    return out;
}

std::vector<CheckResult> check_inverse_problem(const LatticeConfig& lat) {
    auto t0 = Clock::now();
    double w1 = 0.0;
    for (int site = 1; site <= lat.N; ++site)
        for (const int a : {1, -1}) w1 = std::max(w1, inverse_problem_residual(site, a, a, lat));
    std::vector<CheckResult> out;
    out.push_back(make("inverse problem single site", w1, 1e-9, t0));
    t0 = Clock::now();
    double w2 = 0.0;
    for (const int a : {1, -1})
        for (const int b : {1, -1}) w2 = std::max(w2, inverse_problem_residual(1, std::vector<int>{a, b}, lat));
    out.push_back(make("inverse problem two-site product", w2, 1e-9, t0));
    return out;
}

std::vector<CheckResult> check_form_factors(const LatticeConfig& lat, const Census& census1, int pair_limit,
                                            std::uint64_t seed) {
    const auto t0 = Clock::now();
    const auto& sols = census1.solutions;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (pair_limit < 0) {
        for (std::size_t a = 0; a < sols.size(); ++a)
            for (std::size_t b = 0; b < sols.size(); ++b) pairs.emplace_back(a, b);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, sols.size() - 1);
        while (static_cast<int>(pairs.size()) < pair_limit) {
            const std::size_t a = pick(rng), b = pick(rng);
            if (a != b) pairs.emplace_back(a, b);
        }
    }
    std::vector<DynamicalState> bras, kets;
    std::vector<cplx> norms;
    for (const auto& s : sols) {
        bras.push_back(bethe_state(Direction::bra, s.roots, s.omega, lat));
        kets.push_back(bethe_state(Direction::ket, s.roots, s.omega, lat));
        norms.push_back(pairing(bras.back(), kets.back()));
    }
    double worst = 0.0, cons = 0.0;
    int routed = 0;
    for (const auto& [a, b] : pairs) {
        const double scale = std::sqrt(std::abs(norms[a] * norms[b]));
        for (int site = 1; site <= lat.N; ++site) {
            cplx vals[3];
            for (int op = 0; op < 3; ++op) {
                const DetValue d = form_factor_det(static_cast<FormFactorOp>(op), site, sols[a], sols[b], lat);
                routed += d.route == Route::height_sum;
                vals[op] = d.value;
                const cplx bf = local_matrix_element_bf(static_cast<LocalOp>(op), site, bras[a], kets[b], lat);
                worst = std::max(worst, std::abs(bf - d.value) / std::max({std::abs(bf), std::abs(d.value), scale}));
            }
            // Pairs in different sectors have all three elements at rounding level; the
            // normalized scale keeps those from reading as O(1) failures.
            const double sc = std::max({std::abs(vals[0]), std::abs(vals[1]), std::abs(vals[2]), scale});
            cons = std::max(cons, std::abs(vals[2] - (vals[1] - vals[0])) / sc);
        }
    }
    std::ostringstream det;
    det << pairs.size() << " pairs x " << lat.N << " sites, " << routed << " values via height-sum route";
    const std::string tag = " N=" + std::to_string(lat.N);
    return {make("form factors vs brute force" + tag, worst, 1e-8, t0, det.str()),
            make("sigma_z = E++ - E-- consistency" + tag, cons, 1e-11, t0)};
}

std::vector<CheckResult> check_recursion(const LatticeConfig& lat, const Census& census1, std::uint64_t seed) {
    const auto t0 = Clock::now();
    SafeBox box(lat.ctx, seed);
    const int n = lat.n, N = lat.N;
    const BetheSolution& u = census1.solutions.at(0);
    const CList v = box.draw(n);
    const cplx s = box.draw();
    auto closed = [&](int k, const std::vector<int>& ell) {
        return g_function_detsum(k, ell, u.roots, u.omega, CList(v.begin(), v.begin() + k), s, {}, lat);
    };
    double wf = 0.0, wr = 0.0, wi = 0.0;
    for (int k = 0; k <= n; ++k) {
        for (const auto& ell : combinations(N, n - k)) {
            const CList vk(v.begin(), v.begin() + k);
            const cplx c = closed(k, ell);
            wf = std::max(wf, rel_err(g_function_fbasis(ell, u.roots, vk, s, lat), c));
            if (k > 0) {
                const cplx step = g_recursion_step(k, ell, v[k - 1], s, lat,
                                                   [&](const std::vector<int>& e) { return closed(k - 1, e); });
                wr = std::max(wr, rel_err(step, c));
            } else {
                // G^{(0)} from the n×n domain-wall partition function.
                CList xl;
                for (const int l : ell) xl.push_back(lat.xi[l - 1]);
                cplx init = partition_det(u.roots, xl, s - static_cast<double>(n), {}, PartitionVariant::Z2, lat.ctx);
                for (int j = 1; j <= N; ++j) {
                    if (std::find(ell.begin(), ell.end(), j) != ell.end()) continue;
                    for (const cplx a : u.roots) init *= br(a - lat.xi[j - 1], lat.ctx) / br(a - lat.xi[j - 1] + 1.0, lat.ctx);
                    for (const int l : ell)
                        init *= br(lat.xi[l - 1] - lat.xi[j - 1] + 1.0, lat.ctx) / br(lat.xi[l - 1] - lat.xi[j - 1], lat.ctx);
                }
                wi = std::max(wi, rel_err(init, c));
            }
        }
    }
    const double sn = rel_err(partial_scalar_product_fbasis(u.roots, v, s, lat), partial_scalar_product_bf(u.roots, v, s, lat));
    const std::string tag = " n=" + std::to_string(n);
    return {make("G-function closed form vs F-basis" + tag, wf, 1e-9, t0),
            make("G-function closed form vs recursion step" + tag, wr, 1e-9, t0),
            make("G-function k=0 vs partition function" + tag, wi, 1e-10, t0),
            make("F-basis scalar product vs direct" + tag, sn, 1e-10, t0)};
}

std::vector<CheckResult> check_witness(const LatticeConfig& lat, const Census& census1, int g_points,
                                       std::uint64_t seed) {
    auto t0 = Clock::now();
    const auto& sols = census1.solutions;
    double worst = 0.0;
    int used = 0, skipped = 0;
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = 0; b < sols.size(); ++b) {
            if (a == b) continue;
            try {
                worst = std::max(worst, orthogonality_witness(sols[a], sols[b], lat).residual);
                ++used;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::GammaDegenerate && e.kind() != ErrorKind::CoincidingRoots) throw;
                ++skipped;
            }
        }
    std::ostringstream det;
    det << used << " pairs, " << skipped << " skipped (lattice gamma or shared roots)";
    std::vector<CheckResult> out;
    out.push_back(make("orthogonality witness M^T w = 0", worst, 1e-10, t0, det.str()));

    t0 = Clock::now();
    SafeBox box(lat.ctx, seed);
    double wg = 0.0;
    for (int p = 0; p < g_points; ++p) {
        const int n = 1 + p % 3;
        const CList u = box.draw(n), v = box.draw(n);
        const cplx eps = box.draw() * 0.2;
        wg = std::max(wg, g_epsilon_identity(u, v, 1 + p % n, eps, lat.ctx).residual);
    }
    out.push_back(make("residue identity sum form = product form", wg, 1e-10, t0));
    return out;
}

std::vector<CheckResult> check_census(const LatticeConfig& lat, cplx kappa, int threads) {
    const auto t0 = Clock::now();
    const Census c = enumerate_solutions(kappa, lat, {}, threads);
    double worst = 0.0;
    for (const auto& s : c.solutions) worst = std::max(worst, s.residual_norm);
    std::ostringstream det;
    det << c.solutions.size() << " of " << c.expected << " solutions, " << c.failures.size() << " failed paths, "
        << c.duplicates << " duplicates, " << c.inadmissible << " inadmissible";
    std::ostringstream name;
    name << "census N=" << lat.N << " L=" << lat.L() << " kappa=" << kappa.real();
    CheckResult r = make(name.str(), c.complete() ? worst : INFINITY, 1e-10, t0, det.str());
    return {r};
}

CheckResult check_seed_asymptotics(const LatticeConfig& lat) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    const CList omegas = omega_values(lat.n, lat.ctx);
    for (const auto& label : all_seed_labels(lat)) {
        double slope = 1e-300;
        for (const cplx x : seed_slopes(label, lat)) slope = std::max(slope, std::abs(x));
        double err[2];
        const double ks[2] = {1e-3 / slope, 1e-4 / slope};
        for (int i = 0; i < 2; ++i) {
            const CList seed = seed_roots(label, ks[i], lat);
            const BetheSolution s = refine(seed, omegas[label.branch], ks[i], lat);
            double e = 0.0;
            for (std::size_t j = 0; j < seed.size(); ++j) e = std::max(e, std::abs(s.roots[j] - seed[j]));
            err[i] = e;
        }
        const double order = std::log10(err[0] / err[1]);
        worst = std::max(worst, std::abs(order - 2.0));
    }
    return make("seed asymptotics O(kappa^2) error order N=" + std::to_string(lat.N), worst, 0.2, t0,
                "residual is |observed order - 2|");
}

std::vector<CheckResult> check_generating(const LatticeConfig& lat, const BetheSolution& ground, int m,
                                          const std::vector<double>& kappas, int threads) {
    const auto t0 = Clock::now();
    const auto bra = bethe_state(Direction::bra, ground.roots, ground.omega, lat);
    const auto ket = bethe_state(Direction::ket, ground.roots, ground.omega, lat);
    double worst = 0.0;
    for (const double k : kappas) {
        const Census c = enumerate_solutions(k, lat, {}, threads);
        worst = std::max(worst, rel_err(two_point_generating(ground, m, c, lat, threads),
                                        generating_function_bf(k, m, bra, ket, lat)));
    }
    const Census c1 = enumerate_solutions(1.0, lat, {}, threads);
    const double at_one = std::abs(two_point_generating(ground, m, c1, lat, threads) - 1.0);
    std::ostringstream tag;
    tag << " N=" << lat.N << " m=" << m;
    return {make("generating function form-factor sum vs brute force" + tag.str(), worst, 1e-6, t0),
            make("generating function at kappa=1 equals 1" + tag.str(), at_one, 1e-8, t0)};
}

std::vector<CheckResult> check_master_residue(const LatticeConfig& lat, const BetheSolution& ground, cplx kappa,
                                              int m, int terms) {
    const auto t0 = Clock::now();
    const Census c = enumerate_solutions(kappa, lat);
    double w_sq = 0.0, w_pair = 0.0;
    const int count = std::min<int>(terms, static_cast<int>(c.solutions.size()));
    for (int i = 0; i < count; ++i) {
        const BetheSolution& v = c.solutions[i];
        const cplx term = sum_q_term(ground, v, m, lat).value;
        w_sq = std::max(w_sq, rel_err(master_residue(v, ground, m, lat, HeightFactor::squared), term));
        w_pair = std::max(w_pair, rel_err(master_residue(v, ground, m, lat, HeightFactor::paired), term));
    }
    std::ostringstream det;
    det << count << " census poles";
    return {make("master-equation residue, squared height sum", w_sq, 1e-5, t0, det.str()),
            make("master-equation residue, paired height sums", w_pair, 1e-5, t0, det.str())};
}

}  // namespace csos
