#include "csos/determinants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csos/oracle.hpp"

namespace csos {

namespace {

// Kahan–Babuška accumulation; the subset sums cancel heavily.
struct CompensatedSum {
    cplx sum = 0.0, comp = 0.0;
    void add(cplx x) {
        const cplx t = sum + x;
        const auto part = [](double s, double xx, double tt) {
            return std::abs(s) >= std::abs(xx) ? (s - tt) + xx : (xx - tt) + s;
        };
        comp += cplx(part(sum.real(), x.real(), t.real()), part(sum.imag(), x.imag(), t.imag()));
        sum = t;
    }
    cplx value() const { return sum + comp; }
};

cplx total(const CList& x) {
    cplx t = 0.0;
    for (const cplx y : x) t += y;
    return t;
}

int bits(unsigned m) { return __builtin_popcount(m); }

// N_γ(u; c)_{jk} = [u_j − c_k + γ]/[u_j − c_k]
CMatrix n_matrix(const CList& u, const CList& c, cplx gamma, const EllipticContext& ctx) {
    const int n = static_cast<int>(u.size());
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) m(j, k) = br(u[j] - c[k] + gamma, ctx) / br_nz(u[j] - c[k], ctx, "[u_j - v_k]");
    return m;
}

// ∏_{j<k}[a_j − a_k][b_k − b_j]
cplx vandermonde_pair(const CList& a, const CList& b, const EllipticContext& ctx) {
    cplx p = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = j + 1; k < a.size(); ++k)
            p *= br_nz(a[j] - a[k], ctx, "[u_j - u_k]") * br_nz(b[k] - b[j], ctx, "[v_k - v_j]");
    return p;
}

bool small_bracket(cplx x, double eps, const EllipticContext& ctx) {
    const BracketEval e = bracket_eval(x, 1, ctx);
    return std::abs(e.value) < eps * std::max(1.0, e.scale);
}

void require_bethe(const CList& u, cplx omega, cplx kappa, const LatticeConfig& lat, const char* who) {
    double r = 0.0;
    try {
        r = bethe_residual_scaled(u, omega, kappa, lat);
    } catch (const Error&) {
        r = INFINITY;
    }
    if (!(r < 1e-8)) {
        std::ostringstream os;
        os << who << ": scaled Bethe residual " << r << " exceeds 1e-8";
        fail(ErrorKind::NotABetheSolution, os.str());
    }
}

bool same_roots(const CList& a, const CList& b, const EllipticContext& ctx) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const cplx x : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j)
            if (!used[j] && small_bracket(x - b[j], 1e-7, ctx)) used[j] = found = true;
        if (!found) return false;
    }
    return true;
}

cplx prod_shift(const CList& u, cplx v, double shift, const EllipticContext& ctx) {
    cplx p = 1.0;
    for (const cplx x : u) p *= br(x - v + shift, ctx);
    return p;
}

// Tries γ, then γ + m(0.113 + 0.071i), m = 1..5, until ok(γ).
template <class Ok>
cplx reselect_gamma(cplx g, Ok ok) {
    for (int attempt = 0; attempt <= 5; ++attempt) {
        const cplx cand = g + static_cast<double>(attempt) * cplx(0.113, 0.071);
        if (ok(cand)) return cand;
    }
    fail(ErrorKind::GammaDegenerate, "no admissible gamma after 5 reselections");
}

cplx free_gamma(const GammaPolicy& p) { return p.mode == GammaPolicy::Mode::fixed ? p.gamma : kFreeGamma; }

cplx ket_multiplier(cplx omega, cplx s, int n, const EllipticContext& ctx) {
    cplx phi = omega_pow(omega, s);
    for (int j = 1; j <= n; ++j) phi *= ctx.bracket_one() / br_nz(s - static_cast<double>(j), ctx, "[s-j]");
    return phi;
}

cplx bra_multiplier(cplx omega, cplx s, int n, const EllipticContext& ctx) {
    cplx phi = 1.0 / omega_pow(omega, s);
    for (int j = 0; j < n; ++j) phi *= br(s + static_cast<double>(j), ctx) / ctx.bracket_one();
    return phi;
}

cplx tau_product(const BetheSolution& sol, int upto, const LatticeConfig& lat, bool check) {
    cplx p = 1.0;
    for (int k = 0; k < upto; ++k) {
        const cplx t = eigenvalue_tau(lat.xi[k], sol, lat);
        if (check && std::abs(t) < 1e-12) fail(ErrorKind::SingularTransfer, "tau(xi_k) vanishes on the ket");
        p *= t;
    }
    return p;
}

// K̃(x) = ψ(x−1) − ψ(x+1)
cplx k_tilde(cplx x, const EllipticContext& ctx) { return br_logd(x - 1.0, ctx) - br_logd(x + 1.0, ctx); }

}  // namespace

const char* route_name(Route r) {
    switch (r) {
        case Route::single_determinant: return "single_determinant";
        case Route::diagonal_limit: return "diagonal_limit";
        case Route::height_sum: return "height_sum";
    }
    return "unknown";
}

cplx partition_det(const CList& u, const CList& xi, cplx s, const GammaPolicy& gamma, PartitionVariant variant,
                   const EllipticContext& ctx) {
    const int N = static_cast<int>(u.size());
    if (static_cast<int>(xi.size()) != N || N == 0) fail(ErrorKind::DegenerateInput, "partition_det needs |u| = |xi| > 0");
    const double Nd = N;
    const cplx du = total(u) - total(xi);
    const double eps = gamma.epsilon_gamma;
    const cplx g = reselect_gamma(free_gamma(gamma), [&](cplx c) {
        return std::abs(br(c, ctx)) >= eps && std::abs(br(du + c + s + Nd, ctx)) >= eps;
    });

    cplx pref = br(s + Nd, ctx) / (std::pow(br(g, ctx), N) * br(du + g + s + Nd, ctx));
    for (const cplx a : u)
        for (const cplx x : xi) pref *= br(a - x, ctx);
    pref /= vandermonde_pair(u, xi, ctx);

    CompensatedSum acc;
    for (unsigned S = 0; S < (1u << N); ++S) {
        CList rows = u, cols = xi;
        for (int j = 0; j < N; ++j) {
            if (!((S >> j) & 1u)) continue;
            if (variant == PartitionVariant::Z1)
                rows[j] += 1.0;
            else
                cols[j] -= 1.0;
        }
        const double m = bits(S);
        const cplx w = ((bits(S) % 2) ? -1.0 : 1.0) * br(g + s + Nd - m, ctx) / br_nz(s + Nd - m, ctx, "[s+N-|S|]");
        acc.add(w * det(n_matrix(rows, cols, g, ctx)));
    }
    return pref * acc.value();
}

cplx partial_sp_subset_sum(const CList& u, cplx omega_u, const CList& v, cplx s, cplx gamma,
                           const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const double nd = n;
    const cplx sg = lat.aleph_sign();
    cplx pref = br(s - nd, ctx) / (std::pow(br_nz(gamma, ctx, "[gamma]"), n) *
                                   br_nz(total(u) - total(v) + gamma + s, ctx, "[|u|-|v|+gamma+s]"));
    for (int j = 1; j < n; ++j) pref *= br(s - static_cast<double>(j), ctx) / br_nz(s + static_cast<double>(j), ctx);
    for (const cplx x : u) pref *= d_fn(x, lat);
    pref /= vandermonde_pair(u, v, ctx);

    // Column weights with d(v_j) already cancelled against the prefactor.
    CList fa(n), fd(n);
    for (int j = 0; j < n; ++j) {
        fa[j] = sg * prod_shift(u, v[j], 1.0, ctx);
        fd[j] = d_fn(v[j], lat) / (omega_u * omega_u) * prod_shift(u, v[j], -1.0, ctx);
    }
    CompensatedSum acc;
    const unsigned full = 1u << n;
    for (unsigned S = 0; S < full; ++S) {
        for (unsigned St = 0; St < full; ++St) {
            const SubsetIndex idx{S, St};
            cplx w = ((bits(S) + bits(St)) % 2) ? -1.0 : 1.0;
            CList cols(n);
            for (int j = 0; j < n; ++j) {
                w *= ((St >> j) & 1u) ? fd[j] : fa[j];
                cols[j] = v[j] - static_cast<double>(idx.delta(j + 1));
            }
            const double m = bits(St) - static_cast<double>(bits(S));
            w *= br(gamma + s + m, ctx) / br_nz(s + m, ctx, "[s-|S|+|S~|]");
            acc.add(w * det(n_matrix(u, cols, gamma, ctx)));
        }
    }
    return pref * acc.value();
}

namespace {

cplx partial_sp_L_terms(const CList& u, cplx omega_u, const CList& v, cplx s, cplx gamma, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const int L = ctx.L();
    const double Ld = L;
    const cplx sg = lat.aleph_sign();
    const cplx gb = br_nz(gamma, ctx, "[gamma]");
    cplx pref = gb * br(s, ctx) / (ctx.bracket_prime_zero() * br_nz(total(u) - total(v) + gamma + s, ctx));
    for (int j = 1; j <= n; ++j)
        pref *= br(s - static_cast<double>(j), ctx) / br_nz(s + static_cast<double>(j) - 1.0, ctx);
    for (const cplx x : u) pref *= d_fn(x, lat);
    pref /= vandermonde_pair(u, v, ctx);

    const cplx tau_over_eta = ctx.tau() / ctx.eta();
    const cplx dzero_L = bracket(0.0, 1, L, ctx);
    const cplx q = std::exp(2.0 * kI * kPi * ctx.eta());
    CList fa(n), fd(n);
    for (int j = 0; j < n; ++j) {
        fa[j] = sg * prod_shift(u, v[j], 1.0, ctx);
        fd[j] = d_fn(v[j], lat) / (omega_u * omega_u) * prod_shift(u, v[j], -1.0, ctx);
    }
    CompensatedSum acc;
    for (int l = 0; l < L; ++l) {
        const double ld = l;
        const cplx ql = std::pow(q, l);
        CMatrix om(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cplx x = u[i] - v[j];
                const cplx base = br(x + gamma, ctx) / br_nz(x, ctx);
                const cplx up = base - br(x + gamma + 1.0, ctx) / (ql * br_nz(x + 1.0, ctx));
                const cplx dn = base - ql * br(x + gamma - 1.0, ctx) / br_nz(x - 1.0, ctx);
                om(i, j) = (up * fa[j] + dn * fd[j]) / gb;
            }
        const cplx w = std::exp(2.0 * kI * kPi * ctx.eta() * ld * s) * bracket(Ld * s + gamma + ld * tau_over_eta, 0, L, ctx) *
                       dzero_L / (bracket(Ld * s, 0, L, ctx) * bracket(gamma + ld * tau_over_eta, 0, L, ctx));
        acc.add(w * det(om));
    }
    return pref * acc.value();
}

}  // namespace

cplx partial_sp_detsum(const CList& u, cplx omega_u, const CList& v, cplx s, const GammaPolicy& gamma, SpForm form,
                       const LatticeConfig& lat) {
    if (u.size() != v.size()) fail(ErrorKind::DegenerateInput, "partial scalar product needs |u| = |v|");
    require_bethe(u, omega_u, 1.0, lat, "partial_sp_detsum");
    const EllipticContext& ctx = lat.ctx;
    const cplx du = total(u) - total(v);
    const double eps = gamma.epsilon_gamma;
    const cplx g = reselect_gamma(free_gamma(gamma), [&](cplx c) {
        return std::abs(br(c, ctx)) >= eps && std::abs(br(du + c + s, ctx)) >= eps;
    });
    return form == SpForm::full_4n ? partial_sp_subset_sum(u, omega_u, v, s, g, lat)
                                   : partial_sp_L_terms(u, omega_u, v, s, g, lat);
}

cplx height_sum(cplx omega_u, cplx omega_v, cplx gamma, const LatticeConfig& lat) {
    CompensatedSum acc;
    for (int k = 0; k < lat.L(); ++k) {
        const cplx s = lat.height(k);
        acc.add(omega_pow(omega_v, s) / omega_pow(omega_u, s) * br(gamma + s, lat.ctx) / br_nz(s, lat.ctx, "[s]"));
    }
    return acc.value() / static_cast<double>(lat.L());
}

CMatrix omega_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma, cplx kappa,
                     const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const cplx gb = br_nz(gamma, ctx, "[gamma]");
    const cplx sg = lat.aleph_sign();
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        const cplx fa = sg * prod_shift(u, v[j], 1.0, ctx);
        const cplx fd = kappa / (omega_u * omega_u) * d_fn(v[j], lat) * prod_shift(u, v[j], -1.0, ctx);
        for (int i = 0; i < n; ++i) {
            const cplx x = u[i] - v[j];
            const cplx base = br(x + gamma, ctx) / br_nz(x, ctx, "[u_i - v_j]");
            const cplx up = base - omega_v / omega_u * br(x + gamma + 1.0, ctx) / br_nz(x + 1.0, ctx);
            const cplx dn = base - omega_u / omega_v * br(x + gamma - 1.0, ctx) / br_nz(x - 1.0, ctx);
            m(i, j) = (up * fa + dn * fd) / gb;
        }
    }
    return m;
}

CMatrix omega_matrix_limit(const CList& u, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const cplx dz = ctx.bracket_prime_zero();
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        const cplx col = lat.aleph_sign() * prod_shift(u, u[j], 1.0, ctx) / dz;
        cplx diag = d_logd(u[j], lat);
        for (int t = 0; t < n; ++t) diag -= k_tilde(u[j] - u[t], ctx);
        for (int i = 0; i < n; ++i) m(i, j) = col * (k_tilde(u[i] - u[j], ctx) + (i == j ? diag : cplx(0.0)));
    }
    return m;
}

cplx scalar_product_height_sum(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma,
                               const LatticeConfig& lat) {
    const int n = static_cast<int>(u.size());
    CompensatedSum acc;
    for (int k = 0; k < lat.L(); ++k) {
        const cplx s = lat.height(k);
        acc.add(bra_multiplier(omega_u, s, n, lat.ctx) * ket_multiplier(omega_v, s, n, lat.ctx) *
                partial_sp_subset_sum(u, omega_u, v, s, gamma, lat));
    }
    return acc.value() / static_cast<double>(lat.L());
}

namespace {

cplx diag_prefactor(const CList& u, const LatticeConfig& lat) {
    cplx p = 1.0;
    for (const cplx x : u) p *= d_fn(x, lat);
    for (std::size_t j = 0; j < u.size(); ++j)
        for (std::size_t k = 0; k < u.size(); ++k)
            if (j != k) p /= br_nz(u[j] - u[k], lat.ctx, "[u_j - u_k]");
    return p;
}

}  // namespace

DetValue scalar_product_det(const BetheSolution& bra, const CList& v, cplx omega_v, const LatticeConfig& lat,
                            const GammaPolicy& gamma) {
    const EllipticContext& ctx = lat.ctx;
    const CList& u = bra.roots;
    const int n = static_cast<int>(u.size());
    if (static_cast<int>(v.size()) != n) fail(ErrorKind::DegenerateInput, "scalar product needs |u| = |v|");
    require_bethe(u, bra.omega, bra.kappa, lat, "scalar_product_det");
    if (!omega_admissible(omega_v, n, ctx)) fail(ErrorKind::MultiplierNotAdmissible, "(-1)^{rn} omega_v^L != 1");

    const cplx g = total(v) - total(u);
    const bool coincide = std::abs(omega_v - bra.omega) < 1e-10 && same_roots(u, v, ctx);
    DetValue out;
    if (gamma.mode == GammaPolicy::Mode::limit_zero || (coincide && small_bracket(g, gamma.epsilon_gamma, ctx))) {
        // The κ twist drops out of the log-derivative of the Bethe equations, so the limit is κ-free.
        const DetResult d = det_lu(omega_matrix_limit(u, lat));
        out.value = diag_prefactor(u, lat) * d.value;
        out.route = Route::diagonal_limit;
        out.rcond = d.rcond;
        return out;
    }
    if (small_bracket(g, gamma.epsilon_gamma, ctx)) {
        if (std::abs(bra.kappa - 1.0) > 1e-12)
            fail(ErrorKind::GammaDegenerate, "lattice-degenerate gamma with a twisted bra");
        out.value = scalar_product_height_sum(u, bra.omega, v, omega_v, kFreeGamma, lat);
        out.route = Route::height_sum;
        return out;
    }
    cplx pref = height_sum(bra.omega, omega_v, g, lat);
    for (const cplx x : u) pref *= d_fn(x, lat);
    pref /= vandermonde_pair(u, v, ctx);
    const DetResult d = det_lu(omega_matrix(u, bra.omega, v, omega_v, g, bra.kappa, lat));
    out.value = pref * d.value;
    out.rcond = d.rcond;
    return out;
}

cplx norm_det(const BetheSolution& sol, const LatticeConfig& lat) {
    const int n = static_cast<int>(sol.roots.size());
    const cplx pref = diag_prefactor(sol.roots, lat) / std::pow(-lat.ctx.bracket_prime_zero(), n);
    return pref * det(y_jacobian(sol, lat));
}

cplx gaudin_norm(const BetheSolution& sol, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const CList& u = sol.roots;
    const int n = static_cast<int>(u.size());
    CMatrix phi(n, n);
    for (int j = 0; j < n; ++j) {
        cplx diag = -d_logd(u[j], lat);
        for (int t = 0; t < n; ++t) diag += k_tilde(u[j] - u[t], ctx);
        for (int k = 0; k < n; ++k) phi(j, k) = -k_tilde(u[j] - u[k], ctx) + (j == k ? diag : cplx(0.0));
    }
    const double sign = ((n * ctx.r() * lat.aleph) % 2 == 0) ? 1.0 : -1.0;
    cplx pref = sign / std::pow(-ctx.bracket_prime_zero(), n);
    for (const cplx x : u) pref *= d_fn(x, lat);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            pref *= br(u[j] - u[k] + 1.0, ctx);
            if (j != k) pref /= br_nz(u[j] - u[k], ctx, "[u_j - u_k]");
        }
    return pref * det(phi);
}

CMatrix p_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma, cplx xi_i,
                 const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const cplx gb = br_nz(gamma, ctx, "[gamma]");
    CMatrix p(n, n);
    for (int b = 0; b < n; ++b) {
        cplx right = lat.aleph_sign();
        for (int t = 0; t < n; ++t)
            right *= br(v[t] - v[b] + 1.0, ctx) * br(u[t] - xi_i + 1.0, ctx) / br_nz(v[t] - xi_i + 1.0, ctx);
        for (int a = 0; a < n; ++a) {
            const cplx x = u[a] - xi_i;
            const cplx left = (br(x + gamma, ctx) / br_nz(x, ctx, "[u_a - xi_i]") -
                               omega_v / omega_u * br(x + gamma + 1.0, ctx) / br_nz(x + 1.0, ctx)) / gb;
            p(a, b) = left * right;
        }
    }
    return p;
}

CMatrix p_matrix_limit(const CList& u, cplx xi_i, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    CMatrix p(n, n);
    for (int b = 0; b < n; ++b) {
        const cplx col = lat.aleph_sign() * prod_shift(u, u[b], 1.0, ctx) / ctx.bracket_prime_zero();
        for (int a = 0; a < n; ++a) p(a, b) = col * (br_logd(u[a] - xi_i, ctx) - br_logd(u[a] - xi_i + 1.0, ctx));
    }
    return p;
}

namespace {

// E^{--} through the height-resolved D-commutation form, valid at any free γ.
cplx e_mm_height_sum(int site, const BetheSolution& bra, const BetheSolution& ket, cplx gamma,
                     const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const CList& u = bra.roots;
    const CList& v = ket.roots;
    const int n = static_cast<int>(v.size());
    const double nd = n;
    const cplx xi_i = lat.xi[site - 1];
    const cplx pref = tau_product(bra, site - 1, lat, false) / tau_product(ket, site, lat, true);
    CList coef(n);
    for (int j = 0; j < n; ++j) {
        cplx c = lat.aleph_sign() * d_fn(v[j], lat) / br_nz(v[j] - xi_i, ctx, "[v_j - xi_i]");
        for (int l = 0; l < n; ++l)
            if (l != j) c *= br(v[j] - v[l] + 1.0, ctx) / br_nz(v[j] - v[l], ctx);
        coef[j] = c;
    }
    CompensatedSum acc;
    for (int k = 0; k < lat.L(); ++k) {
        const cplx s = lat.height(k);
        const cplx f = bra_multiplier(bra.omega, s, n, ctx) * ket_multiplier(ket.omega, s - 1.0, n, ctx) *
                       br(s - nd - 1.0, ctx) * ctx.bracket_one() / (br_nz(s, ctx) * br_nz(s - 1.0, ctx));
        cplx inner = 0.0;
        for (int j = 0; j < n; ++j) {
            CList vh = v;
            vh[j] = xi_i;
            inner += coef[j] * br(s + v[j] - xi_i, ctx) * partial_sp_subset_sum(u, bra.omega, vh, s, gamma, lat);
        }
        acc.add(f * inner);
    }
    return pref * acc.value() / static_cast<double>(lat.L());
}

}  // namespace

DetValue form_factor_det(FormFactorOp op, int site, const BetheSolution& bra, const BetheSolution& ket,
                         const LatticeConfig& lat, const GammaPolicy& gamma) {
    const EllipticContext& ctx = lat.ctx;
    if (site < 1 || site > lat.N) fail(ErrorKind::DegenerateInput, "site out of range");
    if (std::abs(bra.kappa - 1.0) > 1e-12 || std::abs(ket.kappa - 1.0) > 1e-12)
        fail(ErrorKind::DegenerateInput, "form factors need untwisted eigenstates");
    require_bethe(bra.roots, bra.omega, 1.0, lat, "form_factor_det (bra)");
    require_bethe(ket.roots, ket.omega, 1.0, lat, "form_factor_det (ket)");
    const CList& u = bra.roots;
    const CList& v = ket.roots;
    const cplx xi_i = lat.xi[site - 1];
    const cplx g = total(v) - total(u);
    const bool coincide = std::abs(ket.omega - bra.omega) < 1e-10 && same_roots(u, v, ctx);

    auto combine = [&](const CMatrix& om, const CMatrix& p, cplx pref, DetValue& out) {
        DetResult d0{1.0, 1.0}, d1{1.0, 1.0}, d2{1.0, 1.0};
        switch (op) {
            case FormFactorOp::E_mm:
                d0 = det_lu(om);
                d1 = det_lu(om - p);
                out.value = pref * (d0.value - d1.value);
                out.rcond = std::min(d0.rcond, d1.rcond);
                break;
            case FormFactorOp::E_pp:
                d1 = det_lu(om - p);
                out.value = pref * d1.value;
                out.rcond = d1.rcond;
                break;
            case FormFactorOp::sigma_z:
                d2 = det_lu(om - 2.0 * p);
                out.value = pref * d2.value;
                out.rcond = d2.rcond;
                break;
        }
    };

    DetValue out;
    if (gamma.mode == GammaPolicy::Mode::limit_zero || (coincide && small_bracket(g, gamma.epsilon_gamma, ctx))) {
        out.route = Route::diagonal_limit;
        combine(omega_matrix_limit(u, lat), p_matrix_limit(u, xi_i, lat), diag_prefactor(u, lat), out);
        return out;
    }
    if (small_bracket(g, gamma.epsilon_gamma, ctx)) {
        out.route = Route::height_sum;
        const cplx emm = e_mm_height_sum(site, bra, ket, kFreeGamma, lat);
        if (op == FormFactorOp::E_mm) {
            out.value = emm;
            return out;
        }
        const cplx sp = scalar_product_height_sum(u, bra.omega, v, ket.omega, kFreeGamma, lat);
        out.value = op == FormFactorOp::E_pp ? sp - emm : sp - 2.0 * emm;
        return out;
    }
    cplx pref = tau_product(bra, site - 1, lat, false) / tau_product(ket, site - 1, lat, true);
    pref *= height_sum(bra.omega, ket.omega, g, lat);
    for (const cplx x : u) pref *= d_fn(x, lat);
    pref /= vandermonde_pair(u, v, ctx);
    combine(omega_matrix(u, bra.omega, v, ket.omega, g, 1.0, lat), p_matrix(u, bra.omega, v, ket.omega, g, xi_i, lat),
            pref, out);
    return out;
}

cplx g_function_detsum(int k, const std::vector<int>& ell, const CList& u, cplx omega_u, const CList& v, cplx s,
                       const GammaPolicy& gamma, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const int N = lat.N;
    if (k < 0 || k > n || static_cast<int>(v.size()) != k || static_cast<int>(ell.size()) != n - k)
        fail(ErrorKind::DegenerateInput, "g_function_detsum: need |v| = k and |ell| = n - k");
    CList xl;
    for (const int l : ell) {
        if (l < 1 || l > N) fail(ErrorKind::DegenerateInput, "site index out of range");
        xl.push_back(lat.xi[l - 1]);
    }
    const cplx sg = lat.aleph_sign();
    const double shift = N - 2 * n;
    const cplx du = total(u) - total(xl) - total(v);
    const double eps = gamma.epsilon_gamma;
    const cplx g = reselect_gamma(free_gamma(gamma), [&](cplx c) {
        return std::abs(br(c, ctx)) >= eps && std::abs(br(du + c + s, ctx)) >= eps;
    });

    cplx pref = br(s - static_cast<double>(k), ctx) / (std::pow(br(g, ctx), n) * br(du + g + s, ctx));
    for (int j = 0; j < k; ++j)
        pref *= br(s - static_cast<double>(j), ctx) / br_nz(s + shift + static_cast<double>(j), ctx);
    for (int a = 0; a < n - k; ++a) {
        const int la = ell[a] - 1;
        for (int j = 0; j < N; ++j)
            if (j != la) pref *= br(lat.xi[la] - lat.xi[j] + 1.0, ctx) / br_nz(lat.xi[la] - lat.xi[j], ctx);
        for (int j = 0; j < k; ++j) pref /= br_nz(xl[a] - v[j], ctx, "[xi_l - v_j]");
        for (int j = 0; j < n; ++j) pref *= br(u[j] - xl[a] + 1.0, ctx);
        for (int b = 0; b < n - k; ++b)
            if (b != a) pref /= br_nz(xl[b] - xl[a] + 1.0, ctx);
        for (int b = a + 1; b < n - k; ++b) pref *= br(xl[a] - xl[b], ctx);
    }
    for (const cplx x : u) pref *= d_fn(x, lat);
    for (int j = 0; j < n; ++j)
        for (int l = j + 1; l < n; ++l) pref /= br_nz(u[j] - u[l], ctx);
    for (int j = 0; j < k; ++j)
        for (int l = j + 1; l < k; ++l) pref /= br_nz(v[l] - v[j], ctx);

    // Column weights with d(v_j) cancelled; the (−1)^{rℵ} sits on the a/d term as in the
    // full scalar-product sum.
    CList fa(k), fd(k);
    for (int j = 0; j < k; ++j) {
        fa[j] = sg * prod_shift(u, v[j], 1.0, ctx);
        fd[j] = d_fn(v[j], lat) / (omega_u * omega_u) * prod_shift(u, v[j], -1.0, ctx);
    }
    CompensatedSum acc;
    for (unsigned S = 0; S < (1u << n); ++S) {
        for (unsigned St = 0; St < (1u << k); ++St) {
            const SubsetIndex idx{S, St};
            cplx w = ((bits(S) + bits(St)) % 2) ? -1.0 : 1.0;
            CList cols(n);
            for (int j = 0; j < k; ++j) {
                w *= ((St >> j) & 1u) ? fd[j] : fa[j];
                cols[j] = v[j] - static_cast<double>(idx.delta(j + 1));
            }
            for (int j = k; j < n; ++j) cols[j] = xl[j - k] - static_cast<double>((S >> j) & 1u);
            const double m = bits(St) - static_cast<double>(bits(S));
            w *= br(g + s + m, ctx) / br_nz(s + m, ctx, "[s-|S|+|S~|]");
            acc.add(w * det(n_matrix(u, cols, g, ctx)));
        }
    }
    return pref * acc.value();
}

CMatrix witness_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(u.size());
    const cplx g = total(v) - total(u);
    const cplx gb = br(g, ctx);
    if (small_bracket(g, 1e-6, ctx)) fail(ErrorKind::GammaDegenerate, "[|v|-|u|] vanishes");
    CMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        cplx ratio = omega_v * omega_v / (omega_u * omega_u);
        for (int l = 0; l < n; ++l)
            ratio *= br(v[l] - v[j] + 1.0, ctx) * br(u[l] - v[j] - 1.0, ctx) /
                     (br_nz(v[l] - v[j] - 1.0, ctx) * br_nz(u[l] - v[j] + 1.0, ctx));
        for (int i = 0; i < n; ++i) {
            const cplx x = u[i] - v[j];
            const cplx base = br(x + g, ctx) / br_nz(x, ctx, "[u_i - v_j]");
            const cplx up = base - omega_v / omega_u * br(x + g + 1.0, ctx) / br_nz(x + 1.0, ctx);
            const cplx dn = base - omega_u / omega_v * br(x + g - 1.0, ctx) / br_nz(x - 1.0, ctx);
            m(i, j) = (up - dn * ratio) / gb;
        }
    }
    return m;
}

Witness orthogonality_witness(const BetheSolution& bra, const BetheSolution& ket, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const CList& u = bra.roots;
    const CList& v = ket.roots;
    const int n = static_cast<int>(u.size());
    if (std::abs(bra.omega - ket.omega) < 1e-10 && same_roots(u, v, ctx))
        fail(ErrorKind::DegenerateInput, "witness needs two different eigenstates");
    for (const cplx a : u)
        for (const cplx b : v)
            if (small_bracket(a - b, 1e-8, ctx)) fail(ErrorKind::CoincidingRoots, "u_j = v_k; the column limit is not taken");
    Witness out;
    out.w.resize(n);
    for (int i = 0; i < n; ++i) {
        cplx w = 1.0;
        for (int l = 0; l < n; ++l) {
            w *= br(u[i] - v[l], ctx);
            if (l != i) w /= br_nz(u[i] - u[l], ctx);
        }
        out.w(i) = w;
    }
    const CMatrix m = witness_matrix(u, bra.omega, v, ket.omega, lat);
    out.residual = (m.transpose() * out.w).norm() / out.w.norm();
    return out;
}

GEpsilonCheck g_epsilon_identity(const CList& u, const CList& v, int i, cplx epsilon, const EllipticContext& ctx) {
    const int n = static_cast<int>(u.size());
    if (i < 1 || i > n || static_cast<int>(v.size()) != n) fail(ErrorKind::DegenerateInput, "bad index");
    const cplx g = total(v) - total(u);
    const cplx vi = v[i - 1];
    GEpsilonCheck out;
    cplx sum = 0.0;
    for (int j = 0; j < n; ++j) {
        cplx w = br(u[j] - vi + g + epsilon, ctx) / (br_nz(g, ctx) * br_nz(u[j] - vi + epsilon, ctx));
        for (int l = 0; l < n; ++l) {
            w *= br(u[j] - v[l], ctx);
            if (l != j) w /= br_nz(u[j] - u[l], ctx);
        }
        sum += w;
    }
    cplx prod = -1.0;
    for (int l = 0; l < n; ++l) prod *= br(vi - v[l] - epsilon, ctx) / br_nz(vi - u[l] - epsilon, ctx);
    out.sum_form = sum;
    out.product_form = prod;
    out.residual = std::abs(sum - prod) / std::max({std::abs(sum), std::abs(prod), 1e-300});
    return out;
}

}  // namespace csos
