#include "csos/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace csos {

EllipticContext::EllipticContext(int r, int L, cplx tau, double series_tolerance, int max_terms)
    : r_(r), L_(L), tau_(tau), tol_(series_tolerance), max_terms_(max_terms) {
    if (L <= 0) fail(ErrorKind::ConfigError, "L must be positive");
    if (std::gcd(r, L) != 1) fail(ErrorKind::ConfigError, "r and L must be coprime");
    if (tau.imag() <= 0.0) fail(ErrorKind::ConfigError, "Im tau must be positive");
    eta_ = static_cast<double>(r) / static_cast<double>(L);
    p_ = std::exp(2.0 * kPi * kI * tau);
    q_ = std::exp(2.0 * kPi * kI * eta_);
    dzero_ = eta_ * theta1_eval(0.0, tau_, tol_, max_terms_).deriv;
    one_ = theta1_eval(eta_, tau_, tol_, max_terms_).value;
}

ThetaEval theta1_eval(cplx z, cplx tau, double tol, int max_terms) {
    const double it = tau.imag();
    const long nc = std::lround(-z.imag() / it - 0.5);
    const cplx A = std::exp(2.0 * kPi * kI * z);
    const cplx p = std::exp(2.0 * kPi * kI * tau);
    const double h = static_cast<double>(nc) + 0.5;
    cplx t0 = std::exp(kI * kPi * tau * h * h + (2.0 * h) * kI * kPi * z);
    if (nc % 2 != 0) t0 = -t0;

    cplx sum = t0;
    cplx dsum = t0 * (2.0 * h) * kI * kPi;
    double maxterm = std::abs(t0);
    int used = 1;

    cplx term = t0;
    cplx ratio = -std::exp(kI * kPi * tau * (2.0 * static_cast<double>(nc) + 2.0)) * A;
    for (long n = nc + 1;; ++n) {
        term *= ratio;
        ratio *= p;
        const double a = std::abs(term);
        maxterm = std::max(maxterm, a);
        sum += term;
        dsum += term * (2.0 * static_cast<double>(n) + 1.0) * kI * kPi;
        if (++used > max_terms) fail(ErrorKind::NonConvergent, "theta series exceeded max_terms");
        if (a < tol * maxterm) break;
    }
    term = t0;
    ratio = -std::exp(-kI * kPi * tau * (2.0 * static_cast<double>(nc))) / A;
    for (long n = nc - 1;; --n) {
        term *= ratio;
        ratio *= p;
        const double a = std::abs(term);
        maxterm = std::max(maxterm, a);
        sum += term;
        dsum += term * (2.0 * static_cast<double>(n) + 1.0) * kI * kPi;
        if (++used > max_terms) fail(ErrorKind::NonConvergent, "theta series exceeded max_terms");
        if (a < tol * maxterm) break;
    }
    return {-kI * sum, -kI * dsum, maxterm};
}

cplx theta1(cplx z, cplx tau, const EllipticContext& ctx) {
    return theta1_eval(z, tau, ctx.series_tolerance(), ctx.max_terms()).value;
}

cplx theta1_prime(cplx z, cplx tau, const EllipticContext& ctx) {
    return theta1_eval(z, tau, ctx.series_tolerance(), ctx.max_terms()).deriv;
}

cplx theta1_product(cplx z, cplx tau, int factors) {
    const cplx p = std::exp(2.0 * kPi * kI * tau);
    const cplx c2 = std::cos(2.0 * kPi * z);
    cplx prod = 2.0 * std::exp(kI * kPi * tau / 4.0) * std::sin(kPi * z);
    cplx pn = 1.0;
    for (int n = 1; n <= factors; ++n) {
        pn *= p;
        prod *= (1.0 - 2.0 * pn * c2 + pn * pn) * (1.0 - pn);
    }
    return prod;
}

BracketEval bracket_eval(cplx u, int m, const EllipticContext& ctx) {
    const ThetaEval t = theta1_eval(ctx.eta() * u, static_cast<double>(m) * ctx.tau(),
                                    ctx.series_tolerance(), ctx.max_terms());
    return {t.value, ctx.eta() * t.deriv, t.scale};
}

cplx bracket(cplx u, int deriv_order, int m, const EllipticContext& ctx) {
    if (m <= 0) fail(ErrorKind::DegenerateInput, "period multiplier must be positive");
    if (deriv_order == 0 && u == cplx(0.0, 0.0)) return 0.0;
    const BracketEval b = bracket_eval(u, m, ctx);
    return deriv_order == 0 ? b.value : b.deriv;
}

cplx br_nz(cplx u, const EllipticContext& c, const char* what) {
    const BracketEval b = bracket_eval(u, 1, c);
    if (u == cplx(0.0, 0.0) || std::abs(b.value) < kZeroThreshold * b.scale) {
        std::ostringstream os;
        os << what << " vanishes at u=" << u;
        fail(ErrorKind::SingularPoint, os.str());
    }
    return b.value;
}

cplx br_logd(cplx u, const EllipticContext& c) {
    const BracketEval b = bracket_eval(u, 1, c);
    if (u == cplx(0.0, 0.0) || std::abs(b.value) < kZeroThreshold * b.scale)
        fail(ErrorKind::SingularPoint, "log-derivative at a bracket zero");
    return b.deriv / b.value;
}

namespace {

// Returns g = gcd(a,b) ≥ 0 and x, y with a x + b y = g.
long ext_gcd(long a, long b, long& x, long& y) {
    long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        const long qt = a / b;
        long t = a - qt * b;
        a = b;
        b = t;
        t = x0 - qt * x1;
        x0 = x1;
        x1 = t;
        t = y0 - qt * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

}  // namespace

ModularReduction modular_reduce(int r1, int r2, int L, cplx tau) {
    if (L <= 0) fail(ErrorKind::ConfigError, "L must be positive");
    if (r1 == 0 && r2 == 0) fail(ErrorKind::DegenerateInput, "r1 = r2 = 0");
    ModularReduction m;
    long x = 0, y = 0;
    const long g = ext_gcd(r1, r2, x, y);
    m.r = static_cast<int>(g);
    m.r1_tilde = static_cast<int>(r1 / g);
    m.r2_tilde = static_cast<int>(r2 / g);
    // r̃₁ x + r̃₂ y = 1  ⇒  a = x, b = −y.
    m.a = static_cast<int>(x);
    m.b = static_cast<int>(-y);
    const cplx den = static_cast<double>(m.r1_tilde) + static_cast<double>(m.r2_tilde) * tau;
    if (std::abs(den) < 1e-300) fail(ErrorKind::DegenerateInput, "r1~ + r2~ tau = 0");
    m.tau_prime = (static_cast<double>(m.b) + static_cast<double>(m.a) * tau) / den;
    return m;
}

cplx modified_bracket(cplx u, int r1, int r2, int L, cplx tau) {
    const cplx eta = (static_cast<double>(r1) + static_cast<double>(r2) * tau) / static_cast<double>(L);
    const ThetaEval t = theta1_eval(eta * u, tau, 1e-16, 128);
    return t.value * std::exp(kI * kPi * static_cast<double>(r2) * eta * u * u / static_cast<double>(L));
}

namespace {

double scaled(cplx lhs, cplx rhs) {
    const double s = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    return std::abs(lhs - rhs) / s;
}

}  // namespace

double elliptic_identity_residual(IdentityKind kind, const CList& pt, int size,
                                  const EllipticContext& ctx) {
    auto b = [&](cplx u) { return br(u, ctx); };
    switch (kind) {
        case IdentityKind::addition: {
            if (pt.size() != 4) fail(ErrorKind::DegenerateInput, "addition needs (x,y,u,v)");
            const cplx x = pt[0], y = pt[1], u = pt[2], v = pt[3];
            const cplx lhs = b(x + u) * b(x - u) * b(y + v) * b(y - v) - b(x + v) * b(x - v) * b(y + u) * b(y - u);
            const cplx rhs = b(x + y) * b(x - y) * b(u + v) * b(u - v);
            return scaled(lhs, rhs);
        }
        case IdentityKind::frobenius: {
            const int n = size;
            if (static_cast<int>(pt.size()) != 2 * n + 1) fail(ErrorKind::DegenerateInput, "frobenius needs 2n+1 values");
            const cplx t = pt[2 * n];
            CMatrix m(n, n);
            cplx sx = 0.0, sy = 0.0, num = 1.0, den = 1.0;
            for (int i = 0; i < n; ++i) {
                sx += pt[i];
                sy += pt[n + i];
                for (int j = 0; j < n; ++j) {
                    const cplx dxy = br_nz(pt[i] - pt[n + j], ctx, "[x_i - y_j]");
                    m(i, j) = b(pt[i] - pt[n + j] + t) / dxy;
                    den *= dxy;
                }
                for (int j = i + 1; j < n; ++j) num *= b(pt[i] - pt[j]) * b(pt[n + j] - pt[n + i]);
            }
            const cplx lhs = det(m);
            const cplx rhs = std::pow(b(t), n - 1) * b(sx - sy + t) * num / den;
            return scaled(lhs, rhs);
        }
        case IdentityKind::sum_L: {
            if (pt.size() != 2) fail(ErrorKind::DegenerateInput, "sum_L needs (u, gamma)");
            const int Lm = size;
            const cplx u = pt[0], g = pt[1];
            const cplx lhs = b(u + g) * ctx.bracket_prime_zero() / (br_nz(u, ctx) * br_nz(g, ctx));
            const cplx tau_over_eta = ctx.tau() / ctx.eta();
            const cplx dL = bracket(0.0, 1, Lm, ctx);
            cplx rhs = 0.0;
            for (int k = 0; k < Lm; ++k) {
                const cplx ph = std::exp(2.0 * kPi * kI * ctx.eta() * static_cast<double>(k) * u);
                const cplx num = bracket(static_cast<double>(Lm) * u + g + static_cast<double>(k) * tau_over_eta, 0, Lm, ctx);
                const cplx den = bracket(static_cast<double>(Lm) * u, 0, Lm, ctx) *
                                 bracket(g + static_cast<double>(k) * tau_over_eta, 0, Lm, ctx);
                rhs += ph * num * dL / den;
            }
            return scaled(lhs, rhs);
        }
        case IdentityKind::quasi_period: {
            if (pt.size() != 1) fail(ErrorKind::DegenerateInput, "quasi_period needs (u)");
            const cplx u = pt[0];
            const cplx bu = b(u);
            const double r1 = scaled(b(u + 1.0 / ctx.eta()), -bu);
            const cplx f = -std::exp(-kI * kPi * ctx.tau()) * std::exp(-2.0 * kI * kPi * ctx.eta() * u);
            const double r2 = scaled(b(u + ctx.tau() / ctx.eta()), f * bu);
            return std::max(r1, r2);
        }
        case IdentityKind::L_period: {
            if (pt.size() != 1) fail(ErrorKind::DegenerateInput, "L_period needs (u)");
            const cplx u = pt[0];
            const double sign = (ctx.r() % 2 == 0) ? 1.0 : -1.0;
            return scaled(b(u + static_cast<double>(ctx.L())), sign * b(u));
        }
    }
    return 0.0;
}

}  // namespace csos
