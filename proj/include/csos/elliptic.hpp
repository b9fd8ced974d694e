#pragma once

#include <vector>

#include "csos/errors.hpp"
#include "csos/types.hpp"

namespace csos {

// Model constants for η = r/L and modular parameter τ. p and q are derived on
// construction and never mutated.
class EllipticContext {
public:
    EllipticContext(int r, int L, cplx tau, double series_tolerance = 1e-16, int max_terms = 64);

    int r() const { return r_; }
    int L() const { return L_; }
    cplx tau() const { return tau_; }
    double eta() const { return eta_; }
    cplx p() const { return p_; }  // e^{2iπτ}
    cplx q() const { return q_; }  // e^{2iπη}
    double series_tolerance() const { return tol_; }
    int max_terms() const { return max_terms_; }

    // [0]' = η θ₁'(0;τ) and [1], cached because nearly every formula uses them.
    cplx bracket_prime_zero() const { return dzero_; }
    cplx bracket_one() const { return one_; }

private:
    int r_, L_;
    cplx tau_;
    double eta_;
    cplx p_, q_;
    double tol_;
    int max_terms_;
    cplx dzero_, one_;
};

struct ThetaEval {
    cplx value;
    cplx deriv;    // d/dz
    double scale;  // largest series term, the natural magnitude of the value near z
};

// θ₁(z;τ) = −i Σ (−1)^n e^{iπτ(n+½)²} e^{(2n+1)iπz}, summed outward from the dominant term.
ThetaEval theta1_eval(cplx z, cplx tau, double tol, int max_terms);
cplx theta1(cplx z, cplx tau, const EllipticContext& ctx);
cplx theta1_prime(cplx z, cplx tau, const EllipticContext& ctx);
// Product form 2p^{1/8} sin πz ∏(1 − 2pⁿcos2πz + p²ⁿ)(1 − pⁿ); used as an independent check.
cplx theta1_product(cplx z, cplx tau, int factors = 60);

// [u]_m = θ₁(ηu; mτ); deriv_order 1 returns d/du = η θ₁′(ηu; mτ).
cplx bracket(cplx u, int deriv_order, int period_multiplier, const EllipticContext& ctx);

struct BracketEval {
    cplx value;
    cplx deriv;
    double scale;
};
BracketEval bracket_eval(cplx u, int period_multiplier, const EllipticContext& ctx);

// Shorthands used throughout the formula layers.
inline cplx br(cplx u, const EllipticContext& c) { return bracket(u, 0, 1, c); }
inline cplx brd(cplx u, const EllipticContext& c) { return bracket(u, 1, 1, c); }
// [u] with a SingularPoint check: |[u]| < 1e-12 × local scale counts as a zero.
cplx br_nz(cplx u, const EllipticContext& c, const char* what = "bracket");
// Logarithmic derivative [u]'/[u].
cplx br_logd(cplx u, const EllipticContext& c);

inline constexpr double kZeroThreshold = 1e-12;

struct ModularReduction {
    int r = 1;
    int a = 1, b = 0;
    int r1_tilde = 1, r2_tilde = 0;
    cplx tau_prime;
};
// For Lη = r₁ + r₂τ: r = gcd(r₁,r₂), a r̃₁ − b r̃₂ = 1, τ′ = (b + aτ)/(r̃₁ + r̃₂τ).
ModularReduction modular_reduce(int r1, int r2, int L, cplx tau);
// θ₁(ηu;τ) e^{iπ r₂ η u²/L} with η = (r₁ + r₂τ)/L.
cplx modified_bracket(cplx u, int r1, int r2, int L, cplx tau);

enum class IdentityKind { addition, frobenius, sum_L, quasi_period, L_period };

// |LHS − RHS| / max(|LHS|, |RHS|, 1).
// addition: point = (x,y,u,v); frobenius: point = (x_1..x_n, y_1..y_n, t), n = size;
// sum_L: point = (u,γ), size = L; quasi_period / L_period: point = (u).
double elliptic_identity_residual(IdentityKind kind, const CList& point, int size,
                                  const EllipticContext& ctx);

}  // namespace csos
