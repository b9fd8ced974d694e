#pragma once

#include <Eigen/Dense>

#include "csos/elliptic.hpp"

namespace csos {

struct BoltzmannWeights {
    cplx a = 1.0, b, c, b_bar, c_bar, a_bar = 1.0;
};

// Chain data shared by every module. N = 2n + ℵL.
struct LatticeConfig {
    EllipticContext ctx;
    int N = 2;
    int n = 1;
    int aleph = 0;
    CList xi;
    cplx s0;

    LatticeConfig(EllipticContext c, CList xi_, cplx s0_, int n_ = -1);

    int L() const { return ctx.L(); }
    int dim() const { return 1 << N; }
    // (−1)^{rℵ}
    double aleph_sign() const { return ((ctx.r() * aleph) % 2 == 0) ? 1.0 : -1.0; }
    cplx height(int k) const { return s0 + static_cast<double>(k); }

    // Throws ConfigError when ξ collide on the period lattice or the height line hits a zero.
    void validate() const;
};

// d(u) = ∏ [u − ξ_j]/[u − ξ_j + 1]
cplx d_fn(cplx u, const LatticeConfig& lat);
// d'(u)/d(u)
cplx d_logd(cplx u, const LatticeConfig& lat);

// spin label of a basis bit: bit 0 = up (+1), bit 1 = down (−1)
inline int spin_of(int bit) { return 1 - 2 * bit; }

BoltzmannWeights boltzmann_weights(cplx u, cplx s, const EllipticContext& ctx);

// Basis (++, +−, −+, −−), index 2·[ε₁ = −] + [ε₂ = −]; rows are outputs.
Eigen::Matrix4cd r_matrix(cplx u, cplx s, const EllipticContext& ctx);
Eigen::Matrix4cd permutation4();

enum class RProperty { dybe, unitarity, crossing, zero_weight, permutation_at_zero };

// Max-norm residual of the chosen operator identity; dybe uses (u1,u2,u3,s),
// the two-factor identities use u = u1 and s.
double r_property_residual(RProperty kind, cplx u1, cplx u2, cplx u3, cplx s, const EllipticContext& ctx);

}  // namespace csos
