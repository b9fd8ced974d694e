#pragma once

#include <string>
#include <vector>

#include "csos/bethe.hpp"

namespace csos {

// A generic default for the free γ of the subset sums; far from the period lattice for the
// parameter boxes used by the CLI.
inline const cplx kFreeGamma{0.37, 0.21};

struct GammaPolicy {
    enum class Mode { fixed, canonical, limit_zero };
    Mode mode = Mode::canonical;
    cplx gamma = kFreeGamma;  // used in fixed mode
    double epsilon_gamma = 1e-6;

    static GammaPolicy fixed_at(cplx g, double eps = 1e-6) { return {Mode::fixed, g, eps}; }
};

// S and S̃ as bitmasks; bit k−1 stands for k.
struct SubsetIndex {
    unsigned S = 0;
    unsigned S_tilde = 0;
    // δ_k = +1 on S∖S̃, −1 on S̃∖S, 0 otherwise.
    int delta(int k) const {
        const bool a = (S >> (k - 1)) & 1u, b = (S_tilde >> (k - 1)) & 1u;
        return static_cast<int>(a) - static_cast<int>(b);
    }
};

enum class PartitionVariant { Z1, Z2 };

// Domain-wall partition function as the 2^N subset sum of N_γ determinants. Z1 shifts the
// spectral rows u_j → u_j + δ_j, Z2 shifts the columns ξ_j → ξ_j − δ_j. Canonical and
// limit modes have no meaning here and use kFreeGamma. γ is moved off degenerate points at
// most five times before GammaDegenerate.
cplx partition_det(const CList& u, const CList& xi, cplx s, const GammaPolicy& gamma, PartitionVariant variant,
                   const EllipticContext& ctx);

enum class SpForm { full_4n, L_terms };

// Partial (fixed-height) scalar product S_n({u};{v};s) for Bethe {u} with multiplier ω_u.
cplx partial_sp_detsum(const CList& u, cplx omega_u, const CList& v, cplx s, const GammaPolicy& gamma, SpForm form,
                       const LatticeConfig& lat);
// The 4^n sum without the Bethe check; d(v_j) is cancelled analytically so v_j = ξ_i is allowed.
cplx partial_sp_subset_sum(const CList& u, cplx omega_u, const CList& v, cplx s, cplx gamma, const LatticeConfig& lat);

enum class Route { single_determinant, diagonal_limit, height_sum };
const char* route_name(Route r);

struct DetValue {
    cplx value;
    Route route = Route::single_determinant;
    double rcond = 1.0;  // smallest LU condition estimate among the determinants used
};

// (1/L)Σ_s (ω_v/ω_u)^s [γ+s]/[s] over s = s0 + k, k = 0..L−1.
cplx height_sum(cplx omega_u, cplx omega_v, cplx gamma, const LatticeConfig& lat);

// Ω_γ({u},ω_u;{v},ω_v); the d-term carries the bra twist κ.
CMatrix omega_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma, cplx kappa,
                     const LatticeConfig& lat);
// γ → 0 limit of Ω for coinciding sets.
CMatrix omega_matrix_limit(const CList& u, const LatticeConfig& lat);

// ⟨{u},ω_u| {v},ω_v⟩ with the bra a Bethe solution (twisted by bra.kappa). Routes to the
// diagonal limit when the sets coincide and to the height-summed subset sum when γ = |v|−|u|
// falls on the period lattice.
DetValue scalar_product_det(const BetheSolution& bra, const CList& v, cplx omega_v, const LatticeConfig& lat,
                            const GammaPolicy& gamma = {});
// Height-summed subset sum at a free γ; independent of the single-determinant route.
cplx scalar_product_height_sum(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma,
                               const LatticeConfig& lat);

// (1/(−[0]')^n) ∏d(v)/∏_{j≠k}[v_j−v_k] det[∂𝒴(v_j)/∂v_k]
cplx norm_det(const BetheSolution& sol, const LatticeConfig& lat);
// Φ-matrix form with K̃(x) = ψ(x−1) − ψ(x+1).
cplx gaudin_norm(const BetheSolution& sol, const LatticeConfig& lat);

enum class FormFactorOp { E_mm, E_pp, sigma_z };

// ⟨u| op_i |v⟩ for κ=1 eigenstates; site is 1-based.
DetValue form_factor_det(FormFactorOp op, int site, const BetheSolution& bra, const BetheSolution& ket,
                         const LatticeConfig& lat, const GammaPolicy& gamma = {});
// Rank-one P_γ of the E^{--} form factor at ξ_i.
CMatrix p_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, cplx gamma, cplx xi_i,
                 const LatticeConfig& lat);
CMatrix p_matrix_limit(const CList& u, cplx xi_i, const LatticeConfig& lat);

// G^{(k)}_{ℓ_{k+1..n}}({u};{v_1..v_k};s) in closed form. ell lists ℓ_{k+1},…,ℓ_n (1-based).
cplx g_function_detsum(int k, const std::vector<int>& ell, const CList& u, cplx omega_u, const CList& v, cplx s,
                       const GammaPolicy& gamma, const LatticeConfig& lat);

struct Witness {
    CVector w;
    double residual = 0.0;  // ‖M_γᵀ w‖ / ‖w‖
};
Witness orthogonality_witness(const BetheSolution& bra, const BetheSolution& ket, const LatticeConfig& lat);
CMatrix witness_matrix(const CList& u, cplx omega_u, const CList& v, cplx omega_v, const LatticeConfig& lat);

struct GEpsilonCheck {
    cplx sum_form;
    cplx product_form;
    double residual = 0.0;
};
// Both sides of the residue identity for f_ε(z) at γ = |v|−|u|; i is 1-based.
GEpsilonCheck g_epsilon_identity(const CList& u, const CList& v, int i, cplx epsilon, const EllipticContext& ctx);

}  // namespace csos
