#pragma once

#include <vector>

#include "csos/model.hpp"

namespace csos {

enum class MonoKind { A, B, C, D };

// 2^N × 2^N blocks of the monodromy matrix. Configuration bit j−1 is the spin at
// site j (0 = up). Rows are outputs.
struct Monodromy {
    CMatrix A, B, C, D;
    const CMatrix& operator[](MonoKind k) const;
};

Monodromy monodromy(cplx u, cplx s, const CList& xi, const EllipticContext& ctx);
CMatrix monodromy_entry(MonoKind kind, cplx u, cplx s, const LatticeConfig& lat);
// Full operator on V_aux ⊗ H, index aux·2^N + configuration.
CMatrix monodromy_full(cplx u, cplx s, const CList& xi, const EllipticContext& ctx);

// RTT relation on V_a1 ⊗ V_a2 ⊗ H with N ≤ 6; max-norm residual relative to the operator scale.
double rtt_residual(cplx u1, cplx u2, cplx s, const CList& xi, const EllipticContext& ctx);

int popcount(unsigned x);
// Configurations with exactly `downs` down spins, ascending.
std::vector<int> sector_configs(int N, int downs);
CVector basis_vector(int N, int config);

// s ↦ ψ(s) over the L heights s0 + k; kets are columns, bras rows, both stored as vectors.
struct DynamicalState {
    std::vector<CVector> values;
    cplx multiplier;
    bool bra = false;
};

// ω^s on the principal branch of log ω.
cplx omega_pow(cplx omega, cplx s);
bool omega_admissible(cplx omega, int n, const EllipticContext& ctx, double tol = 1e-10);

enum class Direction { ket, bra };
DynamicalState bethe_state(Direction dir, const CList& v, cplx omega, const LatticeConfig& lat);

// (1/L) Σ_k bra(s_k)·ket(s_k), bilinear.
cplx pairing(const DynamicalState& bra, const DynamicalState& ket);

cplx partial_scalar_product_bf(const CList& u, const CList& v, cplx s, const LatticeConfig& lat);
cplx partition_function_bf(const CList& u, const CList& xi, cplx s, const EllipticContext& ctx);

// (t̂_κ ψ)(s) = A(u;s)ψ(s+1) + κ D(u;s)ψ(s−1), and the dual action on bras.
DynamicalState transfer_apply(cplx u, const DynamicalState& psi, cplx kappa, const LatticeConfig& lat);
DynamicalState transfer_apply_dual(cplx u, const DynamicalState& phi, cplx kappa, const LatticeConfig& lat);

enum class LocalOp { E_mm, E_pp, sigma_z };
CMatrix local_operator(LocalOp op, int site, int N);
cplx local_matrix_element_bf(LocalOp op, int site, const DynamicalState& bra, const DynamicalState& ket,
                             const LatticeConfig& lat);

enum class FBasisKind { B_tilde, C_tilde };
CMatrix f_basis_operator(FBasisKind kind, cplx u, cplx s, const LatticeConfig& lat);
cplx partial_scalar_product_fbasis(const CList& u, const CList& v, cplx s, const LatticeConfig& lat);

// ⟨0|C̃(u_n;s−n)…C̃(u_1;s−1) B̃(v_1;s)…B̃(v_k;s−k+1)|ℓ⟩ with down spins at the 1-based sites ℓ.
cplx g_function_fbasis(const std::vector<int>& ell, const CList& u, const CList& v, cplx s,
                       const LatticeConfig& lat);
// ⟨ℓ_k,…,ℓ_n|B̃(v_k;s−k+1)|ℓ_{k+1},…,ℓ_n⟩ from its closed form.
cplx recursion_coefficient(int k, int ell_k, const std::vector<int>& ell_rest, cplx v_k, cplx s,
                           const LatticeConfig& lat);
// One step G^{(k−1)} → G^{(k)} with G^{(k−1)} supplied as a callback on index sets.
template <class G>
cplx g_recursion_step(int k, const std::vector<int>& ell_rest, cplx v_k, cplx s, const LatticeConfig& lat, G prev) {
    cplx acc = 0.0;
    for (int lk = 1; lk <= lat.N; ++lk) {
        bool used = false;
        for (int x : ell_rest) used = used || (x == lk);
        if (used) continue;
        std::vector<int> ell{lk};
        ell.insert(ell.end(), ell_rest.begin(), ell_rest.end());
        acc += prev(ell) * recursion_coefficient(k, lk, ell_rest, v_k, s, lat);
    }
    return acc;
}

// Operators on Fun(H[0]) as dense (L·dim H[0])² matrices, block (k, k') between heights s0+k, s0+k'.
struct HeightOperatorSpace {
    std::vector<int> configs;
    int L = 1;
    int size() const { return L * static_cast<int>(configs.size()); }
};
HeightOperatorSpace zero_weight_space(const LatticeConfig& lat);
// Â ψ(s) = A(u;s)ψ(s+1), D̂ ψ(s) = D(u;s)ψ(s−1); only A and D preserve H[0].
CMatrix hat_operator(MonoKind kind, cplx u, const LatticeConfig& lat, const HeightOperatorSpace& sp);
CMatrix transfer_matrix_hat(cplx u, cplx kappa, const LatticeConfig& lat, const HeightOperatorSpace& sp);

// max-norm of E_i^{αα}E_{i+1}^{..}… − t̂(ξ₁)…t̂(ξ_{i−1}) ∏T̂_{αα}(ξ_k) t̂(ξ_{i+j})^{-1}…t̂(ξ₁)^{-1};
// alphas holds ±1 for sites first_site, first_site+1, … (1-based).
double inverse_problem_residual(int first_site, const std::vector<int>& alphas, const LatticeConfig& lat);
double inverse_problem_residual(int site, int alpha, int beta, const LatticeConfig& lat);

// ⟨Q^κ_{1,m}⟩ = ⟨ψ̃|∏_{j≤m}(E^{++}_j + κE^{--}_j)|ψ⟩ / ⟨ψ̃|ψ⟩.
cplx generating_function_bf(cplx kappa, int m, const DynamicalState& bra, const DynamicalState& ket,
                            const LatticeConfig& lat);
// ⟨ψ̃|Π_ℓ|ψ⟩/⟨ψ̃|ψ⟩ with Π_ℓ projecting on Σ_{j≤m} spin_j = ℓ.
cplx height_difference_bf(int m, int ell, const DynamicalState& bra, const DynamicalState& ket,
                          const LatticeConfig& lat);

}  // namespace csos
