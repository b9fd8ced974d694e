#pragma once

#include <string>
#include <vector>

#include "csos/model.hpp"

namespace csos {

struct SeedLabel {
    std::vector<int> subset;  // 1-based site indices i_1 < … < i_n
    int branch = 0;           // ℓ ∈ 0..L−1
};

struct BetheSolution {
    CList roots;
    cplx omega = 1.0;
    cplx kappa = 1.0;
    double residual_norm = 0.0;  // max_j |P_j − R_j| / max(|P_j|, |R_j|)
    bool admissible = false;
    bool off_diagonal = false;
    SeedLabel seed;
    double kappa_reached = 0.0;  // |κ| actually reached along the path
    int steps = 0;
};

struct SolverOptions {
    double kappa_start = 1e-3;
    double initial_step = 0.05;
    double max_step = 0.1;
    double min_step = 1e-4;
    int step_budget = 4000;
    int newton_iterations = 30;
    double max_newton_step = 0.5;
    double max_displacement = 0.05;  // per continuation step, predictor and corrector each
    double collision_threshold = 1e-6;
    double admissibility_threshold = 1e-8;
    double accept_residual = 1e-10;
};

// ω_ℓ = e^{iπrn/L} e^{2iπℓ/L}, ℓ = 0..L−1.
CList omega_values(int n, const EllipticContext& ctx);

// a(v_j)∏_{l≠j}[v_l−v_j+1]/[v_l−v_j] − (−1)^{rℵ}κω^{−2} d(v_j)∏_{l≠j}[v_j−v_l+1]/[v_j−v_l]
CList bethe_residual(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat);
double bethe_residual_scaled(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat);
// Jacobian ∂(residual_j)/∂v_k from bracket log-derivatives.
CMatrix bethe_residual_jacobian(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat);

// First-order κ → 0 branch: v_j = ξ_{i_j} − 1 + κ ω_ℓ^{−2} u_j(0).
CList seed_roots(const SeedLabel& label, cplx kappa, const LatticeConfig& lat);
CList seed_slopes(const SeedLabel& label, const LatticeConfig& lat);

// Newton polish at fixed κ; throws NoConvergence when the scaled residual stays above accept_residual.
BetheSolution refine(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat, const SolverOptions& opt = {});
void classify(BetheSolution& sol, const LatticeConfig& lat, const SolverOptions& opt = {});

BetheSolution seed_solution(const SeedLabel& label, const LatticeConfig& lat, const SolverOptions& opt = {});
// Path-following in κ along the straight segment from seed.kappa to kappa_target.
BetheSolution solve_bethe(const BetheSolution& seed, cplx kappa_target, const LatticeConfig& lat,
                          const SolverOptions& opt = {});

struct CensusFailure {
    SeedLabel seed;
    std::string error;
};

struct Census {
    cplx kappa;
    std::vector<BetheSolution> solutions;
    std::vector<CensusFailure> failures;
    int expected = 0;
    int duplicates = 0;
    int inadmissible = 0;
    bool complete() const { return static_cast<int>(solutions.size()) == expected; }
};

std::vector<SeedLabel> all_seed_labels(const LatticeConfig& lat);
Census enumerate_solutions(cplx kappa, const LatticeConfig& lat, const SolverOptions& opt = {}, int threads = 1);
bool same_solution(const BetheSolution& a, const BetheSolution& b, const EllipticContext& ctx, double tol = 1e-7);

// τ_κ(u) = ω a(u)∏[v_l−u+1]/[v_l−u] + (−1)^{rℵ}κω^{−1} d(u)∏[u−v_l+1]/[u−v_l]; symmetric limit at u = v_l.
cplx eigenvalue_tau(cplx u, const BetheSolution& sol, const LatticeConfig& lat);

struct YValue {
    cplx value;
    CList grad;  // ∂/∂v_k at fixed u
    cplx du;     // ∂/∂u
};
// 𝒴(u) = a(u)∏[v_l−u+1] + (−1)^{rℵ}κω^{−2} d(u)∏[v_l−u−1]
YValue y_function(cplx u, const BetheSolution& sol, const LatticeConfig& lat);
// [∂/∂v_k 𝒴(v_j;{v})]_{jk}, the u = v_j dependence included.
CMatrix y_jacobian(const BetheSolution& sol, const LatticeConfig& lat);

}  // namespace csos
