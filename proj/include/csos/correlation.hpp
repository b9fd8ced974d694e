#pragma once

#include <utility>
#include <vector>

#include "csos/determinants.hpp"

namespace csos {

// Largest |∏_i τ(ξ_i)| among the κ=1 census solutions.
BetheSolution select_ground(const Census& census, const LatticeConfig& lat);

// One term of the form-factor sum for the twisted solution v: the eigenvalue ratio over the
// first m sites times ⟨u|v⟩⟨v|u⟩/(⟨u|u⟩⟨v|v⟩) in determinant form. `regular` is false when
// the term had to go through the diagonal or height-summed scalar products.
struct SumTerm {
    cplx value;
    bool regular = true;
};
SumTerm sum_q_term(const BetheSolution& ground, const BetheSolution& v, int m, const LatticeConfig& lat);

// ⟨Q^κ_{1,m}⟩ on the ground state from a complete census at κ.
cplx two_point_generating(const BetheSolution& ground, int m, const Census& census, const LatticeConfig& lat,
                          int threads = 1);
// Runs the census at κ first; throws CensusIncomplete when solutions are missing.
cplx two_point_generating(const BetheSolution& ground, int m, cplx kappa, const LatticeConfig& lat,
                          const SolverOptions& opt = {}, int threads = 1);

// |1 − Σ_v ⟨u|v⟩⟨v|u⟩/(⟨u|u⟩⟨v|v⟩)| over the census.
double completeness_defect(const BetheSolution& ground, const Census& census, const LatticeConfig& lat,
                           int threads = 1);

struct GeneratingFunctionResult {
    std::vector<std::pair<double, cplx>> kappa_samples;
    CList polynomial_coeffs;  // ascending powers of κ, m+1 entries
    double vandermonde_condition = 0.0;
    std::vector<int> census_sizes;
    double completeness_defect = 0.0;  // at the last node
};

// m+1 Chebyshev nodes on [0,1]; IllConditionedFit when cond(V) > 1e10.
std::vector<double> chebyshev_nodes(int count);
GeneratingFunctionResult generating_polynomial(const BetheSolution& ground, int m, const LatticeConfig& lat,
                                               int node_count = -1, const SolverOptions& opt = {}, int threads = 1);

// Signed height difference ℓ ∈ {−m, −m+2, …, m} and its probability, the coefficient of κ^{(m−ℓ)/2}.
std::vector<std::pair<int, cplx>> height_probability(const BetheSolution& ground, int m, const LatticeConfig& lat,
                                                     const SolverOptions& opt = {}, int threads = 1);

enum class HeightFactor { squared, paired };

// Integrand of the contour representation at ({z}, ω): eigenvalue ratio × height factor ×
// two Ω determinants ÷ (det 𝒴'_u × ∏_j 𝒴_{κ;ω}(z_j;{z})), with (1/n!)([0]')^{2n}/L².
// `squared` uses the square of a single height sum; `paired` uses H(ω_z/ω_u, γ)·H(ω_u/ω_z, −γ).
cplx master_integrand(const CList& z, cplx omega, cplx kappa, const BetheSolution& ground, int m,
                      const LatticeConfig& lat, HeightFactor factor = HeightFactor::squared);

// n = 1: (1/2πi)∮ integrand dz on a circle around the census root, trapezoidal rule.
cplx master_residue(const BetheSolution& v, const BetheSolution& ground, int m, const LatticeConfig& lat,
                    HeightFactor factor = HeightFactor::squared, double radius = 1e-3, int points = 64);

}  // namespace csos
