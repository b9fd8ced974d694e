#pragma once

#include <random>
#include <string>
#include <vector>

#include "csos/correlation.hpp"

namespace csos {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Uniform draws in the box Re ∈ [0, 1/(2η)], Im ∈ [0, Im τ/(2η)].
class SafeBox {
public:
    SafeBox(const EllipticContext& ctx, std::uint64_t seed);
    cplx draw();
    CList draw(int count);
    std::mt19937_64& engine() { return rng_; }

private:
    double re_max_, im_max_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// |a − b| / max(|a|, |b|, floor)
double rel_err(cplx a, cplx b, double floor = 1e-300);

// Draws ξ and s0 until the lattice validates.
LatticeConfig random_lattice(const EllipticContext& ctx, int N, SafeBox& box);

// The property suites behind `verify` and the acceptance binary. Each returns the worst
// residual over its samples; sizes are arguments so both callers share one implementation.
std::vector<CheckResult> check_elliptic(const EllipticContext& ctx, int samples, std::uint64_t seed);
std::vector<CheckResult> check_r_matrix(const EllipticContext& ctx, int samples, std::uint64_t seed);
CheckResult check_rtt(const LatticeConfig& lat, int samples, std::uint64_t seed);
std::vector<CheckResult> check_partition(const EllipticContext& ctx, int N, int points, std::uint64_t seed);
std::vector<CheckResult> check_partition_recursion(const EllipticContext& ctx, int N, std::uint64_t seed);
std::vector<CheckResult> check_partial_sp(const LatticeConfig& lat, int points, std::uint64_t seed);
std::vector<CheckResult> check_scalar_products(const LatticeConfig& lat, const Census& census1, int points,
                                               std::uint64_t seed);
std::vector<CheckResult> check_inverse_problem(const LatticeConfig& lat);
// pair_limit < 0 means all ordered pairs.
std::vector<CheckResult> check_form_factors(const LatticeConfig& lat, const Census& census1, int pair_limit,
                                            std::uint64_t seed);
std::vector<CheckResult> check_recursion(const LatticeConfig& lat, const Census& census1, std::uint64_t seed);
std::vector<CheckResult> check_witness(const LatticeConfig& lat, const Census& census1, int g_points,
                                       std::uint64_t seed);
std::vector<CheckResult> check_census(const LatticeConfig& lat, cplx kappa, int threads);
CheckResult check_seed_asymptotics(const LatticeConfig& lat);
std::vector<CheckResult> check_generating(const LatticeConfig& lat, const BetheSolution& ground, int m,
                                          const std::vector<double>& kappas, int threads);
// n = 1 only: residue of the integrand, both height-factor forms, against the matching sum term.
std::vector<CheckResult> check_master_residue(const LatticeConfig& lat, const BetheSolution& ground, cplx kappa,
                                              int m, int terms);

}  // namespace csos
