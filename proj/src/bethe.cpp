#include "csos/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "csos/parallel.hpp"

namespace csos {

CList omega_values(int n, const EllipticContext& ctx) {
    CList out;
    const double L = ctx.L();
    for (int l = 0; l < ctx.L(); ++l)
        out.push_back(std::exp(kI * kPi * static_cast<double>(ctx.r() * n) / L) *
                      std::exp(2.0 * kI * kPi * static_cast<double>(l) / L));
    return out;
}

namespace {

cplx twist(cplx omega, cplx kappa, const LatticeConfig& lat) {
    return lat.aleph_sign() * kappa / (omega * omega);
}

cplx psi(cplx x, const EllipticContext& ctx) { return br_logd(x, ctx); }

struct Sides {
    CList P, R;  // left and right sides per equation
};

Sides sides(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat) {
    const int n = static_cast<int>(v.size());
    const EllipticContext& ctx = lat.ctx;
    const cplx c = twist(omega, kappa, lat);
    Sides s{CList(n, 1.0), CList(n, 1.0)};
    for (int j = 0; j < n; ++j) {
        cplx p = 1.0, q = 1.0;
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            p *= br(v[l] - v[j] + 1.0, ctx) / br_nz(v[l] - v[j], ctx, "[v_l - v_j]");
            q *= br(v[j] - v[l] + 1.0, ctx) / br_nz(v[j] - v[l], ctx, "[v_j - v_l]");
        }
        s.P[j] = p;
        s.R[j] = c * d_fn(v[j], lat) * q;
    }
    return s;
}

// ∂_k log P_j and ∂_k log R_j in one pass.
void log_gradients(const CList& v, const LatticeConfig& lat, CMatrix& dlogP, CMatrix& dlogR) {
    const int n = static_cast<int>(v.size());
    const EllipticContext& ctx = lat.ctx;
    dlogP = CMatrix::Zero(n, n);
    dlogR = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        dlogR(j, j) += d_logd(v[j], lat);
        for (int l = 0; l < n; ++l) {
            if (l == j) continue;
            const cplx a = psi(v[l] - v[j] + 1.0, ctx) - psi(v[l] - v[j], ctx);
            const cplx b = psi(v[j] - v[l] + 1.0, ctx) - psi(v[j] - v[l], ctx);
            dlogP(j, l) += a;
            dlogP(j, j) -= a;
            dlogR(j, j) += b;
            dlogR(j, l) -= b;
        }
    }
}

double min_pair_bracket(const CList& v, const EllipticContext& ctx) {
    double m = 1e300;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) m = std::min(m, std::abs(br(v[i] - v[j], ctx)));
    return m;
}

std::string label_text(const SeedLabel& s) {
    std::ostringstream os;
    os << "I={";
    for (std::size_t i = 0; i < s.subset.size(); ++i) os << (i ? "," : "") << s.subset[i];
    os << "} l=" << s.branch;
    return os.str();
}

}  // namespace

CList bethe_residual(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat) {
    const Sides s = sides(v, omega, kappa, lat);
    CList r(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) r[j] = s.P[j] - s.R[j];
    return r;
}

double bethe_residual_scaled(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat) {
    const Sides s = sides(v, omega, kappa, lat);
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double scale = std::max({std::abs(s.P[j]), std::abs(s.R[j]), 1e-300});
        m = std::max(m, std::abs(s.P[j] - s.R[j]) / scale);
    }
    return m;
}

CMatrix bethe_residual_jacobian(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat) {
    const Sides s = sides(v, omega, kappa, lat);
    CMatrix dP, dR;
    log_gradients(v, lat, dP, dR);
    const int n = static_cast<int>(v.size());
    CMatrix J(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) J(j, k) = s.P[j] * dP(j, k) - s.R[j] * dR(j, k);
    return J;
}

CList seed_slopes(const SeedLabel& label, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(label.subset.size());
    CList out(n);
    for (int j = 0; j < n; ++j) {
        const int ij = label.subset[j] - 1;
        cplx val = ctx.bracket_one() / ctx.bracket_prime_zero();
        for (int k = 0; k < lat.N; ++k) {
            if (k == ij) continue;
            val *= br(lat.xi[ij] - lat.xi[k] - 1.0, ctx) / br_nz(lat.xi[ij] - lat.xi[k], ctx);
        }
        for (int k = 0; k < n; ++k) {
            const int ik = label.subset[k] - 1;
            val *= br(lat.xi[ik] - lat.xi[ij] - 1.0, ctx) / br_nz(lat.xi[ik] - lat.xi[ij] + 1.0, ctx);
        }
        out[j] = val;
    }
    return out;
}

CList seed_roots(const SeedLabel& label, cplx kappa, const LatticeConfig& lat) {
    const cplx omega = omega_values(static_cast<int>(label.subset.size()), lat.ctx).at(label.branch);
    const CList slope = seed_slopes(label, lat);
    CList v(slope.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = lat.xi[label.subset[j] - 1] - 1.0 + kappa / (omega * omega) * slope[j];
    return v;
}

namespace {

// Newton on G_j = P_j / (d(v_j) Q_j) − c, which stays smooth as κ → 0 where d has a pole.
bool newton(CList& v, cplx omega, cplx kappa, const LatticeConfig& lat, const SolverOptions& opt,
            double max_total = 1e300) {
    const int n = static_cast<int>(v.size());
    const cplx c = twist(omega, kappa, lat);
    const CList start = v;
    try {
        for (int it = 0; it < opt.newton_iterations; ++it) {
            const Sides s = sides(v, omega, kappa, lat);
            CMatrix dP, dR;
            log_gradients(v, lat, dP, dR);
            CVector G(n);
            CMatrix J(n, n);
            double rel = 0.0;
            for (int j = 0; j < n; ++j) {
                const cplx g = c * s.P[j] / s.R[j];
                G(j) = g - c;
                rel = std::max(rel, std::abs(G(j)) / std::abs(c));
                for (int k = 0; k < n; ++k) J(j, k) = g * (dP(j, k) - dR(j, k));
            }
            if (rel < 1e-15) return true;
            Eigen::PartialPivLU<CMatrix> lu(J);
            if (!(lu.rcond() > 1e-15)) return false;
            const CVector step = lu.solve(G);
            const double sz = step.cwiseAbs().maxCoeff();
            if (!std::isfinite(sz) || sz > opt.max_newton_step) return false;
            double vmax = 1.0;
            for (int j = 0; j < n; ++j) {
                v[j] -= step(j);
                vmax = std::max(vmax, std::abs(v[j]));
            }
            if (sz < 1e-15 * vmax) break;
        }
        double moved = 0.0;
        for (int j = 0; j < n; ++j) moved = std::max(moved, std::abs(v[j] - start[j]));
        if (moved > max_total) return false;
        return bethe_residual_scaled(v, omega, kappa, lat) < opt.accept_residual;
    } catch (const Error&) {
        return false;
    }
}

CVector tangent(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat) {
    const int n = static_cast<int>(v.size());
    const cplx c = twist(omega, kappa, lat);
    const Sides s = sides(v, omega, kappa, lat);
    CMatrix dP, dR;
    log_gradients(v, lat, dP, dR);
    CMatrix J(n, n);
    for (int j = 0; j < n; ++j) {
        const cplx g = c * s.P[j] / s.R[j];
        for (int k = 0; k < n; ++k) J(j, k) = g * (dP(j, k) - dR(j, k));
    }
    const CVector rhs = CVector::Constant(n, c / kappa);
    return Eigen::PartialPivLU<CMatrix>(J).solve(rhs);
}

}  // namespace

void classify(BetheSolution& sol, const LatticeConfig& lat, const SolverOptions& opt) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(sol.roots.size());
    sol.residual_norm = bethe_residual_scaled(sol.roots, sol.omega, sol.kappa, lat);
    sol.off_diagonal = n < 2 || min_pair_bracket(sol.roots, ctx) > opt.admissibility_threshold;
    bool adm = true;
    for (int j = 0; j < n; ++j) {
        cplx p = 1.0;
        for (const cplx x : lat.xi) p *= br(sol.roots[j] - x, ctx);
        for (int l = 0; l < n; ++l) p *= br(sol.roots[j] - sol.roots[l] + 1.0, ctx);
        adm = adm && std::abs(p) > opt.admissibility_threshold;
    }
    sol.admissible = adm;
}

BetheSolution refine(const CList& v, cplx omega, cplx kappa, const LatticeConfig& lat, const SolverOptions& opt) {
    BetheSolution sol;
    sol.roots = v;
    sol.omega = omega;
    sol.kappa = kappa;
    if (!newton(sol.roots, omega, kappa, lat, opt)) fail(ErrorKind::NoConvergence, "Newton iteration did not converge");
    sol.kappa_reached = std::abs(kappa);
    classify(sol, lat, opt);
    return sol;
}

BetheSolution seed_solution(const SeedLabel& label, const LatticeConfig& lat, const SolverOptions& opt) {
    const int n = static_cast<int>(label.subset.size());
    if (label.branch < 0 || label.branch >= lat.L()) fail(ErrorKind::DegenerateInput, "branch out of range");
    const cplx omega = omega_values(n, lat.ctx)[label.branch];
    // Start close enough that the first-order displacement is small, whatever the slopes.
    double slope = 1e-300;
    for (const cplx x : seed_slopes(label, lat)) slope = std::max(slope, std::abs(x));
    const double k0 = std::min(opt.kappa_start, opt.kappa_start / slope);
    BetheSolution sol = refine(seed_roots(label, k0, lat), omega, k0, lat, opt);
    sol.seed = label;
    return sol;
}

BetheSolution solve_bethe(const BetheSolution& seed, cplx kappa_target, const LatticeConfig& lat,
                          const SolverOptions& opt) {
    BetheSolution cur = seed;
    const cplx k0 = seed.kappa;
    const double length = std::abs(kappa_target - k0);
    if (length == 0.0) return cur;
    const cplx dir = (kappa_target - k0) / length;
    double t = 0.0;  // arc length travelled along the segment
    double h = opt.initial_step;
    int attempts = 0;
    while (t < length) {
        if (++attempts > opt.step_budget) {
            std::ostringstream os;
            os << "step budget exhausted at kappa=" << std::abs(cur.kappa) << " (" << label_text(seed.seed) << ")";
            fail(ErrorKind::NoConvergence, os.str());
        }
        CList v = cur.roots;
        CVector dv = CVector::Zero(static_cast<Eigen::Index>(v.size()));
        try {
            dv = tangent(cur.roots, cur.omega, cur.kappa, lat);
        } catch (const Error&) {
        }
        const double speed = dv.size() ? dv.cwiseAbs().maxCoeff() : 0.0;
        double dt = std::min(h, length - t);
        if (std::isfinite(speed) && speed * dt > opt.max_displacement) dt = opt.max_displacement / speed;
        const bool last = t + dt >= length;
        const cplx knew = last ? kappa_target : k0 + dir * (t + dt);
        if (std::isfinite(speed))
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += (knew - cur.kappa) * dv(static_cast<Eigen::Index>(j));
        if (newton(v, cur.omega, knew, lat, opt, 0.5 * opt.max_displacement)) {
            cur.roots = v;
            cur.kappa = knew;
            t += dt;
            ++cur.steps;
            cur.kappa_reached = std::abs(knew);
            if (v.size() > 1 && min_pair_bracket(v, lat.ctx) < opt.collision_threshold) {
                std::ostringstream os;
                os << "roots collide at kappa=" << std::abs(knew) << " (" << label_text(seed.seed) << ")";
                fail(ErrorKind::PathCollision, os.str());
            }
            h = std::min(h * 1.5, opt.max_step);
        } else {
            h = 0.5 * dt;
            if (h < opt.min_step) {
                std::ostringstream os;
                os << "step fell below " << opt.min_step << " at kappa=" << std::abs(cur.kappa) << " ("
                   << label_text(seed.seed) << ")";
                fail(ErrorKind::NoConvergence, os.str());
            }
        }
    }
    cur.kappa = kappa_target;
    classify(cur, lat, opt);
    return cur;
}

std::vector<SeedLabel> all_seed_labels(const LatticeConfig& lat) {
    std::vector<SeedLabel> out;
    const int N = lat.N, n = lat.n;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i + 1;
    while (true) {
        for (int l = 0; l < lat.L(); ++l) out.push_back(SeedLabel{idx, l});
        int i = n - 1;
        while (i >= 0 && idx[i] == N - n + i + 1) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

bool same_solution(const BetheSolution& a, const BetheSolution& b, const EllipticContext& ctx, double tol) {
    if (a.roots.size() != b.roots.size() || std::abs(a.omega - b.omega) > 1e-8) return false;
    std::vector<bool> used(b.roots.size(), false);
    for (const cplx x : a.roots) {
        bool found = false;
        for (std::size_t j = 0; j < b.roots.size() && !found; ++j) {
            if (used[j]) continue;
            const BracketEval e = bracket_eval(x - b.roots[j], 1, ctx);
            if (std::abs(e.value) < tol * std::max(1.0, e.scale)) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

Census enumerate_solutions(cplx kappa, const LatticeConfig& lat, const SolverOptions& opt, int threads) {
    if (lat.N != 2 * lat.n) fail(ErrorKind::DegenerateInput, "census requires N = 2n");
    if (lat.L() % 2 == 0 || lat.L() <= lat.n) fail(ErrorKind::DegenerateInput, "census requires L odd and L > n");
    const std::vector<SeedLabel> labels = all_seed_labels(lat);
    const int count = static_cast<int>(labels.size());
    std::vector<BetheSolution> slots(count);
    std::vector<std::string> errors(count);
    parallel_for(count, threads, [&](int i) {
        try {
            const BetheSolution s = seed_solution(labels[i], lat, opt);
            slots[i] = solve_bethe(s, kappa, lat, opt);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    Census c;
    c.kappa = kappa;
    c.expected = count;
    for (int i = 0; i < count; ++i) {
        if (!errors[i].empty()) {
            c.failures.push_back(CensusFailure{labels[i], errors[i]});
            continue;
        }
        const BetheSolution& s = slots[i];
        if (!s.admissible || !s.off_diagonal) {
            ++c.inadmissible;
            continue;
        }
        bool dup = false;
        for (const auto& t : c.solutions) dup = dup || same_solution(s, t, lat.ctx);
        if (dup) {
            ++c.duplicates;
            continue;
        }
        c.solutions.push_back(s);
    }
    return c;
}

namespace {

cplx tau_raw(cplx u, const BetheSolution& sol, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    cplx p1 = sol.omega, p2 = lat.aleph_sign() * sol.kappa / sol.omega * d_fn(u, lat);
    for (const cplx v : sol.roots) {
        p1 *= br(v - u + 1.0, ctx) / br_nz(v - u, ctx, "[v - u]");
        p2 *= br(u - v + 1.0, ctx) / br_nz(u - v, ctx, "[u - v]");
    }
    return p1 + p2;
}

}  // namespace

cplx eigenvalue_tau(cplx u, const BetheSolution& sol, const LatticeConfig& lat) {
    bool near = false;
    for (const cplx v : sol.roots) {
        const BracketEval e = bracket_eval(u - v, 1, lat.ctx);
        near = near || std::abs(e.value) < 1e-7 * std::max(1.0, e.scale);
    }
    if (!near) return tau_raw(u, sol, lat);
    const double eps = 1e-5;
    return 0.5 * (tau_raw(u + eps, sol, lat) + tau_raw(u - eps, sol, lat));
}

YValue y_function(cplx u, const BetheSolution& sol, const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const int n = static_cast<int>(sol.roots.size());
    const cplx c = twist(sol.omega, sol.kappa, lat);
    const cplx d = d_fn(u, lat);
    CList plus(n), minus(n), dplus(n), dminus(n);
    for (int l = 0; l < n; ++l) {
        const BracketEval a = bracket_eval(sol.roots[l] - u + 1.0, 1, ctx);
        const BracketEval b = bracket_eval(sol.roots[l] - u - 1.0, 1, ctx);
        plus[l] = a.value;
        dplus[l] = a.deriv;
        minus[l] = b.value;
        dminus[l] = b.deriv;
    }
    auto prod_except = [&](const CList& f, int skip) {
        cplx p = 1.0;
        for (int l = 0; l < n; ++l)
            if (l != skip) p *= f[l];
        return p;
    };
    YValue y;
    const cplx Pp = prod_except(plus, -1), Pm = prod_except(minus, -1);
    y.value = Pp + c * d * Pm;
    y.grad.resize(n);
    cplx dPp = 0.0, dPm = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx gp = dplus[k] * prod_except(plus, k);
        const cplx gm = dminus[k] * prod_except(minus, k);
        y.grad[k] = gp + c * d * gm;
        dPp -= gp;
        dPm -= gm;
    }
    cplx dd = 0.0;
    if (d != cplx(0.0, 0.0)) dd = d * d_logd(u, lat);
    y.du = dPp + c * (dd * Pm + d * dPm);
    return y;
}

CMatrix y_jacobian(const BetheSolution& sol, const LatticeConfig& lat) {
    const int n = static_cast<int>(sol.roots.size());
    CMatrix J(n, n);
    for (int j = 0; j < n; ++j) {
        const YValue y = y_function(sol.roots[j], sol, lat);
        for (int k = 0; k < n; ++k) J(j, k) = y.grad[k];
        J(j, j) += y.du;
    }
    return J;
}

}  // namespace csos
