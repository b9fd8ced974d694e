#include "csos/oracle.hpp"

#include <bit>
#include <cmath>

#include <Eigen/LU>

namespace csos {

const CMatrix& Monodromy::operator[](MonoKind k) const {
    switch (k) {
        case MonoKind::A: return A;
        case MonoKind::B: return B;
        case MonoKind::C: return C;
        case MonoKind::D: return D;
    }
    return A;
}

int popcount(unsigned x) { return std::popcount(x); }

std::vector<int> sector_configs(int N, int downs) {
    std::vector<int> out;
    for (int c = 0; c < (1 << N); ++c)
        if (popcount(static_cast<unsigned>(c)) == downs) out.push_back(c);
    return out;
}

CVector basis_vector(int N, int config) {
    CVector e = CVector::Zero(1 << N);
    e(config) = 1.0;
    return e;
}

namespace {

struct Path {
    cplx amp;
    int aux;
    int out;
    int weight;
};

void check_size(int N) {
    if (N < 1 || N > 12) fail(ErrorKind::DegenerateInput, "oracle supports 1 <= N <= 12");
}

}  // namespace

Monodromy monodromy(cplx u, cplx s, const CList& xi, const EllipticContext& ctx) {
    const int N = static_cast<int>(xi.size());
    check_size(N);
    const int dim = 1 << N;
    Monodromy T{CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim)};
    // R at site j only depends on the accumulated output weight, which takes N+1 values.
    std::vector<std::vector<Eigen::Matrix4cd>> rcache(N);
    for (int j = 0; j < N; ++j)
        for (int w = -j; w <= j; w += 2) rcache[j].push_back(r_matrix(u - xi[j], s + static_cast<double>(w), ctx));

    std::vector<Path> paths, next;
    for (int sig = 0; sig < dim; ++sig) {
        for (int beta = 0; beta < 2; ++beta) {
            paths.assign(1, Path{1.0, beta, 0, 0});
            for (int j = 0; j < N; ++j) {
                next.clear();
                const int sj = (sig >> j) & 1;
                for (const Path& p : paths) {
                    const Eigen::Matrix4cd& R = rcache[j][(p.weight + j) / 2];
                    const int col = 2 * p.aux + sj;
                    for (int row = 0; row < 4; ++row) {
                        const cplx val = R(row, col);
                        if (val == cplx(0.0, 0.0)) continue;
                        const int a2 = row >> 1, s2 = row & 1;
                        next.push_back(Path{p.amp * val, a2, p.out | (s2 << j), p.weight + spin_of(s2)});
                    }
                }
                paths.swap(next);
            }
            for (const Path& p : paths) {
                CMatrix& M = p.aux == 0 ? (beta == 0 ? T.A : T.B) : (beta == 0 ? T.C : T.D);
                M(p.out, sig) += p.amp;
            }
        }
    }
    return T;
}

CMatrix monodromy_entry(MonoKind kind, cplx u, cplx s, const LatticeConfig& lat) {
    return monodromy(u, s, lat.xi, lat.ctx)[kind];
}

CMatrix monodromy_full(cplx u, cplx s, const CList& xi, const EllipticContext& ctx) {
    const Monodromy T = monodromy(u, s, xi, ctx);
    const int dim = static_cast<int>(T.A.rows());
    CMatrix F(2 * dim, 2 * dim);
    F.topLeftCorner(dim, dim) = T.A;
    F.topRightCorner(dim, dim) = T.B;
    F.bottomLeftCorner(dim, dim) = T.C;
    F.bottomRightCorner(dim, dim) = T.D;
    return F;
}

namespace {

// Operator on V_a1 ⊗ V_a2 ⊗ H (index a1·2D + a2·D + c) from T acting on one auxiliary factor,
// with the height shifted by the spin of the other auxiliary factor when requested.
CMatrix embed_T(int which, cplx u, cplx s, bool shift_by_other, const CList& xi, const EllipticContext& ctx) {
    const int dim = 1 << static_cast<int>(xi.size());
    CMatrix out = CMatrix::Zero(4 * dim, 4 * dim);
    for (int other = 0; other < 2; ++other) {
        const cplx sh = shift_by_other ? s + static_cast<double>(spin_of(other)) : s;
        const CMatrix F = monodromy_full(u, sh, xi, ctx);
        for (int ao = 0; ao < 2; ++ao)
            for (int ai = 0; ai < 2; ++ai) {
                const int ro = which == 1 ? ao * 2 + other : other * 2 + ao;
                const int ri = which == 1 ? ai * 2 + other : other * 2 + ai;
                out.block(ro * dim, ri * dim, dim, dim) = F.block(ao * dim, ai * dim, dim, dim);
            }
    }
    return out;
}

CMatrix embed_R(cplx u, cplx s, bool shift_by_total, int N, const EllipticContext& ctx) {
    const int dim = 1 << N;
    CMatrix out = CMatrix::Zero(4 * dim, 4 * dim);
    for (int c = 0; c < dim; ++c) {
        const int h = N - 2 * popcount(static_cast<unsigned>(c));
        const Eigen::Matrix4cd R = r_matrix(u, shift_by_total ? s + static_cast<double>(h) : s, ctx);
        for (int o = 0; o < 4; ++o)
            for (int i = 0; i < 4; ++i) out(o * dim + c, i * dim + c) = R(o, i);
    }
    return out;
}

}  // namespace

double rtt_residual(cplx u1, cplx u2, cplx s, const CList& xi, const EllipticContext& ctx) {
    const int N = static_cast<int>(xi.size());
    if (N > 6) fail(ErrorKind::DegenerateInput, "RTT check limited to N <= 6");
    const CMatrix lhs = embed_R(u1 - u2, s, true, N, ctx) * embed_T(1, u1, s, false, xi, ctx) *
                        embed_T(2, u2, s, true, xi, ctx);
    const CMatrix rhs = embed_T(2, u2, s, false, xi, ctx) * embed_T(1, u1, s, true, xi, ctx) *
                        embed_R(u1 - u2, s, false, N, ctx);
    return max_abs(lhs - rhs) / std::max(1.0, max_abs(lhs));
}

cplx omega_pow(cplx omega, cplx s) { return std::exp(s * std::log(omega)); }

bool omega_admissible(cplx omega, int n, const EllipticContext& ctx, double tol) {
    const double sign = ((ctx.r() * n) % 2 == 0) ? 1.0 : -1.0;
    return std::abs(sign * std::pow(omega, ctx.L()) - 1.0) < tol;
}

DynamicalState bethe_state(Direction dir, const CList& v, cplx omega, const LatticeConfig& lat) {
    const int n = static_cast<int>(v.size());
    if (!omega_admissible(omega, n, lat.ctx)) fail(ErrorKind::MultiplierNotAdmissible, "(-1)^{rn} omega^L != 1");
    const cplx one = lat.ctx.bracket_one();
    DynamicalState st;
    st.multiplier = omega;
    st.bra = dir == Direction::bra;
    for (int k = 0; k < lat.L(); ++k) {
        const cplx s = lat.height(k);
        CVector vec = basis_vector(lat.N, 0);
        cplx phi;
        if (dir == Direction::ket) {
            for (int j = n - 1; j >= 0; --j) vec = monodromy(v[j], s - static_cast<double>(j), lat.xi, lat.ctx).B * vec;
            phi = omega_pow(omega, s);
            for (int j = 1; j <= n; ++j) phi *= one / br_nz(s - static_cast<double>(j), lat.ctx, "[s-j]");
        } else {
            Eigen::RowVectorXcd row = vec.transpose();
            for (int j = n; j >= 1; --j)
                row = row * monodromy(v[j - 1], s - static_cast<double>(j), lat.xi, lat.ctx).C;
            vec = row.transpose();
            phi = omega_pow(omega, -s);
            for (int j = 0; j < n; ++j) phi *= br(s + static_cast<double>(j), lat.ctx) / one;
        }
        st.values.push_back(phi * vec);
    }
    return st;
}

cplx pairing(const DynamicalState& bra, const DynamicalState& ket) {
    if (bra.values.size() != ket.values.size()) fail(ErrorKind::DegenerateInput, "height grids differ");
    cplx acc = 0.0;
    for (std::size_t k = 0; k < bra.values.size(); ++k) acc += bra.values[k].cwiseProduct(ket.values[k]).sum();
    return acc / static_cast<double>(bra.values.size());
}

cplx partial_scalar_product_bf(const CList& u, const CList& v, cplx s, const LatticeConfig& lat) {
    const int n = static_cast<int>(v.size());
    if (u.size() != v.size()) fail(ErrorKind::DegenerateInput, "u and v must have equal length");
    CVector vec = basis_vector(lat.N, 0);
    for (int j = n - 1; j >= 0; --j) vec = monodromy(v[j], s - static_cast<double>(j), lat.xi, lat.ctx).B * vec;
    for (int j = 1; j <= n; ++j) vec = monodromy(u[j - 1], s - static_cast<double>(j), lat.xi, lat.ctx).C * vec;
    return vec(0);
}

cplx partition_function_bf(const CList& u, const CList& xi, cplx s, const EllipticContext& ctx) {
    const int N = static_cast<int>(xi.size());
    if (static_cast<int>(u.size()) != N) fail(ErrorKind::DegenerateInput, "Z_N needs N spectral parameters");
    CVector vec = basis_vector(N, (1 << N) - 1);
    // rightmost factor C(u_1; s+N−1) acts first
    for (int j = 0; j < N; ++j) vec = monodromy(u[j], s + static_cast<double>(N - 1 - j), xi, ctx).C * vec;
    return vec(0);
}

namespace {

int wrap(int k, int L) { return ((k % L) + L) % L; }

}  // namespace

DynamicalState transfer_apply(cplx u, const DynamicalState& psi, cplx kappa, const LatticeConfig& lat) {
    const int L = lat.L();
    DynamicalState out = psi;
    for (int k = 0; k < L; ++k) {
        const Monodromy T = monodromy(u, lat.height(k), lat.xi, lat.ctx);
        out.values[k] = T.A * psi.values[wrap(k + 1, L)] + kappa * (T.D * psi.values[wrap(k - 1, L)]);
    }
    return out;
}

DynamicalState transfer_apply_dual(cplx u, const DynamicalState& phi, cplx kappa, const LatticeConfig& lat) {
    const int L = lat.L();
    DynamicalState out = phi;
    for (auto& x : out.values) x.setZero();
    for (int k = 0; k < L; ++k) {
        const Monodromy T = monodromy(u, lat.height(k), lat.xi, lat.ctx);
        out.values[wrap(k + 1, L)] += (phi.values[k].transpose() * T.A).transpose();
        out.values[wrap(k - 1, L)] += kappa * (phi.values[k].transpose() * T.D).transpose();
    }
    return out;
}

CMatrix local_operator(LocalOp op, int site, int N) {
    if (site < 1 || site > N) fail(ErrorKind::DegenerateInput, "site out of range");
    const int dim = 1 << N;
    CMatrix M = CMatrix::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) {
        const int down = (c >> (site - 1)) & 1;
        switch (op) {
            case LocalOp::E_mm: M(c, c) = static_cast<double>(down); break;
            case LocalOp::E_pp: M(c, c) = static_cast<double>(1 - down); break;
            case LocalOp::sigma_z: M(c, c) = static_cast<double>(spin_of(down)); break;
        }
    }
    return M;
}

cplx local_matrix_element_bf(LocalOp op, int site, const DynamicalState& bra, const DynamicalState& ket,
                             const LatticeConfig& lat) {
    const CMatrix E = local_operator(op, site, lat.N);
    DynamicalState tmp = ket;
    for (auto& x : tmp.values) x = E * x;
    return pairing(bra, tmp);
}

CMatrix f_basis_operator(FBasisKind kind, cplx u, cplx s, const LatticeConfig& lat) {
    const int N = lat.N;
    check_size(N);
    const int dim = 1 << N;
    const EllipticContext& ctx = lat.ctx;
    const cplx one = ctx.bracket_one();
    CMatrix M = CMatrix::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) {
        for (int i = 0; i < N; ++i) {
            const int bit = (c >> i) & 1;
            if (kind == FBasisKind::B_tilde && bit == 0) {
                const int out = c | (1 << i);
                const int h_out = N - 2 * popcount(static_cast<unsigned>(out));
                const int h_rest = N - 2 * popcount(static_cast<unsigned>(c)) - 1;
                cplx val = br(s - 1.0, ctx) / br_nz(s + static_cast<double>(h_out), ctx, "[s+h]");
                const cplx sr = s + static_cast<double>(h_rest);
                val *= one * br(sr + u - lat.xi[i], ctx) / (br_nz(sr, ctx, "[s+h]") * br_nz(u - lat.xi[i] + 1.0, ctx));
                for (int j = 0; j < N; ++j) {
                    if (j == i) continue;
                    if (((c >> j) & 1) == 0)
                        val *= br(u - lat.xi[j], ctx) / br_nz(u - lat.xi[j] + 1.0, ctx);
                    else
                        val *= br(lat.xi[j] - lat.xi[i] + 1.0, ctx) / br_nz(lat.xi[j] - lat.xi[i], ctx);
                }
                M(out, c) += val;
            } else if (kind == FBasisKind::C_tilde && bit == 1) {
                const int out = c & ~(1 << i);
                cplx val = one * br(s - u + lat.xi[i], ctx) / (br_nz(s, ctx, "[s]") * br_nz(u - lat.xi[i] + 1.0, ctx));
                for (int j = 0; j < N; ++j) {
                    if (j == i || ((c >> j) & 1) == 1) continue;
                    val *= br(u - lat.xi[j], ctx) / br_nz(u - lat.xi[j] + 1.0, ctx) *
                           br(lat.xi[i] - lat.xi[j] + 1.0, ctx) / br_nz(lat.xi[i] - lat.xi[j], ctx);
                }
                M(out, c) += val;
            }
        }
    }
    return M;
}

namespace {

// ⟨0| C̃(u_n;s−n)…C̃(u_1;s−1) as a row vector.
Eigen::RowVectorXcd fbasis_bra(const CList& u, cplx s, const LatticeConfig& lat) {
    Eigen::RowVectorXcd row = basis_vector(lat.N, 0).transpose();
    for (int j = static_cast<int>(u.size()); j >= 1; --j)
        row = row * f_basis_operator(FBasisKind::C_tilde, u[j - 1], s - static_cast<double>(j), lat);
    return row;
}

}  // namespace

cplx partial_scalar_product_fbasis(const CList& u, const CList& v, cplx s, const LatticeConfig& lat) {
    CVector vec = basis_vector(lat.N, 0);
    for (int j = static_cast<int>(v.size()) - 1; j >= 0; --j)
        vec = f_basis_operator(FBasisKind::B_tilde, v[j], s - static_cast<double>(j), lat) * vec;
    return fbasis_bra(u, s, lat).cwiseProduct(vec.transpose()).sum();
}

cplx g_function_fbasis(const std::vector<int>& ell, const CList& u, const CList& v, cplx s,
                       const LatticeConfig& lat) {
    int config = 0;
    for (int l : ell) {
        if (l < 1 || l > lat.N) fail(ErrorKind::DegenerateInput, "site index out of range");
        config |= 1 << (l - 1);
    }
    if (popcount(static_cast<unsigned>(config)) != static_cast<int>(ell.size()))
        fail(ErrorKind::DegenerateInput, "site indices must be distinct");
    CVector vec = basis_vector(lat.N, config);
    for (int j = static_cast<int>(v.size()) - 1; j >= 0; --j)
        vec = f_basis_operator(FBasisKind::B_tilde, v[j], s - static_cast<double>(j), lat) * vec;
    return fbasis_bra(u, s, lat).cwiseProduct(vec.transpose()).sum();
}

cplx recursion_coefficient(int k, int ell_k, const std::vector<int>& ell_rest, cplx v_k, cplx s,
                           const LatticeConfig& lat) {
    const EllipticContext& ctx = lat.ctx;
    const double shift = static_cast<double>(lat.N - 2 * lat.n + k);
    const cplx xk = lat.xi[ell_k - 1];
    cplx val = ctx.bracket_one() * br(s + shift + v_k - xk, ctx) /
               (br_nz(s + shift, ctx) * br_nz(v_k - xk, ctx, "[v - xi]"));
    val *= br(s - static_cast<double>(k), ctx) * d_fn(v_k, lat) / br_nz(s + shift - 1.0, ctx);
    for (int l : ell_rest) {
        const cplx xl = lat.xi[l - 1];
        val *= br(v_k - xl + 1.0, ctx) / br_nz(v_k - xl, ctx) * br(xl - xk + 1.0, ctx) / br_nz(xl - xk, ctx);
    }
    return val;
}

HeightOperatorSpace zero_weight_space(const LatticeConfig& lat) {
    if (lat.N % 2 != 0) fail(ErrorKind::DegenerateInput, "zero-weight space needs even N");
    return HeightOperatorSpace{sector_configs(lat.N, lat.N / 2), lat.L()};
}

namespace {

CMatrix restrict_block(const CMatrix& M, const std::vector<int>& configs) {
    const int d = static_cast<int>(configs.size());
    CMatrix out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = M(configs[i], configs[j]);
    return out;
}

}  // namespace

CMatrix hat_operator(MonoKind kind, cplx u, const LatticeConfig& lat, const HeightOperatorSpace& sp) {
    if (kind != MonoKind::A && kind != MonoKind::D)
        fail(ErrorKind::DegenerateInput, "only A and D act within Fun(H[0])");
    const int d = static_cast<int>(sp.configs.size());
    const int L = sp.L;
    CMatrix H = CMatrix::Zero(L * d, L * d);
    for (int k = 0; k < L; ++k) {
        const CMatrix blk = restrict_block(monodromy_entry(kind, u, lat.height(k), lat), sp.configs);
        const int k2 = wrap(kind == MonoKind::A ? k + 1 : k - 1, L);
        H.block(k * d, k2 * d, d, d) = blk;
    }
    return H;
}

CMatrix transfer_matrix_hat(cplx u, cplx kappa, const LatticeConfig& lat, const HeightOperatorSpace& sp) {
    const int d = static_cast<int>(sp.configs.size());
    const int L = sp.L;
    CMatrix H = CMatrix::Zero(L * d, L * d);
    for (int k = 0; k < L; ++k) {
        const Monodromy T = monodromy(u, lat.height(k), lat.xi, lat.ctx);
        H.block(k * d, wrap(k + 1, L) * d, d, d) += restrict_block(T.A, sp.configs);
        H.block(k * d, wrap(k - 1, L) * d, d, d) += kappa * restrict_block(T.D, sp.configs);
    }
    return H;
}

double inverse_problem_residual(int first_site, const std::vector<int>& alphas, const LatticeConfig& lat) {
    const int last = first_site + static_cast<int>(alphas.size()) - 1;
    if (first_site < 1 || alphas.empty() || last > lat.N) fail(ErrorKind::DegenerateInput, "site range out of bounds");
    const HeightOperatorSpace sp = zero_weight_space(lat);
    const int d = static_cast<int>(sp.configs.size());
    const int dimF = sp.size();

    CMatrix lhs = CMatrix::Identity(dimF, dimF);
    for (std::size_t t = 0; t < alphas.size(); ++t) {
        const LocalOp op = alphas[t] > 0 ? LocalOp::E_pp : LocalOp::E_mm;
        const CMatrix E = restrict_block(local_operator(op, first_site + static_cast<int>(t), lat.N), sp.configs);
        CMatrix big = CMatrix::Zero(dimF, dimF);
        for (int k = 0; k < sp.L; ++k) big.block(k * d, k * d, d, d) = E;
        lhs = lhs * big;
    }

    CMatrix rhs = CMatrix::Identity(dimF, dimF);
    for (int k = 1; k < first_site; ++k) rhs = rhs * transfer_matrix_hat(lat.xi[k - 1], 1.0, lat, sp);
    for (std::size_t t = 0; t < alphas.size(); ++t) {
        const MonoKind kind = alphas[t] > 0 ? MonoKind::A : MonoKind::D;
        rhs = rhs * hat_operator(kind, lat.xi[first_site - 1 + static_cast<int>(t)], lat, sp);
    }
    for (int k = last; k >= 1; --k) {
        // X t = rhs  ⇔  tᵀ Xᵀ = rhsᵀ
        const CMatrix tt = transfer_matrix_hat(lat.xi[k - 1], 1.0, lat, sp).transpose();
        Eigen::PartialPivLU<CMatrix> lu(tt);
        if (lu.rcond() < 1e-12) fail(ErrorKind::SingularTransfer, "t(xi_k) is numerically singular on Fun(H[0])");
        rhs = lu.solve(rhs.transpose()).transpose();
    }
    return max_abs(lhs - rhs) / std::max(1.0, max_abs(lhs));
}

double inverse_problem_residual(int site, int alpha, int beta, const LatticeConfig& lat) {
    if (alpha != beta) fail(ErrorKind::DegenerateInput, "only weight-preserving alpha = beta is supported");
    if (alpha != 1 && alpha != -1) fail(ErrorKind::DegenerateInput, "alpha must be +1 or -1");
    return inverse_problem_residual(site, std::vector<int>{alpha}, lat);
}

cplx generating_function_bf(cplx kappa, int m, const DynamicalState& bra, const DynamicalState& ket,
                            const LatticeConfig& lat) {
    if (m < 1 || m > lat.N) fail(ErrorKind::DegenerateInput, "m out of range");
    DynamicalState q = ket;
    for (auto& x : q.values)
        for (int c = 0; c < x.size(); ++c) {
            const int downs = popcount(static_cast<unsigned>(c) & ((1u << m) - 1u));
            x(c) *= std::pow(kappa, downs);
        }
    return pairing(bra, q) / pairing(bra, ket);
}

cplx height_difference_bf(int m, int ell, const DynamicalState& bra, const DynamicalState& ket,
                          const LatticeConfig& lat) {
    if (m < 1 || m > lat.N) fail(ErrorKind::DegenerateInput, "m out of range");
    DynamicalState q = ket;
    for (auto& x : q.values)
        for (int c = 0; c < x.size(); ++c) {
            const int downs = popcount(static_cast<unsigned>(c) & ((1u << m) - 1u));
            if (m - 2 * downs != ell) x(c) = 0.0;
        }
    return pairing(bra, q) / pairing(bra, ket);
}

}  // namespace csos
