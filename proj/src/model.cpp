#include "csos/model.hpp"

#include <cmath>
#include <sstream>

namespace csos {

LatticeConfig::LatticeConfig(EllipticContext c, CList xi_, cplx s0_, int n_)
    : ctx(c), N(static_cast<int>(xi_.size())), xi(std::move(xi_)), s0(s0_) {
    n = n_ < 0 ? N / 2 : n_;
    const int rest = N - 2 * n;
    if (rest < 0 || rest % ctx.L() != 0)
        fail(ErrorKind::ConfigError, "N - 2n must be a non-negative multiple of L");
    aleph = rest / ctx.L();
}

void LatticeConfig::validate() const {
    if (N < 1 || N > 12) fail(ErrorKind::ConfigError, "N must lie in 1..12");
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k)
            if (std::abs(br(xi[j] - xi[k], ctx)) <= 1e-8)
                fail(ErrorKind::ConfigError, "inhomogeneities coincide modulo the period lattice");
    for (int k = -N; k <= N + L(); ++k) {
        const BracketEval b = bracket_eval(s0 + static_cast<double>(k), 1, ctx);
        if (std::abs(b.value) < 1e-8 * b.scale) {
            std::ostringstream os;
            os << "height line hits a bracket zero at s0+" << k;
            fail(ErrorKind::ConfigError, os.str());
        }
    }
}

cplx d_fn(cplx u, const LatticeConfig& lat) {
    cplx p = 1.0;
    for (const cplx x : lat.xi) p *= br(u - x, lat.ctx) / br_nz(u - x + 1.0, lat.ctx, "[u - xi + 1]");
    return p;
}

cplx d_logd(cplx u, const LatticeConfig& lat) {
    cplx s = 0.0;
    for (const cplx x : lat.xi) s += br_logd(u - x, lat.ctx) - br_logd(u - x + 1.0, lat.ctx);
    return s;
}

BoltzmannWeights boltzmann_weights(cplx u, cplx s, const EllipticContext& ctx) {
    const cplx den = br_nz(s, ctx, "[s]") * br_nz(u + 1.0, ctx, "[u+1]");
    const cplx bu = br(u, ctx);
    const cplx one = ctx.bracket_one();
    BoltzmannWeights w;
    w.b = br(s + 1.0, ctx) * bu / den;
    w.c = br(s + u, ctx) * one / den;
    w.b_bar = br(s - 1.0, ctx) * bu / den;
    w.c_bar = br(s - u, ctx) * one / den;
    return w;
}

Eigen::Matrix4cd r_matrix(cplx u, cplx s, const EllipticContext& ctx) {
    const BoltzmannWeights w = boltzmann_weights(u, s, ctx);
    Eigen::Matrix4cd R = Eigen::Matrix4cd::Zero();
    R(0, 0) = w.a;
    R(1, 1) = w.b;
    R(1, 2) = w.c;
    R(2, 1) = w.c_bar;
    R(2, 2) = w.b_bar;
    R(3, 3) = w.a_bar;
    return R;
}

Eigen::Matrix4cd permutation4() {
    Eigen::Matrix4cd P = Eigen::Matrix4cd::Zero();
    P(0, 0) = 1.0;
    P(1, 2) = 1.0;
    P(2, 1) = 1.0;
    P(3, 3) = 1.0;
    return P;
}

namespace {

// R acting on factors (i, j) of a three-factor space; bits ordered factor 1 most significant.
// The height is s + spin(k) for the untouched factor k when shift_by_other is set.
Eigen::Matrix<cplx, 8, 8> embed3(int i, int j, cplx u, cplx s, bool shift_by_other, const EllipticContext& ctx) {
    Eigen::Matrix<cplx, 8, 8> M = Eigen::Matrix<cplx, 8, 8>::Zero();
    const int k = 3 - i - j;  // factors are 0,1,2
    auto bit = [](int idx, int f) { return (idx >> (2 - f)) & 1; };
    for (int in = 0; in < 8; ++in) {
        const cplx sh = shift_by_other ? s + static_cast<double>(spin_of(bit(in, k))) : s;
        const Eigen::Matrix4cd R = r_matrix(u, sh, ctx);
        const int c = 2 * bit(in, i) + bit(in, j);
        for (int r = 0; r < 4; ++r) {
            if (R(r, c) == cplx(0.0, 0.0)) continue;
            int out = in;
            out &= ~(1 << (2 - i));
            out &= ~(1 << (2 - j));
            out |= ((r >> 1) & 1) << (2 - i);
            out |= (r & 1) << (2 - j);
            M(out, in) += R(r, c);
        }
    }
    return M;
}

}  // namespace

double r_property_residual(RProperty kind, cplx u1, cplx u2, cplx u3, cplx s, const EllipticContext& ctx) {
    const Eigen::Matrix4cd P = permutation4();
    switch (kind) {
        case RProperty::dybe: {
            // Concrete type: an `auto` Eigen product would outlive its temporaries.
            const Eigen::Matrix<cplx, 8, 8> lhs = embed3(0, 1, u1 - u2, s, true, ctx) * embed3(0, 2, u1 - u3, s, false, ctx) *
                             embed3(1, 2, u2 - u3, s, true, ctx);
            const Eigen::Matrix<cplx, 8, 8> rhs = embed3(1, 2, u2 - u3, s, false, ctx) * embed3(0, 2, u1 - u3, s, true, ctx) *
                             embed3(0, 1, u1 - u2, s, false, ctx);
            return (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, lhs.cwiseAbs().maxCoeff());
        }
        case RProperty::unitarity: {
            const Eigen::Matrix4cd prod = r_matrix(u1, s, ctx) * (P * r_matrix(-u1, s, ctx) * P);
            return (prod - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
        }
        case RProperty::crossing: {
            // σ^y₁ R₁₂(−u−1; s−h₁) σ^y₁ · [s+h₂][u]/([s][u+1]), h₁ acting rightmost inside R.
            Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
            for (int in = 0; in < 4; ++in) {
                const Eigen::Matrix4cd R = r_matrix(-u1 - 1.0, s - static_cast<double>(spin_of(in >> 1)), ctx);
                M.col(in) = R.col(in);
            }
            Eigen::Matrix2cd sy;
            sy << 0.0, -kI, kI, 0.0;
            Eigen::Matrix4cd Sy1 = Eigen::Matrix4cd::Zero();
            Sy1.block<2, 2>(0, 2) = sy(0, 1) * Eigen::Matrix2cd::Identity();
            Sy1.block<2, 2>(2, 0) = sy(1, 0) * Eigen::Matrix2cd::Identity();
            Eigen::Matrix4cd F = Eigen::Matrix4cd::Zero();
            for (int in = 0; in < 4; ++in) {
                const double h2 = spin_of(in & 1);
                F(in, in) = br(s + h2, ctx) * br(u1, ctx) / (br_nz(s, ctx) * br_nz(u1 + 1.0, ctx));
            }
            const Eigen::Matrix4cd lhs = Sy1 * M * Sy1 * F;
            const Eigen::Matrix4cd R21 = P * r_matrix(u1, s, ctx) * P;
            Eigen::Matrix4cd rhs;
            for (int o = 0; o < 4; ++o)
                for (int i = 0; i < 4; ++i) {
                    const int o1 = o >> 1, o2 = o & 1, i1 = i >> 1, i2 = i & 1;
                    rhs(o, i) = R21(2 * i1 + o2, 2 * o1 + i2);
                }
            return (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
        }
        case RProperty::zero_weight: {
            Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
            for (int i = 0; i < 4; ++i) H(i, i) = spin_of(i >> 1) + spin_of(i & 1);
            const Eigen::Matrix4cd R = r_matrix(u1, s, ctx);
            return (R * H - H * R).cwiseAbs().maxCoeff();
        }
        case RProperty::permutation_at_zero:
            return (r_matrix(0.0, s, ctx) - P).cwiseAbs().maxCoeff();
    }
    return 0.0;
}

}  // namespace csos
