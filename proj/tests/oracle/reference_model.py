"""Plain numpy reference model used to freeze the constants in tests/unit/test_frozen.cpp.

Written independently of the C++ sources: series theta, explicit monodromy products,
finite-difference Newton for the Bethe roots.
"""
import numpy as np, itertools, math, cmath

class Ctx:
    def __init__(s, r=1, L=5, tau=0.8j):
        s.r, s.L, s.tau = r, L, tau
        s.eta = r / L

def theta1(z, tau, nmax=40):
    tot = 0
    for n in range(-nmax, nmax):
        tot += (-1) ** n * cmath.exp(1j * math.pi * tau * (n + 0.5) ** 2) * cmath.exp((2 * n + 1) * 1j * math.pi * z)
    return -1j * tot

def theta1p(z, tau, nmax=40):
    tot = 0
    for n in range(-nmax, nmax):
        tot += (-1) ** n * cmath.exp(1j * math.pi * tau * (n + 0.5) ** 2) * (2 * n + 1) * 1j * math.pi * cmath.exp((2 * n + 1) * 1j * math.pi * z)
    return -1j * tot

C = Ctx()
def br(u, m=1):
    return theta1(C.eta * u, m * C.tau)
def brp(u, m=1):
    return C.eta * theta1p(C.eta * u, m * C.tau)

def Rmat(u, s):
    b = br(s + 1) * br(u) / (br(s) * br(u + 1))
    c = br(s + u) * br(1) / (br(s) * br(u + 1))
    bb = br(s - 1) * br(u) / (br(s) * br(u + 1))
    cb = br(s - u) * br(1) / (br(s) * br(u + 1))
    return np.array([[1, 0, 0, 0], [0, b, c, 0], [0, cb, bb, 0], [0, 0, 0, 1]], dtype=complex)

def spin(bit):
    return 1 - 2 * bit

def monodromy(u, s, xi):
    N = len(xi)
    D = 1 << N
    T = {(a, b): np.zeros((D, D), complex) for a in (0, 1) for b in (0, 1)}
    for sig in range(D):
        for beta in (0, 1):
            states = [(1.0 + 0j, beta, 0, 0)]  # amp, aux, outbits, weight
            for j in range(N):
                sj = (sig >> j) & 1
                new = []
                for amp, aux, ob, w in states:
                    R = Rmat(u - xi[j], s + w)
                    col = 2 * aux + sj
                    for row in range(4):
                        val = R[row, col]
                        if val != 0:
                            a2, s2 = row >> 1, row & 1
                            new.append((amp * val, a2, ob | (s2 << j), w + spin(s2)))
                states = new
            for amp, aux, ob, w in states:
                T[(aux, beta)][ob, sig] += amp
    return T  # A=T[0,0], B=T[0,1], C=T[1,0], D=T[1,1]

def A(u, s, xi): return monodromy(u, s, xi)[(0, 0)]
def B(u, s, xi): return monodromy(u, s, xi)[(0, 1)]
def Cop(u, s, xi): return monodromy(u, s, xi)[(1, 0)]
def Dop(u, s, xi): return monodromy(u, s, xi)[(1, 1)]

def d_fn(u, xi):
    p = 1
    for x in xi: p *= br(u - x) / br(u - x + 1)
    return p

def sector(N, n):
    return [c for c in range(1 << N) if bin(c).count('1') == n]

def omegas(n):
    return [cmath.exp(1j * math.pi * C.r * n / C.L) * cmath.exp(2j * math.pi * l / C.L) for l in range(C.L)]

def wpow(w, s):
    return cmath.exp(s * cmath.log(w))

def bethe_ket(v, w, xi, s0):
    N = len(xi); n = len(v)
    out = []
    for k in range(C.L):
        s = s0 + k
        vec = np.zeros(1 << N, complex); vec[0] = 1
        for j in reversed(range(n)):
            vec = B(v[j], s - j, xi) @ vec
        phi = wpow(w, s)
        for j in range(1, n + 1): phi *= br(1) / br(s - j)
        out.append(phi * vec)
    return out

def bethe_bra(v, w, xi, s0):
    N = len(xi); n = len(v)
    out = []
    for k in range(C.L):
        s = s0 + k
        vec = np.zeros(1 << N, complex); vec[0] = 1  # row vector <0|
        row = vec.copy()
        for j in range(n, 0, -1):
            row = row @ Cop(v[j - 1], s - j, xi)
        phi = wpow(w, -s)
        for j in range(0, n): phi *= br(s + j) / br(1)
        out.append(phi * row)
    return out

def pair(bra, ket):
    return sum(b @ k for b, k in zip(bra, ket)) / C.L

def transfer_apply(u, psi, xi, s0, kappa=1.0):
    L = C.L; out = []
    for k in range(L):
        s = s0 + k
        T = monodromy(u, s, xi)
        out.append(T[(0, 0)] @ psi[(k + 1) % L] + kappa * T[(1, 1)] @ psi[(k - 1) % L])
    return out

def transfer_apply_dual(u, phi, xi, s0, kappa=1.0):
    # (phi t)(s') : sum_s phi(s) [A(u;s) delta_{s'=s+1} + kappa D(u;s) delta_{s'=s-1}]
    L = C.L; out = [np.zeros_like(phi[0]) for _ in range(L)]
    for k in range(L):
        s = s0 + k
        T = monodromy(u, s, xi)
        out[(k + 1) % L] += phi[k] @ T[(0, 0)]
        out[(k - 1) % L] += kappa * phi[k] @ T[(1, 1)]
    return out

def tau_ev(u, v, w, xi, kappa=1.0, aleph=0):
    p1 = w; p2 = (-1) ** (C.r * aleph) * kappa / w * d_fn(u, xi)
    for vl in v:
        p1 *= br(vl - u + 1) / br(vl - u); p2 *= br(u - vl + 1) / br(u - vl)
    return p1 + p2

def bethe_res(v, w, xi, kappa=1.0, aleph=0):
    n = len(v); res = []
    for j in range(n):
        l1 = 1; r1 = (-1) ** (C.r * aleph) * kappa * w ** -2 * d_fn(v[j], xi)
        for l in range(n):
            if l != j:
                l1 *= br(v[l] - v[j] + 1) / br(v[l] - v[j]); r1 *= br(v[j] - v[l] + 1) / br(v[j] - v[l])
        res.append(l1 - r1)
    return np.array(res)

def newton(v, w, xi, kappa=1.0, aleph=0, it=60):
    v = np.array(v, complex)
    for _ in range(it):
        f = bethe_res(v, w, xi, kappa, aleph)
        if np.abs(f).max() < 1e-14: break
        J = np.zeros((len(v), len(v)), complex); h = 1e-7
        for k in range(len(v)):
            dv = v.copy(); dv[k] += h
            J[:, k] = (bethe_res(dv, w, xi, kappa, aleph) - f) / h
        v = v - np.linalg.solve(J, f)
    return v, np.abs(bethe_res(v, w, xi, kappa, aleph)).max()

def uj0(I, xi, n):
    N = len(xi); out = []
    for j, ij in enumerate(I):
        val = br(1) / brp(0)
        for k in range(N):
            if k != ij: val *= br(xi[ij] - xi[k] - 1) / br(xi[ij] - xi[k])
        for k in I:
            val *= br(xi[k] - xi[ij] - 1) / br(xi[k] - xi[ij] + 1)
        out.append(val)
    return out

def subsets(n):
    return range(1 << n)

def Sn_bf(u, v, s, xi):
    N = len(xi); n = len(u)
    vec = np.zeros(1 << N, complex); vec[0] = 1
    for j in reversed(range(n)):
        vec = B(v[j], s - j, xi) @ vec
    row = np.zeros(1 << N, complex); row[0] = 1
    for j in range(n, 0, -1):
        row = row @ Cop(u[j - 1], s - j, xi)
    return row @ vec

def Nmat(u, v, g):
    n = len(u)
    return np.array([[br(u[j] - v[k] + g) / br(u[j] - v[k]) for k in range(n)] for j in range(n)])

def vandpref(u, v):
    n = len(u); p = 1
    for j in range(n):
        for k in range(j + 1, n):
            p *= br(u[j] - u[k]) * br(v[k] - v[j])
    return p

def Sn_detsum(u, wu, v, s, g, xi, aleph=0):
    n = len(u); sg = (-1) ** (C.r * aleph)
    pref = br(s - n) / (br(g) ** n * br(sum(u) - sum(v) + g + s))
    for j in range(1, n): pref *= br(s - j) / br(s + j)
    num = 1
    for t in range(n): num *= d_fn(u[t], xi) * d_fn(v[t], xi)
    pref *= num / vandpref(u, v)
    tot = 0
    for S in subsets(n):
        for St in subsets(n):
            cS = bin(S).count('1'); cSt = bin(St).count('1')
            term = (-1) ** (cS + cSt)
            dv = []
            for j in range(n):
                inS = (S >> j) & 1; inSt = (St >> j) & 1
                if not inSt:
                    f = sg * 1 / d_fn(v[j], xi)
                    for t in range(n): f *= br(u[t] - v[j] + 1)
                else:
                    f = wu ** -2
                    for t in range(n): f *= br(u[t] - v[j] - 1)
                term *= f
                dv.append(v[j] - (inS - inSt))
            term *= br(g + s - cS + cSt) / br(s - cS + cSt)
            term *= np.linalg.det(Nmat(u, dv, g))
            tot += term
    return pref * tot

def Omega(u, wu, v, wv, g, xi, aleph=0, kappa=1.0):
    n = len(u); sg = (-1) ** (C.r * aleph)
    M = np.zeros((n, n), complex)
    for i in range(n):
        for j in range(n):
            x = u[i] - v[j]
            pa = 1; pd = 1
            for t in range(n): pa *= br(u[t] - v[j] + 1); pd *= br(u[t] - v[j] - 1)
            M[i, j] = sg / br(g) * (br(x + g) / br(x) - wv / wu * br(x + g + 1) / br(x + 1)) * pa \
                + 1 / br(g) * (br(x + g) / br(x) - wu / wv * br(x + g - 1) / br(x - 1)) * kappa * wu ** -2 * d_fn(v[j], xi) * pd
    return M

def hsum(wu, wv, g, s0):
    return sum(wpow(wv, s0 + k) / wpow(wu, s0 + k) * br(g + s0 + k) / br(s0 + k) for k in range(C.L)) / C.L

def SP_det(u, wu, v, wv, xi, s0, aleph=0):
    g = sum(v) - sum(u)
    pref = hsum(wu, wv, g, s0)
    for t in range(len(u)): pref *= d_fn(u[t], xi)
    return pref / vandpref(u, v) * np.linalg.det(Omega(u, wu, v, wv, g, xi, aleph))

def Ktil(x):
    return brp(x - 1) / br(x - 1) - brp(x + 1) / br(x + 1)

def dlog_d(x, xi):
    return sum(brp(x - e) / br(x - e) - brp(x - e + 1) / br(x - e + 1) for e in xi)

def gaudin(u, wu, xi, aleph=0):
    n = len(u)
    Phi = np.zeros((n, n), complex)
    for j in range(n):
        for k in range(n):
            Phi[j, k] = -Ktil(u[j] - u[k])
        Phi[j, j] += -dlog_d(u[j], xi) + sum(Ktil(u[j] - u[t]) for t in range(n))
    pref = (-1) ** (n * C.r * aleph) / (-brp(0)) ** n
    for t in range(n): pref *= d_fn(u[t], xi)
    for j in range(n):
        for k in range(n):
            pref *= br(u[j] - u[k] + 1)
            if j != k: pref /= br(u[j] - u[k])
    return pref * np.linalg.det(Phi)

def newton_safe(v, w, xi, kappa, it=30):
    v = np.array(v, complex)
    try:
        f = bethe_res(v, w, xi, kappa)
        for _ in range(it):
            nf = np.abs(f).max()
            if nf < 1e-13: return v, nf, True
            J = np.zeros((len(v), len(v)), complex); h = 1e-7
            for k in range(len(v)):
                dv = v.copy(); dv[k] += h
                J[:, k] = (bethe_res(dv, w, xi, kappa) - f) / h
            step = np.linalg.solve(J, f)
            if np.abs(step).max() > 0.5: return v, nf, False
            v = v - step
            f = bethe_res(v, w, xi, kappa)
        nf = np.abs(f).max()
        return v, nf, nf < 1e-10
    except (OverflowError, ZeroDivisionError, np.linalg.LinAlgError):
        return v, np.inf, False

def continue_sol(I, ell, xi, kappa_t, k0=1e-3):
    n = len(I)
    w = cmath.exp(1j * math.pi * C.r * n / C.L - 2j * math.pi * ell / C.L)
    u0 = uj0(I, xi, n)
    v = np.array([xi[i] - 1 + k0 * w ** -2 * u0[j] for j, i in enumerate(I)])
    v, r, ok = newton_safe(v, w, xi, k0)
    kap = k0; h = 0.05
    while abs(kap - kappa_t) > 1e-15:
        nk = kap + min(h, abs(kappa_t - kap)) * (1 if kappa_t > kap else -1)
        v2, r2, ok = newton_safe(v, w, xi, nk)
        if ok:
            v, kap, r = v2, nk, r2; h = min(h * 1.5, 0.1)
        else:
            h /= 2
            if h < 1e-5: raise RuntimeError("stuck at %g" % kap)
    return v, w, r

def Eop(N, site, which):  # which: 'mm','pp','z'
    D = 1 << N; M = np.zeros((D, D), complex)
    for c in range(D):
        down = (c >> site) & 1
        if which == 'mm': M[c, c] = down
        elif which == 'pp': M[c, c] = 1 - down
        else: M[c, c] = 1 - 2 * down
    return M

def me_bf(bra, ket, Op):
    return sum(b @ Op @ k for b, k in zip(bra, ket)) / C.L

def Pmat(u, wu, v, wv, g, xi_i, aleph=0):
    n = len(u); sg = (-1) ** (C.r * aleph)
    P = np.zeros((n, n), complex)
    for a in range(n):
        x = u[a] - xi_i
        left = 1 / br(g) * (br(x + g) / br(x) - wv / wu * br(x + g + 1) / br(x + 1))
        for b in range(n):
            right = sg
            for t in range(n):
                right *= br(v[t] - v[b] + 1) * br(u[t] - xi_i + 1) / br(v[t] - xi_i + 1)
            P[a, b] = left * right
    return P

def ff_det(u, wu, v, wv, xi, s0, site, which, aleph=0):
    n = len(u); g = sum(v) - sum(u)
    pref = hsum(wu, wv, g, s0)
    for k in range(site):
        pref *= tau_ev(xi[k], u, wu, xi, 1, aleph) / tau_ev(xi[k], v, wv, xi, 1, aleph)
    for t in range(n): pref *= d_fn(u[t], xi)
    pref /= vandpref(u, v)
    Om = Omega(u, wu, v, wv, g, xi, aleph); P = Pmat(u, wu, v, wv, g, xi[site], aleph)
    if which == 'mm': return pref * (np.linalg.det(Om) - np.linalg.det(Om - P))
    if which == 'pp': return pref * np.linalg.det(Om - P)
    return pref * np.linalg.det(Om - 2 * P)

def Omega0(u, wu, xi, aleph=0):
    n = len(u); sg = (-1) ** (C.r * aleph)
    M = np.zeros((n, n), complex)
    for j in range(n):
        A = sg
        for t in range(n): A *= br(u[t] - u[j] + 1)
        for i in range(n):
            M[i, j] = Ktil(u[i] - u[j])
            if i == j: M[i, j] += dlog_d(u[j], xi) - sum(Ktil(u[j] - u[t]) for t in range(n))
            M[i, j] *= A / brp(0)
    return M

def P0(u, wu, xi_i, aleph=0):
    n = len(u); sg = (-1) ** (C.r * aleph)
    P = np.zeros((n, n), complex)
    for b in range(n):
        A = sg
        for t in range(n): A *= br(u[t] - u[b] + 1)
        for a in range(n):
            x = u[a] - xi_i
            P[a, b] = (brp(x) / br(x) - brp(x + 1) / br(x + 1)) * A / brp(0)
    return P

def ff_diag(u, wu, xi, site, which, aleph=0):
    n = len(u)
    pref = 1
    for t in range(n): pref *= d_fn(u[t], xi)
    for j in range(n):
        for k in range(n):
            if j != k: pref /= br(u[j] - u[k])
    Om = Omega0(u, wu, xi, aleph); P = P0(u, wu, xi[site], aleph)
    if which == 'mm': return pref * (np.linalg.det(Om) - np.linalg.det(Om - P))
    if which == 'pp': return pref * np.linalg.det(Om - P)
    return pref * np.linalg.det(Om - 2 * P)
