"""Prints the constants frozen in tests/unit/test_frozen.cpp.

Run from this directory: python3 freeze_values.py
"""
import cmath
import math

import mpmath as mp
import numpy as np

import reference_model as R

mp.mp.dps = 30
XI2 = [0.31 + 0.42j, 1.27 + 0.18j]
XI4 = [0.31 + 0.42j, 1.27 + 0.18j, 2.05 + 0.77j, 0.88 + 1.31j]
S0 = 0.43 + 0.61j


def show(name, z):
    z = complex(z)
    print(f"{name}: {{{z.real:.17g}, {z.imag:.17g}}}")


def theta_mp(z, tau):
    return mp.jtheta(1, mp.pi * z, mp.exp(1j * mp.pi * tau))


show("theta1(0.2+0.3i, 0.7i)", theta_mp(mp.mpc(0.2, 0.3), mp.mpc(0, 0.7)))
show("[0.7+0.2i] eta=1/5 tau=0.8i", theta_mp(mp.mpc(0.7, 0.2) / 5, mp.mpc(0, 0.8)))

Rm = R.Rmat(0.3 + 0.1j, 0.45 + 0.2j)
show("b(0.3+0.1i; 0.45+0.2i)", Rm[1, 1])
show("c(0.3+0.1i; 0.45+0.2i)", Rm[1, 2])

show("S1 N=2", R.Sn_bf([0.6 + 0.3j], [1.1 + 0.5j], S0, XI2))
show("S2 N=4", R.Sn_bf([0.6 + 0.3j, 1.9 + 0.7j], [1.1 + 0.5j, 0.2 + 0.9j], S0, XI4))

for kappa in (1.0, 0.3):
    v, w, r = R.continue_sol([0], 0, XI2, kappa)
    show(f"root I={{1}} l=0 kappa={kappa}", v[0])

v, w, _ = R.continue_sol([0], 0, XI2, 1.0)
bra = R.bethe_bra(v, w, XI2, S0)
ket = R.bethe_ket(v, w, XI2, S0)
nrm = R.pair(bra, ket)
show("norm I={1} l=0", nrm)
show("tau(0.5) I={1} l=0", R.tau_ev(0.5, v, w, XI2))
kappa = 0.3
Q = R.Eop(2, 0, 'pp') + kappa * R.Eop(2, 0, 'mm')
show("<Q_{1,1}> kappa=0.3 I={1} l=0", R.me_bf(bra, ket, Q) / nrm)
