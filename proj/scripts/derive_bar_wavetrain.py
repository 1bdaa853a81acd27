#!/usr/bin/env python3
"""Derive d/dx and d2/dx2 of the submerged-bar inlet wave train

    eta(x) = A cos(k (x - x0)) (1 - tanh x) (1 + tanh(x + x1)) / 4

Emitted as C++ for include/bswave/wave_setup.hpp.
"""

import sympy as sp

x, A, k, x0, x1 = sp.symbols("x A k x0 x1", real=True)

eta = A * sp.cos(k * (x - x0)) * (1 - sp.tanh(x)) * (1 + sp.tanh(x + x1)) / 4
eta_x = sp.diff(eta, x)
eta_xx = sp.diff(eta, x, 2)

repl, reduced = sp.cse([eta, eta_x, eta_xx], optimizations="basic")

print("// generated by scripts/derive_bar_wavetrain.py -- do not edit by hand")
for lhs, rhs in repl:
    print(f"  const double {lhs} = {sp.cxxcode(rhs)};")
print(f"  v = {sp.cxxcode(reduced[0])};")
print(f"  vx = {sp.cxxcode(reduced[1])};")
print(f"  vxx = {sp.cxxcode(reduced[2])};")
