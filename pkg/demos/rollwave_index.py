#!/usr/bin/env python3
"""Roll-wave profiles and their high-frequency stability index.

Each profile is one periodic cell of the inviscid shallow-water equations:
height climbs smoothly through the sonic point and drops across a single
Lax shock.  The transverse mode loses amplitude at rate gamma_1/alpha_1
along its transit and gets reflected into the cell with coefficient a0 at
the shock; the product

    I = exp(int_0^X gamma_1/alpha_1) * a0

is the high-frequency stability index.  Below one it buys both a spectral
gap at high frequency and, through the damping weights, an energy that
decays up to low-norm slaving.
"""

import numpy as np

from rollgap import rollwave as rw

print("f{:>6} {:>10} {:>10} {:>10} {:>10} {:>12} {:>10}".format(
    "F", "period X", "h_plus", "h_minus", "index I", "hf abscissa", "eta1(0)"))
for F in (2.2, 2.5, 3.0, 5.0, 10.0, 20.0):
    p = rw.build_profile(F)
    cd = rw.characteristics(p)
    rep = rw.stability_index(p, cd)
    eps = rw.default_epsilon(p, cd)
    w = rw.damping_weights(p, cd, eps, 1.0)
    print(f"{F:6.1f} {p.X:10.5f} {p.h_plus:10.5f} {p.h_minus:10.5f} "
          f"{rep.index:10.6f} {rep.hf_abscissa:12.5f} {w.eta1_zero:10.6f}")

print()
p = rw.build_profile(3.0)
cd = rw.characteristics(p)
rep = rw.stability_index(p, cd)
print("closer look at F = 3:")
print(f"  Rankine-Hugoniot residual at the shock: "
      f"{np.max(np.abs(p.rankine_hugoniot_residual())):.2e}")
print(f"  Lax structure: alpha_1 < 0 on [0, X], alpha_2({0:.0f}+) = "
      f"{cd.alpha2[0]:+.4f}, alpha_2(X-) = {cd.alpha2[-1]:+.4f}")
print(f"  sonic point x_s = {p.x_s:.5f} with alpha_2'(x_s) = "
      f"{cd.alpha2_prime_xs:.4f} = (F-2)/2")
print(f"  boundary coefficient a0 = {rep.a0:.6f} equals the determinant "
      f"ratio C = {rep.C:.6f}")
print(f"  transit integral = {rep.transit_integral:.6f}  ->  "
      f"I = exp(transit) * C = {rep.index:.6f}")

print()
print("the sonic mode sets a regularity threshold for the slaving estimate:")
thr = rw.hs_threshold(p, cd)
print(f"  gamma_2(x_s) = {cd.gamma2_xs:.2e} (an exact zero for this system),")
print(f"  so the threshold 1/2 - gamma_2(x_s)/alpha_2'(x_s) = {thr} exactly:")
print("  slaving of H^s to L^2 needs s > 1/2, and H^1 works.")

print()
print("wave-family sweep at F = 3 (amplitude parametrized by h_plus):")
for amp in (0.1, 0.3, 0.5, 0.7, 0.9):
    pa = rw.build_profile(3.0, amplitude=amp, n_grid=400)
    ra = rw.stability_index(pa, rw.characteristics(pa))
    print(f"  amplitude {amp:.1f}: h+ = {pa.h_plus:.4f}, X = {pa.X:.4f}, "
          f"I = {ra.index:.6f}")
print("the index stays below one across the family, matching the numerical")
print("stability observations for these waves.")
