#!/usr/bin/env python3
"""The scaled-norm / phase-radius gap, and the 4x4 matrix that keeps it open.

For small matrices the two optimizations

    inf_S ||S B S^{-1}||      over positive diagonal scalings, and
    max_U rho(U B)            over diagonal unitary phase multipliers,

meet: every complex matrix up to size 3 and every real matrix up to size 5
has zero gap.  The story changes at size 4, where a rank-two matrix built
from two orthonormal frames pins the scaled norm at exactly 1 while no
choice of phases lifts the spectral radius past roughly 0.9.
"""

import numpy as np

from rollgap import matgap as mg

rng = np.random.default_rng(0)

print("== random matrices close the gap ==")
for n, field in [(2, "complex"), (3, "complex"), (4, "real"), (5, "real")]:
    if field == "complex":
        B = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    else:
        B = rng.standard_normal((n, n)) / np.sqrt(n)
    rep = mg.gap(B)
    print(f"  {field} {n}x{n}: inf_norm={rep.inf_norm:.6f} "
          f"max_rho={rep.max_rho:.6f} rel_gap={rep.rel_gap:.2e}")

print()
print("== the 4x4 counterexample ==")
B, R, L = mg.counterexample_c4()
print(f"  ||B|| = {mg.op_norm(B):.12f}  (top singular value has multiplicity 2)")
print(f"  rho(B) = {mg.spectral_radius(B):.6f}")

rep = mg.gap(B)
print(f"  inf_S ||S B S^-1|| = {rep.inf_norm:.9f}  at logs {np.round(rep.argmin_S.logs, 6)}")
print(f"  max_U rho(U B)     = {rep.max_rho:.9f}")
print(f"  gap = {rep.gap:.4f}  ({100 * rep.rel_gap:.1f} percent of the norm)")

print()
print("  why the norm cannot drop below 1: for any scaling the trace of the")
print("  compressed Gram product stays at least 2 while its two nonzero")
print("  eigenvalues are the squared singular values:")
for _ in range(3):
    S = mg.DiagonalScaling.from_s(np.exp(rng.uniform(-1.5, 1.5, 4)))
    print(f"    trace at random S = {mg.verify_c4_trace(S):.6f}  (>= 2)")
print(f"    trace at identity = {mg.verify_c4_trace(mg.DiagonalScaling.identity(4)):.6f}")

print()
print("== the phase landscape is genuinely multimodal ==")
B2, curve = mg.landscape_local_min_2x2()
print("  rank-one 2x2 example: rho(diag(1, e^{i t}) B) = sqrt(2 (1 - cos t))")
print(f"    t=0    -> {curve(0.0):.2e}   (a strict local minimum)")
print(f"    t=pi/2 -> {curve(np.pi / 2):.6f}")
print(f"    t=pi   -> {curve(np.pi):.6f}   (the global maximum)")

Br = mg.block_local_max(B2, 1.0)
v, _, _ = mg.max_phase_rho(Br)
print("  padding it with a scalar block of size 1.0 plants a local maximum:")
print(f"    rho at U=Id = {mg.spectral_radius(Br):.4f}, "
      f"global max over phases = {v:.4f}")
print("  multi-start search over phases is therefore not optional.")
