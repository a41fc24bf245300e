#!/usr/bin/env python3
"""Certifying a candidate minimizer: definite combination or common root.

At a critical scaling the first variation of the top singular cluster is a
family of Hermitian forms on the cluster subspace.  A local minimum forbids
any definite real combination; a common nonzero root of all the forms
rebuilds a phase multiplier U with rho(U B_S) = ||B_S|| and closes the gap.
For a pair of forms on C^2 exactly one of the two certificates always
exists (and the root is constructive); three independent complex forms can
evade both, which is precisely how the 4x4 gap matrix escapes.
"""

import numpy as np

from rollgap import certify as cf
from rollgap import matgap as mg

rng = np.random.default_rng(1)

print("== the two-form dichotomy on C^2 ==")
counts = {"definite-combination": 0, "common-root": 0, "undecided": 0}
for _ in range(2000):
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2))
    cert = cf.form_pair_dichotomy((a + a.T) / 2, (b + b.T) / 2)
    counts[cert.kind] += 1
print(f"  2000 random real-symmetric pairs -> {counts}")

print()
print("== three complex forms that defeat both certificates ==")
pauli = mg.pauli_like_forms()
print("  diag(1,-1), the real flip, and the imaginary flip:")
print(f"  definite combination search -> {cf.definite_combination_search(pauli)}")
v, res = cf.numeric_common_root(pauli, cf.CertifyOptions(root_starts=64))
print(f"  best joint-root residual on the unit sphere -> {res:.4f} (far from 0)")

print()
print("== certification at actual minimizers ==")
B = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / 2
_, S, _, _ = mg.min_scaled_norm(B)
cert = cf.certify_minimizer(B, S)
BS = mg.scale(B, S)
print(f"  random 2x2 at its argmin: {cert.kind}, residual {cert.residual:.2e}")
rho = mg.spectral_radius(mg.phase_apply(BS, cert.phases))
print(f"  reconstructed phases give rho(U B_S) = {rho:.12f} "
      f"vs ||B_S|| = {mg.op_norm(BS):.12f}")

B4, _, _ = mg.counterexample_c4()
cert4 = cf.certify_minimizer(B4, mg.DiagonalScaling.identity(4))
print(f"  4x4 gap matrix at the identity: {cert4.kind}")
print(f"    diagnostics: {cert4.diagnostics}")

print()
print("== five real forms on C^3 (the dense frontier for real matrices) ==")
five = cf.forms_r3_five()
print(f"  independent forms: {cf.independent_count(five)} (out of the 6-dim space)")
print(f"  definite combination -> {cf.definite_combination_search(five)}")
_, res5 = cf.numeric_common_root(five, cf.CertifyOptions(root_starts=64))
print(f"  joint-root residual floor -> {res5:.4f}")

print()
print("== why small dimensions are safe: orbit dimension counts ==")
for n, m, field in [(3, 2, "complex"), (4, 2, "complex"), (5, 3, "real"), (6, 3, "real")]:
    d = cf.dimension_count(n, m, field)
    ambient = 2 * n * n if field == "complex" else n * n
    rel = "<" if d < ambient else ">="
    print(f"  {field} n={n}, multiplicity {m}: orbit bound {d} {rel} ambient {ambient}")
print("  (a bound below the ambient dimension makes multiple top singular")
print("   values non-generic, which is what the density arguments exploit)")
