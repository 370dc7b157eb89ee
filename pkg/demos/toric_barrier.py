"""
Energy barrier of the 2x2 toric code
====================================

Exact bottleneck search against the string-operator path family.
"""

from __future__ import annotations

import math

from stabtherm import BathModel, PathFamily, generalized_barrier_exact, heuristic_barrier, spectral_gap, toric_code
from stabtherm.bounds import gen_bound, h_star

model = toric_code(2, 2)
print(model.describe())

# Every one of the 4^8 targets, each with its own cheapest path (about ten seconds).
exact = generalized_barrier_exact(model, limit=8, with_eta=True)
print("exact:")
print(exact.to_text())

# String paths: grow Z strings along rows/columns, then X strings on the dual lattice.
css = heuristic_barrier(model, PathFamily.css_string())
print("css family:")
print(css.to_text())

# The family reaches the exact value, but its paths revisit qubits,
# so only the N-dependent bound applies.
for beta in (0.0, 0.5, 1.0):
    bath = BathModel.metropolis(beta)
    lam = spectral_gap(model, bath, workers=4).gap
    bound = gen_bound(model, bath, css)
    closed = h_star(model, bath) / (8 * model.n) * math.exp(-8 * beta)
    print(f"beta={beta:.1f} lambda={lam:.6g} gen_bound={bound:.6g} h*/(8N)e^(-8 beta)={closed:.6g}")
