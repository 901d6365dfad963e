"""
Tensor wavelet bases on the plane
=================================

Build the Haar and Daubechies-4 tensor bases for the dilation 2I,
check the filter conditions and orthonormality, and evaluate a few
basis functions.
"""

import itertools

import numpy as np

from wavedens.wavelets import tensor_basis, tensor_filter_families, verify_filter_conditions

# Haar is exact; D4 values come from cascade tables (depth 12) with
# linear interpolation between nodes
haar = tensor_basis("haar", 2)
d4 = tensor_basis("d4", 2)
print("D4 low-pass filter:", np.round(d4.filters.h, 6))

# mother k follows a binary pattern over the two axes, 0 = father, 1 = mother
for k in (1, 2, 3):
    print(f"mother {k}: pattern {haar.mother_pattern(k)}")

# the four tensor filter families satisfy the quadrature mirror conditions
for basis in (haar, d4):
    rep = verify_filter_conditions(tensor_filter_families(basis.filters, 2), 2 * np.eye(2, dtype=int))
    print(basis.name, "filter conditions passed:", rep["passed"])

# inner products over a level-0 / level-1 system
fathers = [(0, 0, g) for g in itertools.product(range(-1, 2), repeat=2)]
details = [(k, j, g) for j in (0, 1) for k in (1, 2, 3)
           for g in itertools.product(range(-1, 2 + j), repeat=2)]
res = haar.orthonormality_report(itertools.product(fathers + details, repeat=2))
print("Haar max |<a, b> - delta|:", res)

d4_1d = tensor_basis("d4", 1)
system = [(k, 0, (g,)) for k in (0, 1) for g in range(-3, 4)]
print("D4 (d=1) max residual:", d4_1d.orthonormality_report(itertools.product(system, repeat=2)))

# point evaluation: Haar father at level 1 is 2 on its dyadic square
print("Phi_{1,(0,0)}(0.2, 0.3) =", haar.eval_father(1, (0, 0), [0.2, 0.3]))
print("Psi^3_{0,(0,0)}(0.25, 0.75) =", haar.eval_mother(3, 0, (0, 0), [0.25, 0.75]))
