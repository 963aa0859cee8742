"""Evaluate a transform kernel twice: by its defining integral and in closed form.

Run: python demos/kernel_two_ways.py
"""

import numpy as np

from indexlab import kernels as K

z = np.array([0.25, 0.5 + 2j, 1.5 - 1j])[:, None]
x = np.array([0.1, 1.0, 5.0])[None, :]

for fam in (K.exp_kl(), K.inc_gamma(), K.one_plus_t2(1)):
    by_integral = K.forward_kernel(fam, z, x)
    closed = K.forward_kernel_closed(fam, z, x)
    gap = np.max(np.abs(by_integral - closed) / np.abs(closed))
    print(f"{fam.name:>14}: max relative gap {gap:.2e}")

# The kernel at z = 1/2, x = 1 has a simple value for the exp-kl family.
v = K.forward_kernel_closed(K.exp_kl(), 0.5, 1.0)
print(f"exp-kl kernel at (1/2, 1) = {complex(v).real:.9f}  vs  sqrt(pi)/e^2 = {np.sqrt(np.pi) / np.e**2:.9f}")
