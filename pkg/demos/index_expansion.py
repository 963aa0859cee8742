"""Index transform of 2 K0(2 sqrt x) and its reconstruction.

mkl_forward gives the transform along two routes (a Mellin contour and
the direct x-integral); mkl_expand rebuilds f from the transform.
"""

import numpy as np

from indexlab import transforms as T
from indexlab.mellin import catalog_entry

entry = catalog_entry("bessel-k0", 0.5)
tau = np.array([0.0, 0.5, 1.5, 3.0])
contour = T.mkl_forward(entry.image, tau, "contour")
direct = T.mkl_forward(entry.image, tau, "direct")
for t, a, b in zip(tau, contour, direct):
    print(f"tau={t:4.1f}  contour {complex(a).real: .10e}  direct {complex(b).real: .10e}")

for x in (0.5, 1.0, 3.0):
    got = T.mkl_expand(entry.image, x)
    want = entry.point_function(x)
    print(f"x={x}: expansion {complex(got).real:.8f}  exact {want:.8f}")
