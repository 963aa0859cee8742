"""Push a test function through a transform and back again.

The forward value on a vertical line comes from the Barnes integral; the
inverse integral then recovers f on a grid. Families whose image decays
too slowly for an absolutely convergent inversion are refused, and the
refusal says why.

Run: python demos/round_trip.py
"""

from indexlab import kernels as K
from indexlab import transforms as T
from indexlab.errors import IndexLabError
from indexlab.mellin import catalog_entry

entry = catalog_entry("exp", 0.5)
for name in ("truncated-mellin", "one-plus-t:2", "inc-gamma"):
    fam = K.family_from_name(name)
    rep = T.round_trip(fam, entry)
    print(f"{name:>18}: max relative error {rep.max_rel_error:.2e}")

k0 = catalog_entry("bessel-k0", 0.5)
try:
    T.round_trip(K.exp_kl(), k0)
except IndexLabError as exc:
    print(f"{'exp-kl':>18}: refused ({exc})")
