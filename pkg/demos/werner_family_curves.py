"""Reference values and decay curves for the flip-symmetric ensemble family.

For parameters (m, n, d), the family mixes m-fold tensor products of the two
extremal flip-symmetric two-qudit states into n orthogonal states.  All of
its reference numbers are exact integer arithmetic, so decay curves remain
available far beyond any buildable matrix size.

Run:  python demos/werner_family_curves.py
"""

from pthide import (
    certify_optimal,
    decay_curve_from_value,
    hiding_condition,
    identity,
    Povm,
)
from pthide.constructions import example2, werner_d_threshold
from pthide.operators import HermitianOperator
import numpy as np

print("minimum qudit dimension for the hiding condition, by m:")
for m in (1, 2, 3, 4):
    print(f"  m = {m}:  d >= {werner_d_threshold(m):.4f}")

# small parameters: explicit matrices, certificate checked numerically
res = example2(d=3, m=2, n=3)
ens = res.ensemble
dims = ens.dims
zero = HermitianOperator(dims, np.zeros((dims.total, dims.total)))
povm = Povm(dims, (identity(dims), zero, zero))
cert = certify_optimal(ens, povm, use_pt=True)
print(
    f"\n(m,n,d) = (2,3,3): weight {res.eta0} certified optimal by the identity "
    f"measurement: {cert.certified}"
)

# the figure parameters: formulas-only (the matrices would be astronomically big)
print("\ndecay of the local-success bound toward 1/n:")
for m, n, d in ((2, 3, 6), (3, 6, 9), (4, 9, 12)):
    res = example2(d=d, m=m, n=n, explicit=False)
    curve = decay_curve_from_value(res.qg, n, 12)
    tail = "  ".join(f"{u:.6f}" for u in curve.upper[:8])
    print(f"  (m,n,d)=({m},{n},{d})  eta0={res.eta0}  floor=1/{n}")
    print(f"    L=1..8: {tail}")

# explicit check of the hiding condition at (2,3,6) - still buildable
res = example2(d=6, m=2, n=3)
check = hiding_condition(res.ensemble)
print(
    f"\n(m,n,d) = (2,3,6) explicit check: orthogonal={check.orthogonal}, "
    f"value={check.qg:.5f} < 2/3, passes={check.passes}"
)
