"""Walk through the two-state machinery on a random qubit-pair ensemble.

Builds a random two-state ensemble, compares the plain minimum-error optimum
(Helstrom) to the partial-transpose value that caps every LOCC strategy,
then lets the optimizer rediscover both and checks its certificates.

Run:  python demos/two_state_bounds.py
"""

import numpy as np

from pthide import (
    BipartiteDims,
    HermitianOperator,
    StateEnsemble,
    certify_optimal,
    dual_bound,
    helstrom_measurement,
    helstrom_two_state,
    partial_transpose,
    positive_part,
    qg_two_state,
    solve_optimal_value,
)

rng = np.random.default_rng(2024)
dims = BipartiteDims(2, 2)


def random_state():
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = z @ z.conj().T
    return HermitianOperator(dims, rho / np.trace(rho).real)


eta0 = rng.uniform(0.3, 0.7)
ensemble = StateEnsemble(dims, ((eta0, random_state()), (1 - eta0, random_state())))
print(f"ensemble priors: ({eta0:.4f}, {1 - eta0:.4f})")

# closed forms
p_g = helstrom_two_state(ensemble)
q_g = qg_two_state(ensemble)
print(f"global optimum (Helstrom):        {p_g:.8f}")
print(f"partial-transpose value (LOCC cap): {q_g:.8f}")

# the optimizer should land on both closed forms
for use_pt, label, target in ((False, "plain", p_g), (True, "PT", q_g)):
    report = solve_optimal_value(ensemble, use_pt=use_pt)
    print(
        f"solver [{label}]: value {report.value:.8f} (|diff| {abs(report.value - target):.2e}, "
        f"gap {report.gap:.2e}, {report.iterations} iterations)"
    )

# the eigenspace projector measurement certifies optimality exactly
povm = helstrom_measurement(ensemble, use_pt=True)
cert = certify_optimal(ensemble, povm, use_pt=True)
print(f"projector measurement certified optimal: {cert.certified}")
print(f"  residual minimum eigenvalues: {cert.residual_min_eigs}")

# any dominating Hermitian operator gives a one-line upper bound
h = None
for eta, rho in ensemble.items:
    part = positive_part(eta * partial_transpose(rho))
    h = part if h is None else h + part
bound = dual_bound(ensemble, h)
print(f"positive-parts dual bound: {bound.bound:.8f} (>= {q_g:.8f})")
