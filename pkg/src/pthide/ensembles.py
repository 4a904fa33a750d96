"""State ensembles, their multifold products, and modulo-sum coarse graining."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .operators import (
    DEFAULT_DIM_CAP,
    BipartiteDims,
    HermitianOperator,
    tensor,
)

PROB_SUM_TOL = 1e-12
STATE_TRACE_TOL = 1e-10
STATE_PSD_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class StateEnsemble:
    """An ordered list of (probability, density operator) pairs on fixed dims."""

    dims: BipartiteDims
    items: tuple[tuple[float, HermitianOperator], ...]

    def __post_init__(self):
        items = tuple((float(eta), rho) for eta, rho in self.items)
        for _, rho in items:
            if rho.dims != self.dims:
                raise ValueError(f"state dims {rho.dims} do not match ensemble dims {self.dims}")
        object.__setattr__(self, "items", items)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([eta for eta, _ in self.items])

    @property
    def states(self) -> list[HermitianOperator]:
        return [rho for _, rho in self.items]


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    ok: bool


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.ok]


def validate(
    ensemble: StateEnsemble,
    prob_tol: float = PROB_SUM_TOL,
    trace_tol: float = STATE_TRACE_TOL,
    psd_tol: float = STATE_PSD_TOL,
    strict: bool = False,
) -> ValidationReport:
    """Measure every ensemble invariant and report the residuals.

    Checks: probabilities in [0, 1] summing to one, each state unit-trace and
    positive semidefinite.  With ``strict=True`` a failing report raises.
    """
    checks = []
    etas = ensemble.probabilities
    if ensemble.n == 0:
        checks.append(CheckResult("nonempty", 1.0, False))
    else:
        range_dev = float(max(np.maximum(-etas, 0.0).max(), np.maximum(etas - 1.0, 0.0).max()))
        checks.append(CheckResult("probabilities_in_unit_interval", range_dev, range_dev == 0.0))
        sum_dev = abs(float(etas.sum()) - 1.0)
        checks.append(CheckResult("probability_sum", sum_dev, sum_dev <= prob_tol))
        for i, (_, rho) in enumerate(ensemble.items):
            tr_dev = abs(rho.trace() - 1.0)
            checks.append(CheckResult(f"state_{i}_trace", tr_dev, tr_dev <= trace_tol))
            lmin = float(np.linalg.eigvalsh(rho.entries)[0])
            checks.append(CheckResult(f"state_{i}_psd", lmin, lmin >= -psd_tol))
    report = ValidationReport(tuple(checks))
    if strict and not report.ok:
        failed = ", ".join(f"{c.name} (residual {c.residual:.3e})" for c in report.failures())
        raise ValueError(f"ensemble validation failed: {failed}")
    return report


def omega(n: int, indices) -> int:
    """Modulo-n sum of a vector of symbol indices, each in {0, ..., n-1}."""
    if n < 2:
        raise ValueError("modulus n must be >= 2")
    total = 0
    for c in indices:
        c = int(c)
        if not 0 <= c < n:
            raise ValueError(f"index {c} out of range for modulus {n}")
        total += c
    return total % n


def index_vectors(n: int, length: int):
    """All length-L index vectors in lexicographic order (first entry slowest)."""
    return itertools.product(range(n), repeat=length)


def fold(ensemble: StateEnsemble, copies: int, cap: int | None = None) -> StateEnsemble:
    """The ensemble of L independent preparations.

    Items are ordered lexicographically in the index vector, with the first
    copy's index most significant; probabilities multiply and states tensor.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if copies == 1:
        return ensemble
    _check_folded_dim(ensemble, copies, cap)
    items = []
    for c in index_vectors(ensemble.n, copies):
        eta, rho = ensemble.items[c[0]]
        for cl in c[1:]:
            eta_l, rho_l = ensemble.items[cl]
            eta *= eta_l
            rho = tensor(rho, rho_l, cap=cap)
        items.append((eta, rho))
    dims = items[0][1].dims
    return StateEnsemble(dims, tuple(items))


def coarse_grain(ensemble: StateEnsemble, copies: int, cap: int | None = None) -> StateEnsemble:
    """Group the L-fold ensemble by the modulo-n sum of the preparation indices.

    Bin i collects every index vector with modulo sum i; its probability is the
    total weight and its state the normalized weighted mixture.  An empty bin
    (zero total weight) is refused because the mixture is then undefined.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if copies == 1:
        return ensemble
    _check_folded_dim(ensemble, copies, cap)
    n = ensemble.n
    dims = BipartiteDims(ensemble.dims.dA**copies, ensemble.dims.dB**copies)
    dtype = np.result_type(*[rho.entries.dtype for _, rho in ensemble.items])
    bin_eta = [0.0] * n
    bin_sum = [np.zeros((dims.total, dims.total), dtype=dtype) for _ in range(n)]
    # Stream over index vectors so only the n accumulators are ever resident.
    for c in index_vectors(n, copies):
        eta = ensemble.items[c[0]][0]
        rho = ensemble.items[c[0]][1]
        for cl in c[1:]:
            eta_l, rho_l = ensemble.items[cl]
            eta *= eta_l
            rho = tensor(rho, rho_l, cap=cap)
        i = sum(c) % n
        bin_eta[i] += eta
        bin_sum[i] += eta * rho.entries
    for i, eta in enumerate(bin_eta):
        if eta <= 0.0:
            raise ValueError(
                f"coarse bin {i} has zero probability; the normalized bin state is undefined"
            )
    items = tuple(
        (bin_eta[i], HermitianOperator(dims, bin_sum[i] / bin_eta[i])) for i in range(n)
    )
    return StateEnsemble(dims, items)


def is_mutually_orthogonal(ensemble: StateEnsemble, tol: float = ORTHOGONALITY_TOL) -> bool:
    """True iff Tr(rho_i rho_j) <= tol for every pair i != j."""
    states = [rho.entries for rho in ensemble.states]
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            overlap = float(np.einsum("ij,ji->", states[i], states[j]).real)
            if overlap > tol:
                return False
    return True


def _check_folded_dim(ensemble: StateEnsemble, copies: int, cap: int | None):
    cap = DEFAULT_DIM_CAP if cap is None else cap
    folded = ensemble.dims.total**copies
    if folded > cap:
        raise ValueError(
            f"{copies}-fold dimension {folded} exceeds cap {cap}; "
            "pass a larger cap explicitly to allow it"
        )
