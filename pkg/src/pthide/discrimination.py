"""Guessing probabilities, optimality certificates, and the POVM optimizer.

Two objectives share all of the machinery here.  Writing ``G_i`` for either
``eta_i * rho_i`` (plain minimum-error discrimination) or
``eta_i * rho_i^PT`` (the partial-transpose variant, which upper-bounds
every LOCC strategy), the optimal value is

    max over POVMs {M_i}  of  sum_i Tr(G_i M_i).

A measurement attains the maximum iff ``sum_j G_j M_j - G_i`` is PSD for
every i, and any Hermitian H with ``H - G_i`` PSD for all i certifies
``Tr H`` as an upper bound on the value.  Those two facts drive both the
duality-gap stopping rule and :func:`certify_optimal` / :func:`dual_bound`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import StateEnsemble
from .operators import BipartiteDims, HermitianOperator, partial_transpose, trace_norm

POVM_PSD_TOL = 1e-9
POVM_COMPLETENESS_TOL = 1e-9
CERTIFY_TOL = 1e-8


@dataclass(frozen=True)
class Povm:
    """A measurement: positive operators on shared dims summing to identity."""

    dims: BipartiteDims
    elements: tuple[HermitianOperator, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        for m in elements:
            if m.dims != self.dims:
                raise ValueError(f"element dims {m.dims} do not match POVM dims {self.dims}")
        object.__setattr__(self, "elements", elements)

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)


def validate_povm(
    povm: Povm,
    psd_tol: float = POVM_PSD_TOL,
    completeness_tol: float = POVM_COMPLETENESS_TOL,
    strict: bool = False,
):
    """Check positivity of each element and completeness of the sum.

    Returns a list of (name, residual, ok) triples; raises in strict mode.
    """
    checks = []
    total = np.zeros((povm.dims.total, povm.dims.total))
    for i, m in enumerate(povm.elements):
        lmin = float(np.linalg.eigvalsh(m.entries)[0])
        checks.append((f"element_{i}_psd", lmin, lmin >= -psd_tol))
        total = total + m.entries
    completeness = float(np.linalg.norm(total - np.eye(povm.dims.total)))
    checks.append(
        ("completeness", completeness, completeness <= completeness_tol * povm.dims.total)
    )
    if strict and not all(ok for _, _, ok in checks):
        bad = ", ".join(f"{name} ({res:.3e})" for name, res, ok in checks if not ok)
        raise ValueError(f"POVM validation failed: {bad}")
    return checks


def _objective_operators(ensemble: StateEnsemble, use_pt: bool) -> np.ndarray:
    """Stack eta_i * rho_i (optionally partially transposed) as (n, D, D)."""
    mats = []
    for eta, rho in ensemble.items:
        a = partial_transpose(rho).entries if use_pt else rho.entries
        mats.append(eta * a)
    dtype = np.result_type(*[m.dtype for m in mats])
    return np.stack([m.astype(dtype, copy=False) for m in mats])


def success_probability(ensemble: StateEnsemble, povm: Povm, use_pt: bool = False) -> float:
    """Average probability sum_i eta_i Tr(rho_i M_i), optionally with rho_i^PT."""
    if povm.n_outcomes != ensemble.n:
        raise ValueError(
            f"POVM has {povm.n_outcomes} outcomes but the ensemble has {ensemble.n} states"
        )
    if povm.dims != ensemble.dims:
        raise ValueError("POVM and ensemble dimensions differ")
    total = 0.0 + 0.0j
    for (eta, rho), m in zip(ensemble.items, povm.elements):
        a = partial_transpose(rho).entries if use_pt else rho.entries
        total += eta * np.einsum("ij,ji->", a, m.entries)
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        raise ValueError(f"objective has non-negligible imaginary part {total.imag:.3e}")
    return float(total.real)


def _weighted_difference(ensemble: StateEnsemble, use_pt: bool) -> HermitianOperator:
    (eta0, rho0), (eta1, rho1) = ensemble.items
    a0 = partial_transpose(rho0) if use_pt else rho0
    a1 = partial_transpose(rho1) if use_pt else rho1
    return eta0 * a0 - eta1 * a1


def qg_two_state(ensemble: StateEnsemble) -> float:
    """Closed-form two-state value of the partial-transpose objective.

    Equals ``1/2 + 1/2 * ||eta0 rho0^PT - eta1 rho1^PT||_1``.  Always at
    least 1/2; partial transposition is not trace-norm contractive, so for
    strongly NPT pairs the value may exceed 1 (it bounds a probability
    without being one itself).
    """
    if ensemble.n != 2:
        raise ValueError("closed form requires exactly two states")
    return 0.5 + 0.5 * trace_norm(_weighted_difference(ensemble, use_pt=True))


def helstrom_two_state(ensemble: StateEnsemble) -> float:
    """Optimal two-state minimum-error success probability (Helstrom value)."""
    if ensemble.n != 2:
        raise ValueError("closed form requires exactly two states")
    return 0.5 + 0.5 * trace_norm(_weighted_difference(ensemble, use_pt=False))


def helstrom_measurement(ensemble: StateEnsemble, use_pt: bool = False) -> Povm:
    """Two-outcome projective measurement onto the nonnegative / negative
    eigenspaces of the weighted state difference.

    This measurement attains the two-state optimum for the corresponding
    objective (plain or partially transposed).
    """
    if ensemble.n != 2:
        raise ValueError("projective construction requires exactly two states")
    diff = _weighted_difference(ensemble, use_pt)
    w, v = np.linalg.eigh(diff.entries)
    nonneg = v[:, w >= 0.0]
    m0 = nonneg @ nonneg.conj().T
    m0 = (m0 + m0.conj().T) / 2
    m1 = np.eye(diff.dims.total) - m0
    return Povm(diff.dims, (HermitianOperator(diff.dims, m0), HermitianOperator(diff.dims, m1)))


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`solve_optimal_value`.

    The step schedule multiplies the base step ``step_scale / ||G||`` by
    ``min(1 + iteration / step_growth_every, step_growth_cap)``; growth keeps
    late iterations from crawling once the active face is nearly identified.
    """

    max_iters: int = 100_000
    gap_tol: float = 1e-6
    step_scale: float = 2.0
    step_growth_every: float = 50.0
    step_growth_cap: float = 64.0
    check_every: int = 25
    dykstra_max_sweeps: int = 200
    dykstra_tol: float = 1e-12
    eig_clip_tol: float = 0.0
    commuting_fast_path: bool = True
    fast_path_seed: int = 20250801


@dataclass(frozen=True)
class OptimalityReport:
    """Result of a POVM optimization run.

    ``gap = Tr(dual_H) - value`` is a certified bound on the distance to the
    optimum: ``dual_H`` is feasible by construction, so the true optimum lies
    in ``[value, value + gap]`` whether or not the run converged.
    """

    value: float
    povm: Povm
    dual_h: HermitianOperator
    gap: float
    residual_min_eigs: np.ndarray
    converged: bool
    iterations: int
    method: str
    value_history: np.ndarray = field(repr=False, default=None)


def _psd_clip(x: np.ndarray, clip_tol: float) -> np.ndarray:
    w, v = np.linalg.eigh(x)
    w = np.where(w > clip_tol, w, 0.0)
    out = (v * w[..., None, :]) @ np.conjugate(np.swapaxes(v, -1, -2))
    return (out + np.conjugate(np.swapaxes(out, -1, -2))) / 2


def _project_completeness(x: np.ndarray) -> np.ndarray:
    n, d = x.shape[0], x.shape[-1]
    resid = x.sum(axis=0) - np.eye(d, dtype=x.dtype)
    return x - resid[None, :, :] / n


def _project_povm_set(x: np.ndarray, opts: SolverOptions) -> np.ndarray:
    """Project a block tuple onto {M_i PSD, sum_i M_i = identity}.

    n = 1 and n = 2 admit exact projections; larger n runs Dykstra's
    alternating scheme between the PSD cone product and the completeness
    subspace (the affine set needs no correction term).
    """
    n, d = x.shape[0], x.shape[-1]
    if n == 1:
        return np.eye(d, dtype=x.dtype)[None, :, :].copy()
    if n == 2:
        # minimize ||M0 - X0||^2 + ||(I - M0) - X1||^2 over 0 <= M0 <= I
        mid = (x[0] + np.eye(d, dtype=x.dtype) - x[1]) / 2
        w, v = np.linalg.eigh(mid)
        w = np.clip(w, 0.0, 1.0)
        m0 = (v * w) @ v.conj().T
        m0 = (m0 + m0.conj().T) / 2
        return np.stack([m0, np.eye(d, dtype=x.dtype) - m0])
    scale = 1.0 + float(np.linalg.norm(x))
    cur = x
    correction = np.zeros_like(x)
    for _ in range(opts.dykstra_max_sweeps):
        clipped = _psd_clip(cur + correction, opts.eig_clip_tol)
        correction = cur + correction - clipped
        nxt = _project_completeness(clipped)
        delta = float(np.linalg.norm(nxt - cur))
        cur = nxt
        if delta <= opts.dykstra_tol * scale:
            break
    return cur


def _dual_lift(g: np.ndarray, m: np.ndarray):
    """Value, residual minima, and the feasibility shift of the dual candidate.

    Z is the Hermitized weighted operator sum; shifting by the worst
    violation ``lam`` makes ``Z + lam * I`` dominate every G_i.
    """
    d = g.shape[-1]
    z_raw = np.einsum("nij,njk->ik", g, m)
    value = float(np.trace(z_raw).real)
    z = (z_raw + z_raw.conj().T) / 2
    resid_eigs = np.linalg.eigvalsh(z[None, :, :] - g)
    resid_min = resid_eigs[:, 0].copy()
    lam = max(0.0, float(-resid_min.min()))
    return value, z, resid_min, lam, d


def _try_commuting_solve(g: np.ndarray, opts: SolverOptions):
    """Exact solve when the objective operators pairwise commute.

    In a joint eigenbasis the objective decouples: each eigenvector is
    assigned to the state with the largest diagonal value, the optimum is the
    sum of those maxima, and the unshifted dual candidate already certifies a
    zero gap.  Probabilistic matvec probes guard both the commutation test
    and the joint-diagonalization, falling back to the iterative path on any
    doubt.
    """
    n, d = g.shape[0], g.shape[-1]
    rng = np.random.default_rng(opts.fast_path_seed)
    scales = np.array([np.linalg.norm(g[i]) for i in range(n)])
    scales = np.maximum(scales, 1e-300)
    probes = rng.standard_normal((d, 3)).astype(g.dtype, copy=False)
    probes /= np.linalg.norm(probes, axis=0)
    for i in range(n):
        for j in range(i + 1, n):
            comm = g[i] @ (g[j] @ probes) - g[j] @ (g[i] @ probes)
            if np.abs(comm).max() > 1e-8 * scales[i] * scales[j]:
                return None
    diag = None
    basis = None
    for _ in range(2):
        weights = rng.uniform(0.5, 1.5, size=n)
        w, v = np.linalg.eigh(np.einsum("n,nij->ij", weights, g))
        del w
        cand = np.empty((n, d))
        ok = True
        for i in range(n):
            gv = g[i] @ v
            cand[i] = np.einsum("ji,ji->i", v.conj(), gv).real
            recon = v @ (cand[i][:, None] * (v.conj().T @ probes))
            if np.abs(g[i] @ probes - recon).max() > 1e-8 * scales[i]:
                ok = False
                break
        if ok:
            diag, basis = cand, v
            break
    if diag is None:
        return None
    assign = diag.argmax(axis=0)
    top = diag.max(axis=0)
    value = float(top.sum())
    blocks = np.zeros((n, d, d), dtype=basis.dtype)
    for i in range(n):
        cols = basis[:, assign == i]
        if cols.shape[1]:
            b = cols @ cols.conj().T
            blocks[i] = (b + b.conj().T) / 2
    resid_min = np.array([float((top - diag[i]).min()) for i in range(n)])
    z = basis @ (top[:, None] * basis.conj().T)
    z = (z + z.conj().T) / 2
    gap = float(np.trace(z).real) - value
    return value, blocks, z, gap, resid_min


def solve_optimal_value(
    ensemble: StateEnsemble, use_pt: bool = True, opts: SolverOptions | None = None
) -> OptimalityReport:
    """Maximize the (optionally partially transposed) guessing objective.

    Projected gradient ascent over the POVM set: the gradient of the linear
    objective is the constant block tuple (eta_i * A_i); each step projects
    back onto {M_i PSD, sum M_i = identity}; the run stops once the dual
    candidate certifies a gap at most ``gap_tol``.  A non-converged run is
    reported as such, never silently truncated: the returned value/gap pair
    still brackets the optimum.

    Ensembles whose objective operators pairwise commute (e.g. mixtures of
    operators sharing an eigenbasis) are solved exactly in one shot.
    """
    opts = opts or SolverOptions()
    g = _objective_operators(ensemble, use_pt)
    n, d = g.shape[0], g.shape[-1]

    if opts.commuting_fast_path:
        fast = _try_commuting_solve(g, opts)
        if fast is not None:
            value, blocks, z, gap, resid_min = fast
            return OptimalityReport(
                value=value,
                povm=_wrap_povm(ensemble.dims, blocks),
                dual_h=HermitianOperator(ensemble.dims, z),
                gap=gap,
                residual_min_eigs=resid_min,
                converged=abs(gap) <= opts.gap_tol,
                iterations=0,
                method="commuting-eigenbasis",
                value_history=np.array([[0.0, value]]),
            )

    base_step = opts.step_scale / max(float(np.linalg.norm(g)), 1e-300)
    m = np.broadcast_to(np.eye(d, dtype=g.dtype) / n, g.shape).copy()
    history = []
    converged = False
    iterations = 0
    while True:
        value, z, resid_min, lam, _ = _dual_lift(g, m)
        history.append((iterations, value))
        gap = lam * d
        if gap <= opts.gap_tol:
            converged = True
            break
        if iterations >= opts.max_iters:
            break
        for _ in range(opts.check_every):
            if iterations >= opts.max_iters:
                break
            step = base_step * min(
                1.0 + iterations / opts.step_growth_every, opts.step_growth_cap
            )
            m = _project_povm_set(m + step * g, opts)
            iterations += 1

    h = z + lam * np.eye(d, dtype=z.dtype)
    gap = float(np.trace(h).real) - value
    return OptimalityReport(
        value=value,
        povm=_wrap_povm(ensemble.dims, m),
        dual_h=HermitianOperator(ensemble.dims, h),
        gap=gap,
        residual_min_eigs=resid_min,
        converged=converged,
        iterations=iterations,
        method="projected-ascent",
        value_history=np.array(history),
    )


def _wrap_povm(dims: BipartiteDims, blocks: np.ndarray) -> Povm:
    return Povm(dims, tuple(HermitianOperator(dims, b) for b in blocks))


@dataclass(frozen=True)
class CertificationResult:
    residual_min_eigs: np.ndarray
    certified: bool
    tol: float


def certify_optimal(
    ensemble: StateEnsemble, povm: Povm, use_pt: bool = True, tol: float = CERTIFY_TOL
) -> CertificationResult:
    """Optimality certificate for a candidate measurement.

    The measurement is optimal iff every residual
    ``sum_j eta_j A_j M_j - eta_i A_i`` is PSD; this reports the minimum
    eigenvalue of each (Hermitized) residual and certifies when all of them
    are >= -tol.
    """
    if povm.n_outcomes != ensemble.n:
        raise ValueError(
            f"POVM has {povm.n_outcomes} outcomes but the ensemble has {ensemble.n} states"
        )
    g = _objective_operators(ensemble, use_pt)
    m = np.stack([el.entries.astype(g.dtype, copy=False) for el in povm.elements])
    _, z, resid_min, _, _ = _dual_lift(g, m)
    return CertificationResult(resid_min, bool(resid_min.min() >= -tol), tol)


@dataclass(frozen=True)
class DualBoundResult:
    feasible: bool
    bound: float | None
    violations: tuple[tuple[int, float], ...]

    def __bool__(self) -> bool:
        return self.feasible


def dual_bound(
    ensemble: StateEnsemble, h: HermitianOperator, tol: float = CERTIFY_TOL
) -> DualBoundResult:
    """Check H against the dual feasibility condition and return Tr H.

    If ``H - eta_i rho_i^PT`` is PSD (within tol) for every i, ``Tr H`` upper
    bounds the partial-transpose objective (to within tol times the
    dimension).  An infeasible H yields a rejection naming each violating
    state index with its minimum eigenvalue, not an exception.
    """
    if h.dims != ensemble.dims:
        raise ValueError("operator and ensemble dimensions differ")
    g = _objective_operators(ensemble, use_pt=True)
    mins = np.linalg.eigvalsh(h.entries[None, :, :].astype(g.dtype) - g)[:, 0]
    violations = tuple((int(i), float(mins[i])) for i in np.nonzero(mins < -tol)[0])
    if violations:
        return DualBoundResult(False, None, violations)
    return DualBoundResult(True, h.trace(), ())
