"""Monte Carlo simulation of the hiding protocols and exact strategy oracles.

Broadcast scheme: a hider draws L states independently from an ensemble,
hands all copies to the receivers, and publishes ``z = x + y (mod n)`` where
``y`` is the modulo-n sum of the drawn indices.  Guessing the hidden symbol
``x`` is then exactly as hard as guessing ``y`` from the quantum copies.

Direct encoding: the hider instead sends the coarse-grained state indexed by
``x`` itself, drawn with uniform priors.

Receiver strategies are simulated by Born-rule sampling with exact outcome
probabilities; :func:`exact_strategy_success` enumerates every (preparation,
outcome) pair for a noise-free reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrimination import Povm
from .ensembles import StateEnsemble, coarse_grain, index_vectors, is_mutually_orthogonal
from .operators import HermitianOperator, tensor

RNG_NAME = "numpy-philox"
ENUMERATION_CAP = 10_000_000


class PerCopyParityStrategy:
    """Measure every copy with the same two-outcome measurement and report
    the modulo-2 sum of the outcomes.

    Classically post-processing per-copy outcomes keeps the strategy in the
    same locality class as the base measurement.  Only meaningful for
    two-symbol ensembles.
    """

    name = "parity-product"

    def __init__(self, measurement: Povm):
        if measurement.n_outcomes != 2:
            raise ValueError("parity strategy needs a two-outcome measurement")
        self.measurement = measurement

    def outcome_table(self, ensemble: StateEnsemble) -> np.ndarray:
        """Per-copy Born probabilities, shape (n_states, 2)."""
        if ensemble.dims != self.measurement.dims:
            raise ValueError("measurement dims do not match the ensemble")
        return _born_table(
            [rho.entries for rho in ensemble.states],
            [m.entries for m in self.measurement.elements],
        )

    def guesses_from_outcomes(self, outcomes: np.ndarray) -> np.ndarray:
        return outcomes.sum(axis=1) % 2

    def level_povm(self, copies: int, cap: int | None = None) -> Povm:
        """Explicit measurement equivalent to per-copy measuring plus parity.

        Element i sums the tensor products of base elements over all outcome
        patterns with parity i; identical to
        ((M0+M1)^{xL} + (-1)^i (M0-M1)^{xL}) / 2.
        """
        m0, m1 = self.measurement.elements
        blocks: list[HermitianOperator | None] = [None, None]
        for pattern in index_vectors(2, copies):
            term = m1 if pattern[0] else m0
            for bit in pattern[1:]:
                term = tensor(term, m1 if bit else m0, cap=cap)
            parity = sum(pattern) % 2
            blocks[parity] = term if blocks[parity] is None else blocks[parity] + term
        return Povm(blocks[0].dims, (blocks[0], blocks[1]))


class GlobalPovmStrategy:
    """Measure the full L-copy state with one measurement; outcome o is the
    guess ``guesses[o]``."""

    name = "global-povm"

    def __init__(self, povm: Povm, guesses, name: str | None = None):
        self.povm = povm
        self.guesses = np.asarray(guesses, dtype=int)
        if self.guesses.shape != (povm.n_outcomes,):
            raise ValueError("need one guess per POVM outcome")
        if name:
            self.name = name

    def outcome_table(self, ensemble: StateEnsemble, copies: int, cap: int | None = None):
        """Born probabilities for every L-copy preparation, shape (n^L, outcomes)."""
        states = []
        for c in index_vectors(ensemble.n, copies):
            rho = ensemble.items[c[0]][1]
            for cl in c[1:]:
                rho = tensor(rho, ensemble.items[cl][1], cap=cap)
            states.append(rho.entries)
        if states[0].shape[0] != self.povm.dims.total:
            raise ValueError("POVM dims do not match the folded ensemble")
        return _born_table(states, [m.entries for m in self.povm.elements])


def orthogonal_support_strategy(
    ensemble: StateEnsemble, copies: int, cap: int | None = None, support_tol: float = 1e-10
) -> GlobalPovmStrategy:
    """Projective global measurement onto the supports of the coarse-grained
    states; succeeds with certainty on mutually orthogonal ensembles."""
    if not is_mutually_orthogonal(ensemble):
        raise ValueError("support projectors require a mutually orthogonal ensemble")
    coarse = coarse_grain(ensemble, copies, cap=cap)
    dims = coarse.dims
    blocks = []
    for _, rho in coarse.items:
        w, v = np.linalg.eigh(rho.entries)
        keep = v[:, w > support_tol]
        p = keep @ keep.conj().T
        blocks.append((p + p.conj().T) / 2)
    # route the orthogonal remainder (if any) to outcome 0
    remainder = np.eye(dims.total, dtype=blocks[0].dtype) - sum(blocks)
    blocks[0] = blocks[0] + remainder
    povm = Povm(dims, tuple(HermitianOperator(dims, b) for b in blocks))
    return GlobalPovmStrategy(povm, np.arange(coarse.n), name="global-orthogonal")


@dataclass(frozen=True)
class ProtocolConfig:
    """One simulation run: ensemble, number of copies, trials, seed, strategy."""

    ensemble: StateEnsemble
    copies: int
    trials: int
    seed: int
    strategy: object

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class SimResult:
    empirical_success: float
    stderr: float
    trials: int
    seed: int
    copies: int
    scheme: str
    strategy: str
    rng: str = RNG_NAME
    analytic_reference: float | None = None
    z_score: float | None = None


def _born_table(states, elements) -> np.ndarray:
    table = np.empty((len(states), len(elements)))
    for i, rho in enumerate(states):
        for o, m in enumerate(elements):
            p = complex(np.einsum("ij,ji->", m, rho))
            if abs(p.imag) > 1e-9 or p.real < -1e-9:
                raise ValueError(f"invalid Born probability {p} for state {i}, outcome {o}")
            table[i, o] = max(p.real, 0.0)
    row_sums = table.sum(axis=1)
    if np.abs(row_sums - 1.0).max() > 1e-8:
        raise ValueError("outcome probabilities do not sum to one; POVM incomplete?")
    return table / row_sums[:, None]


def _sample_rows(rng, table: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Categorical samples, one per entry of ``rows``, from table[rows]."""
    cum = np.cumsum(table, axis=1)
    pick = cum[rows]
    u = rng.random(rows.shape)
    out = (u[..., None] >= pick).sum(axis=-1)
    return np.minimum(out, table.shape[1] - 1)


def _finish(success_mask, cfg, scheme, reference) -> SimResult:
    p_hat = float(success_mask.mean())
    stderr = float(np.sqrt(max(p_hat * (1.0 - p_hat), 1e-300) / cfg.trials))
    z = None if reference is None else float((p_hat - reference) / stderr)
    return SimResult(
        empirical_success=p_hat,
        stderr=stderr,
        trials=cfg.trials,
        seed=cfg.seed,
        copies=cfg.copies,
        scheme=scheme,
        strategy=getattr(cfg.strategy, "name", type(cfg.strategy).__name__),
        analytic_reference=reference,
        z_score=z,
    )


def _simulate_guesses(cfg: ProtocolConfig, rng, prep: np.ndarray, cap=None) -> np.ndarray:
    """Sample measurement outcomes for prepared index vectors and map to guesses."""
    ensemble = cfg.ensemble
    if isinstance(cfg.strategy, PerCopyParityStrategy):
        table = cfg.strategy.outcome_table(ensemble)
        outcomes = _sample_rows(rng, table, prep)
        return cfg.strategy.guesses_from_outcomes(outcomes)
    if isinstance(cfg.strategy, GlobalPovmStrategy):
        table = cfg.strategy.outcome_table(ensemble, cfg.copies, cap=cap)
        powers = ensemble.n ** np.arange(cfg.copies - 1, -1, -1)
        flat = prep @ powers
        outcome = _sample_rows(rng, table, flat)
        return cfg.strategy.guesses[outcome]
    raise TypeError(f"unsupported strategy type {type(cfg.strategy).__name__}")


def simulate_broadcast_scheme(
    cfg: ProtocolConfig,
    withhold_broadcast: bool = False,
    analytic_reference: float | None = None,
    cap: int | None = None,
) -> SimResult:
    """Monte Carlo run of the broadcast scheme with a uniformly hidden symbol.

    Per trial: draw the L preparation indices, compute their modulo-n sum y,
    draw x uniformly, publish z = x + y; the receiver guesses y from the
    quantum copies and outputs z - y_guess.  With ``withhold_broadcast`` the
    receiver never sees z and can only output its y guess, so any strategy
    sits at chance level 1/n.
    """
    ensemble = cfg.ensemble
    n = ensemble.n
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    etas = ensemble.probabilities
    prep_cum = np.cumsum(etas)
    prep = np.minimum(
        (rng.random((cfg.trials, cfg.copies))[..., None] >= prep_cum).sum(axis=-1), n - 1
    )
    y = prep.sum(axis=1) % n
    x = rng.integers(0, n, cfg.trials)
    y_guess = _simulate_guesses(cfg, rng, prep, cap=cap)
    if withhold_broadcast:
        x_guess = y_guess
    else:
        z = (x + y) % n
        x_guess = (z - y_guess) % n
    return _finish(x_guess == x, cfg, "broadcast", analytic_reference)


def simulate_direct_encoding(
    cfg: ProtocolConfig,
    x: int | None = None,
    analytic_reference: float | None = None,
    cap: int | None = None,
    max_rejection_rounds: int = 10_000,
) -> SimResult:
    """Monte Carlo run of direct encoding: the receiver gets the coarse state
    of symbol x (uniform unless fixed) and guesses x directly.

    Preparing the coarse state is simulated by sampling an index vector
    conditioned on its modulo-n sum, which is distributionally identical to
    building the mixture explicitly but needs only single-copy memory.
    """
    ensemble = cfg.ensemble
    n = ensemble.n
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    etas = ensemble.probabilities
    prep_cum = np.cumsum(etas)
    if x is None:
        xs = rng.integers(0, n, cfg.trials)
    else:
        if not 0 <= x < n:
            raise ValueError(f"symbol {x} out of range for n={n}")
        xs = np.full(cfg.trials, x, dtype=int)
    prep = np.empty((cfg.trials, cfg.copies), dtype=int)
    pending = np.arange(cfg.trials)
    for _ in range(max_rejection_rounds):
        draw = np.minimum(
            (rng.random((pending.size, cfg.copies))[..., None] >= prep_cum).sum(axis=-1),
            n - 1,
        )
        ok = draw.sum(axis=1) % n == xs[pending]
        prep[pending[ok]] = draw[ok]
        pending = pending[~ok]
        if pending.size == 0:
            break
    if pending.size:
        raise RuntimeError("conditional preparation sampling failed to fill all trials")
    x_guess = _simulate_guesses(cfg, rng, prep, cap=cap)
    return _finish(x_guess == xs, cfg, "direct-encoding", analytic_reference)


def _coarse_weights(ensemble: StateEnsemble, copies: int):
    """eta of every index vector plus the per-bin totals."""
    n = ensemble.n
    etas = ensemble.probabilities
    vectors = list(index_vectors(n, copies))
    weights = np.array([np.prod([etas[c] for c in vec]) for vec in vectors])
    sums = np.array([sum(vec) % n for vec in vectors])
    bin_eta = np.array([weights[sums == i].sum() for i in range(n)])
    return vectors, weights, sums, bin_eta


def exact_strategy_success(
    ensemble: StateEnsemble,
    copies: int,
    strategy,
    scheme: str = "broadcast",
    cap: int | None = None,
) -> float:
    """Deterministic success probability by full enumeration (no sampling).

    Sums the exact Born probability of every (preparation vector, outcome
    pattern) pair, weighted by the scheme's preparation distribution, with a
    correct-guess indicator.  Refuses enumerations beyond 10^7 pairs.
    """
    n = ensemble.n
    if scheme not in ("broadcast", "direct"):
        raise ValueError("scheme must be 'broadcast' or 'direct'")
    vectors, weights, sums, bin_eta = _coarse_weights(ensemble, copies)
    if scheme == "direct":
        if np.any(bin_eta <= 0.0):
            raise ValueError("a coarse bin has zero probability; direct encoding undefined")
        weights = weights / (n * bin_eta[sums])

    if isinstance(strategy, PerCopyParityStrategy):
        n_out = 2
        if len(vectors) * n_out**copies > ENUMERATION_CAP:
            raise ValueError("enumeration exceeds the 10^7 (preparation, outcome) pair cap")
        table = strategy.outcome_table(ensemble)
        patterns = list(index_vectors(n_out, copies))
        parities = np.array([sum(p) % 2 for p in patterns])
        total = 0.0
        for vec, w, target in zip(vectors, weights, sums):
            probs = np.ones(1)
            for cl in vec:
                probs = np.multiply.outer(probs, table[cl]).reshape(-1)
            total += w * probs[parities == target].sum()
        return float(total)

    if isinstance(strategy, GlobalPovmStrategy):
        if len(vectors) * strategy.povm.n_outcomes > ENUMERATION_CAP:
            raise ValueError("enumeration exceeds the 10^7 (preparation, outcome) pair cap")
        table = strategy.outcome_table(ensemble, copies, cap=cap)
        correct = strategy.guesses[None, :] == sums[:, None]
        return float((weights[:, None] * table * correct).sum())

    raise TypeError(f"unsupported strategy type {type(strategy).__name__}")
