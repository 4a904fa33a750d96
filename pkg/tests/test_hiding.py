import numpy as np
import pytest

from pthide import (
    BipartiteDims,
    HermitianOperator,
    Povm,
    ProtocolConfig,
    GlobalPovmStrategy,
    PerCopyParityStrategy,
    exact_strategy_success,
    helstrom_measurement,
    identity,
    orthogonal_support_strategy,
    qg_level_upper_bound,
    qg_two_state,
    simulate_broadcast_scheme,
    simulate_direct_encoding,
    tensor_power,
)
from pthide.constructions import bell_state, example1

from conftest import random_state

D22 = BipartiteDims(2, 2)
TRIALS = 100_000


@pytest.fixture(scope="module")
def bell_ensemble():
    return example1(bell_state())


@pytest.fixture(scope="module")
def optimal_parity(bell_ensemble):
    return PerCopyParityStrategy(helstrom_measurement(bell_ensemble, use_pt=True))


@pytest.fixture(scope="module")
def correlation_parity():
    # both sides read the computational basis; outcome 0 = labels differ.
    same = np.zeros((4, 4))
    same[0, 0] = same[3, 3] = 1.0
    diff = np.eye(4) - same
    povm = Povm(D22, (HermitianOperator(D22, diff), HermitianOperator(D22, same)))
    return PerCopyParityStrategy(povm)


def test_parity_strategy_needs_two_outcomes():
    ident = identity(D22)
    zero = HermitianOperator(D22, np.zeros((4, 4)))
    with pytest.raises(ValueError, match="two-outcome"):
        PerCopyParityStrategy(Povm(D22, (ident, zero, zero)))


def test_born_sampling_matches_probabilities():
    # frequency of each outcome within 5 sigma of its exact Born weight
    rng_state = random_state(D22, np.random.default_rng(50))
    povm = helstrom_measurement(
        example1(bell_state()), use_pt=False
    )  # some fixed two-outcome measurement
    strat = PerCopyParityStrategy(povm)
    from pthide import StateEnsemble
    from pthide.hiding import _sample_rows

    e = StateEnsemble(D22, ((1.0, rng_state),))
    table = strat.outcome_table(e)
    rng = np.random.default_rng(123)
    rows = np.zeros((TRIALS, 1), dtype=int)
    outcomes = _sample_rows(rng, table, rows)
    for o in range(2):
        p = table[0, o]
        freq = float((outcomes == o).mean())
        sigma = np.sqrt(p * (1 - p) / TRIALS)
        assert abs(freq - p) <= 5 * sigma


def test_broadcast_parity_matches_closed_form(bell_ensemble, optimal_parity):
    for ell in (1, 4):
        ref = 0.5 + 0.5 * 2.0**-ell
        cfg = ProtocolConfig(
            ensemble=bell_ensemble, copies=ell, trials=TRIALS, seed=101, strategy=optimal_parity
        )
        res = simulate_broadcast_scheme(cfg, analytic_reference=ref)
        assert abs(res.z_score) <= 4.0
        assert res.stderr == pytest.approx(
            np.sqrt(res.empirical_success * (1 - res.empirical_success) / TRIALS)
        )


def test_broadcast_global_orthogonal_is_certain(bell_ensemble):
    strat = orthogonal_support_strategy(bell_ensemble, 3)
    cfg = ProtocolConfig(
        ensemble=bell_ensemble, copies=3, trials=20_000, seed=5, strategy=strat
    )
    res = simulate_broadcast_scheme(cfg)
    assert res.empirical_success == 1.0


def test_orthogonal_support_strategy_requires_orthogonality():
    rho = random_state(D22, np.random.default_rng(51))
    from pthide import StateEnsemble

    e = StateEnsemble(D22, ((0.5, rho), (0.5, rho)))
    with pytest.raises(ValueError, match="orthogonal"):
        orthogonal_support_strategy(e, 2)


def test_masking_without_broadcast(bell_ensemble, optimal_parity):
    cfg = ProtocolConfig(
        ensemble=bell_ensemble, copies=3, trials=TRIALS, seed=7, strategy=optimal_parity
    )
    res = simulate_broadcast_scheme(cfg, withhold_broadcast=True, analytic_reference=0.5)
    assert abs(res.z_score) <= 5.0


def test_exact_matches_simulation(bell_ensemble, correlation_parity):
    for scheme, runner in (
        ("broadcast", simulate_broadcast_scheme),
        ("direct", simulate_direct_encoding),
    ):
        exact = exact_strategy_success(bell_ensemble, 3, correlation_parity, scheme=scheme)
        cfg = ProtocolConfig(
            ensemble=bell_ensemble,
            copies=3,
            trials=TRIALS,
            seed=17,
            strategy=correlation_parity,
        )
        res = runner(cfg, analytic_reference=exact)
        assert abs(res.empirical_success - exact) <= 4 * res.stderr


def test_exact_parity_bell_closed_form(bell_ensemble, optimal_parity):
    for ell in range(1, 6):
        exact = exact_strategy_success(bell_ensemble, ell, optimal_parity, scheme="broadcast")
        assert abs(exact - (0.5 + 0.5 * 2.0**-ell)) < 1e-10


def test_exact_direct_encoding_hand_value(bell_ensemble, correlation_parity):
    # independent closed form: 1/2 + B^L/8 * (1/eta0 + 1/eta1) with B = 1/2 here
    for ell, eta0 in ((1, 0.75), (3, 0.5625)):
        eta0_level = 0.5 * (1 + 0.5**ell)
        expected = 0.5 + (0.5**ell / 8.0) * (1 / eta0_level + 1 / (1 - eta0_level))
        got = exact_strategy_success(bell_ensemble, ell, correlation_parity, scheme="direct")
        assert abs(got - expected) < 1e-12
    assert abs(
        exact_strategy_success(bell_ensemble, 3, correlation_parity, scheme="direct")
        - (0.5 + 4.0 / 63.0)
    ) < 1e-12


def test_random_guessing_strategy_is_chance(bell_ensemble):
    # outcome-independent POVM: the guess carries no information
    half = HermitianOperator(D22, np.eye(4) / 2)
    strat = GlobalPovmStrategy(Povm(D22, (half, half)), guesses=[0, 1], name="coin-flip")
    exact = exact_strategy_success(bell_ensemble, 1, strat, scheme="broadcast")
    assert abs(exact - 0.5) < 1e-12
    exact = exact_strategy_success(bell_ensemble, 1, strat, scheme="direct")
    assert abs(exact - 0.5) < 1e-12
    # two-copy variant on the folded space
    dims2 = BipartiteDims(4, 4)
    half2 = HermitianOperator(dims2, np.eye(16) / 2)
    strat2 = GlobalPovmStrategy(Povm(dims2, (half2, half2)), guesses=[0, 1], name="coin-flip")
    exact = exact_strategy_success(bell_ensemble, 2, strat2, scheme="direct")
    assert abs(exact - 0.5) < 1e-12


def test_level_povm_identity(bell_ensemble, correlation_parity):
    # explicit parity measurement equals ((M0+M1)^xL +/- (M0-M1)^xL)/2
    m0, m1 = correlation_parity.measurement.elements
    for ell in (2, 3):
        level = correlation_parity.level_povm(ell)
        total = tensor_power(m0 + m1, ell)
        diff = tensor_power(m0 - m1, ell)
        for i in (0, 1):
            expected = 0.5 * (total.entries + (-1) ** i * diff.entries)
            assert np.linalg.norm(level.elements[i].entries - expected) <= 1e-9


def test_level_povm_permutation_symmetric(correlation_parity):
    # measuring copies in any order is the same measurement
    level = correlation_parity.level_povm(2)
    d = 4
    perm = np.arange(d * d).reshape(d, d).T.reshape(-1)  # swap the two copies
    for el in level.elements:
        swapped = el.entries[np.ix_(perm, perm)]
        assert np.abs(swapped - el.entries).max() < 1e-12


def test_level_parity_success_equals_level_value(bell_ensemble, optimal_parity):
    # per-copy parity success on the coarse ensemble equals the exact level value
    from pthide import coarse_grain, success_probability, qg_level_two_state

    for ell in (2, 3):
        coarse = coarse_grain(bell_ensemble, ell)
        level = optimal_parity.level_povm(ell)
        got = success_probability(coarse, level)
        assert abs(got - qg_level_two_state(bell_ensemble, ell)) < 1e-10


def test_broadcast_parity_below_coarse_bound(bell_ensemble, correlation_parity):
    qg = qg_two_state(bell_ensemble)
    for ell in (1, 2, 3):
        cfg = ProtocolConfig(
            ensemble=bell_ensemble,
            copies=ell,
            trials=TRIALS,
            seed=23,
            strategy=correlation_parity,
        )
        res = simulate_broadcast_scheme(cfg)
        bound = qg_level_upper_bound(qg, 2, ell)
        assert res.empirical_success <= bound + 5 * res.stderr


def test_direct_encoding_fixed_symbol(bell_ensemble, correlation_parity):
    cfg = ProtocolConfig(
        ensemble=bell_ensemble, copies=2, trials=TRIALS, seed=31, strategy=correlation_parity
    )
    res0 = simulate_direct_encoding(cfg, x=0)
    res1 = simulate_direct_encoding(cfg, x=1)
    # conditioned runs bracket the uniform average
    avg = 0.5 * (res0.empirical_success + res1.empirical_success)
    exact = exact_strategy_success(bell_ensemble, 2, correlation_parity, scheme="direct")
    assert abs(avg - exact) <= 4 * (res0.stderr + res1.stderr)
    with pytest.raises(ValueError, match="out of range"):
        simulate_direct_encoding(cfg, x=2)


def test_enumeration_cap():
    e = example1(bell_state())
    strat = PerCopyParityStrategy(helstrom_measurement(e, use_pt=True))
    with pytest.raises(ValueError, match="cap"):
        exact_strategy_success(e, 14, strat)


def test_protocol_config_validation(bell_ensemble, optimal_parity):
    with pytest.raises(ValueError):
        ProtocolConfig(ensemble=bell_ensemble, copies=0, trials=10, seed=1, strategy=optimal_parity)
    with pytest.raises(ValueError):
        ProtocolConfig(ensemble=bell_ensemble, copies=1, trials=0, seed=1, strategy=optimal_parity)


def test_simulation_reproducible(bell_ensemble, optimal_parity):
    cfg = ProtocolConfig(
        ensemble=bell_ensemble, copies=2, trials=10_000, seed=99, strategy=optimal_parity
    )
    a = simulate_broadcast_scheme(cfg)
    b = simulate_broadcast_scheme(cfg)
    assert a.empirical_success == b.empirical_success
