import json

import numpy as np

from pthide import BipartiteDims
from pthide.constructions import bell_state, example1
from pthide.discrimination import helstrom_measurement
from pthide.serialize import (
    ensemble_from_dict,
    ensemble_to_dict,
    load_ensemble,
    operator_from_dict,
    operator_to_dict,
    povm_from_dict,
    povm_to_dict,
)

from conftest import random_hermitian


def test_operator_round_trip():
    op = random_hermitian(BipartiteDims(2, 3), np.random.default_rng(0))
    back = operator_from_dict(json.loads(json.dumps(operator_to_dict(op))))
    assert back.dims == op.dims
    assert np.allclose(back.entries, op.entries)


def test_real_operator_round_trip_stays_real():
    op = bell_state()
    back = operator_from_dict(operator_to_dict(op))
    assert back.entries.dtype == np.float64
    assert np.array_equal(back.entries, op.entries)


def test_ensemble_round_trip(tmp_path):
    e = example1(bell_state())
    payload = ensemble_to_dict(e)
    back = ensemble_from_dict(json.loads(json.dumps(payload)))
    assert back.n == e.n
    for (eta_a, rho_a), (eta_b, rho_b) in zip(e.items, back.items):
        assert eta_a == eta_b
        assert np.allclose(rho_a.entries, rho_b.entries)
    path = tmp_path / "ensemble.json"
    path.write_text(json.dumps(payload))
    assert load_ensemble(path).n == e.n


def test_povm_round_trip():
    povm = helstrom_measurement(example1(bell_state()), use_pt=True)
    back = povm_from_dict(json.loads(json.dumps(povm_to_dict(povm))))
    assert back.n_outcomes == povm.n_outcomes
    for a, b in zip(povm.elements, back.elements):
        assert np.allclose(a.entries, b.entries)
