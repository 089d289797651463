import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from instances import free_workload, random_model
from wtsim.core import InputError
from wtsim.execution import feasible_on
from wtsim.machine import (
    CostModel,
    elementary_leq,
    model_to_doc,
    parse_model,
    reconfig_energy,
    reconfig_time,
    validate_model,
)
from wtsim.jsonio import dumps


def test_reconfig_costs(m1):
    assert reconfig_time(m1, "big", "big") == 0
    assert reconfig_time(m1, "big", "little") == 1
    assert reconfig_time(m1, "little", "big") == 1
    assert reconfig_energy(m1, "big", "little") == 2
    assert reconfig_energy(m1, "little", "little") == 0
    with pytest.raises(InputError):
        reconfig_time(m1, "big", "huge")


def test_elementary_leq(m1):
    assert elementary_leq(m1, "little", "big", {"f"})
    assert not elementary_leq(m1, "big", "little", {"f"})
    assert elementary_leq(m1, "big", "big", {"f"})
    with pytest.raises(InputError):
        elementary_leq(m1, "big", "little", {"g"})


def test_validate_model(m1):
    assert validate_model(m1, {"f"}) == []
    bad = validate_model(m1.with_(rmax="little"), {"f"})
    assert len(bad) == 1 and "big" in bad[0] and "f" in bad[0]
    neg = validate_model(m1.with_(tau={"big": {"f": -1}, "little": {"f": 5}}), {"f"})
    assert any("tau[big][f]" in v and "negative" in v for v in neg)
    missing = validate_model(m1, {"f", "g"})
    assert any("tau[big][g]: missing" in v for v in missing)


def test_model_rejects_bad_shape():
    with pytest.raises(InputError):
        CostModel((), "big", {}, {})
    with pytest.raises(InputError):
        CostModel(("a", "a"), "a", {}, {})
    with pytest.raises(InputError):
        CostModel(("a",), "b", {}, {})


def test_parse_model_round_trip(m1):
    text = dumps(model_to_doc(m1))
    again = parse_model(text)
    assert again == m1
    assert dumps(model_to_doc(again)) == text


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("{", "line 1"),
        ('{"configs": []}', "rmax"),
        ('{"configs": [{"tau": {}, "gamma": {}}], "rmax": "x"}', "name"),
        ('{"configs": [{"name": "x", "tau": {"f": "z"}, "gamma": {}}], "rmax": "x"}', "tau"),
        ('{"configs": [{"name": "x", "tau": {}, "gamma": {}}], "rmax": "y"}', "rmax"),
    ],
)
def test_parse_model_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_model(text)


@given(st.integers(0, 10**6))
def test_elementary_leq_is_preorder(seed):
    rng = random.Random(seed)
    m = random_model(rng, lattice=False)
    alphabet = set(m.tau[m.rmax])
    cs = m.configs
    for r in cs:
        assert elementary_leq(m, r, r, alphabet)
    for x in cs:
        for y in cs:
            for z in cs:
                if elementary_leq(m, x, y, alphabet) and elementary_leq(m, y, z, alphabet):
                    assert elementary_leq(m, x, z, alphabet)


@given(st.integers(0, 10**6))
def test_elementary_order_transfers_feasibility(seed):
    rng = random.Random(seed)
    m = random_model(rng, lattice=False)
    labels = sorted(m.tau[m.rmax])
    spec = free_workload(rng, labels, rng.randint(0, 8))
    for r in m.configs:
        for r2 in m.configs:
            if elementary_leq(m, r2, r, labels) and feasible_on(r2, spec, m):
                assert feasible_on(r, spec, m)


def test_lattice_models_validate():
    for seed in range(50):
        m = random_model(random.Random(seed))
        assert validate_model(m) == []
